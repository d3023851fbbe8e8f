#pragma once

// The m = 2 Bell-Schroedinger cat basis, the interaction-frame Hamiltonian
// H_F with its Fock-diagonal / off-diagonal split, and the harmonic
// coefficient functions that drive the two-qubit gate construction.
//
// Cat states at fixed Fock index n (phi = 0 frame):
//   Phi1 = (|{+,+,n}> + |{-,-,n}>)/sqrt2,  Phi2 = (|{+,+,n}> - |{-,-,n}>)/sqrt2,
//   Phi3 = (|{-,+,n}> + |{+,-,n}>)/sqrt2,  Phi4 = (|{-,+,n}> - |{+,-,n}>)/sqrt2.

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "scqed/bessel.hpp"
#include "scqed/fock.hpp"
#include "scqed/model.hpp"

namespace scqed {

namespace detail {
inline void require_two_atoms(const ModelParams& p, const char* who) {
    if (p.atoms != 2) throw std::invalid_argument(std::string(who) + ": cat frame requires m = 2");
}
}  // namespace detail

struct CatState {
    int index;  // 1..4
    int n;
    Eigen::VectorXd vector;
};

/// Columns are Phi_1..Phi_4 expressed in the product-label order
/// (+1,+1), (+1,-1), (-1,+1), (-1,-1); orthogonal and self-transposed-inverse.
inline Eigen::Matrix4d cat_change_of_basis() {
    Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
    const double r = 1.0 / std::sqrt(2.0);
    c(0, 0) = r;  c(3, 0) = r;   // Phi1
    c(0, 1) = r;  c(3, 1) = -r;  // Phi2
    c(2, 2) = r;  c(1, 2) = r;   // Phi3
    c(2, 3) = r;  c(1, 3) = -r;  // Phi4
    return c;
}

inline Eigen::Vector4cd product_to_cat(const Eigen::Vector4cd& prod) {
    return cat_change_of_basis().transpose() * prod;
}
inline Eigen::Vector4cd cat_to_product(const Eigen::Vector4cd& cat) {
    return cat_change_of_basis() * cat;
}

inline std::array<CatState, 4> cat_basis(int n, const ModelParams& p, const FockTruncation& trunc) {
    detail::require_two_atoms(p, "cat_basis");
    if (n < 0 || n >= trunc.trusted())
        throw std::out_of_range("cat_basis: n must lie below the buffered block");
    std::array<Eigen::VectorXd, 4> prod;
    for (int li = 0; li < 4; ++li)
        prod[li] = dressed_state(SpinLabel::from_index(2, li), n, p, trunc).vector;
    Eigen::Matrix4d c = cat_change_of_basis();
    std::array<CatState, 4> out;
    for (int k = 0; k < 4; ++k) {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(prod[0].size());
        for (int li = 0; li < 4; ++li) v += c(li, k) * prod[li];
        out[k] = {k + 1, n, std::move(v)};
    }
    return out;
}

/// Phase exponent of the (lambda, j) term of H_F at Fock-diagonal order:
/// t omega x^2 (1 - lambda_j Lambda) + 2 lambda_j (g2/omega_j) sin(omega_j t + phi_j).
inline double hf_phase(const SpinLabel& label, int site, const ModelParams& p, double t) {
    const int lj = label.lambdas[site - 1];
    const double x = p.x();
    return p.omega * x * x * t * (1.0 - lj * label.Lambda()) +
           2.0 * lj * (p.g2 / p.drive_freqs[site - 1]) *
               std::sin(p.drive_freqs[site - 1] * t + p.drive_phases[site - 1]);
}

/// H_F = U0^dag (sum_j sigma_3^{(j)} x 1) U0 assembled from the closed form,
/// expressed in the dressed basis (label-major, Fock-minor).  Element
/// ((lambda,n),(lambda_(j),n')) = e^{i[t omega (n-n') + hf_phase]} <n|e^{lambda_j x (a^dag-a)}|n'>.
inline Eigen::MatrixXcd HF_matrix(const ModelParams& p, const FockTruncation& trunc, double t) {
    detail::require_two_atoms(p, "HF_matrix");
    detail::require_N(p, "HF_matrix");
    trunc.validate();
    const int dim = trunc.dim, N = 4 * dim;
    const double x = p.x();
    Eigen::MatrixXd Dp = displacement(trunc, x), Dm = displacement(trunc, -x);
    Eigen::VectorXcd fock_ph(dim);
    for (int n = 0; n < dim; ++n) fock_ph(n) = std::exp(complexd(0.0, p.omega * t * n));
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
    for (int li = 0; li < 4; ++li) {
        SpinLabel l = SpinLabel::from_index(2, li);
        for (int j = 1; j <= 2; ++j) {
            const int col = l.flipped(j).index();
            const Eigen::MatrixXd& D = (l.lambdas[j - 1] == 1) ? Dp : Dm;
            complexd ph = std::exp(complexd(0.0, hf_phase(l, j, p, t)));
            out.block(li * dim, col * dim, dim, dim) +=
                ph * (fock_ph.asDiagonal() * D.cast<complexd>() * fock_ph.conjugate().asDiagonal());
        }
    }
    return out;
}

/// Split into the Fock-diagonal part (n = n' within every label block) and
/// the remainder; the two parts add back to the input exactly.
inline std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd> split_HF(const Eigen::MatrixXcd& hf, int dim) {
    if (hf.rows() != hf.cols() || hf.rows() % dim != 0)
        throw std::invalid_argument("split_HF: matrix shape incompatible with Fock dimension");
    const int blocks = int(hf.rows()) / dim;
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(hf.rows(), hf.cols());
    for (int bi = 0; bi < blocks; ++bi)
        for (int bj = 0; bj < blocks; ++bj)
            for (int n = 0; n < dim; ++n)
                diag(bi * dim + n, bj * dim + n) = hf(bi * dim + n, bj * dim + n);
    return {diag, hf - diag};
}

/// Frobenius norm of (delta/2) H_F'' restricted to the buffered block; the
/// size of what the fixed-n reduction drops.
inline double dropped_hf2_norm(const ModelParams& p, const FockTruncation& trunc, double t) {
    Eigen::MatrixXcd hf2 = split_HF(HF_matrix(p, trunc, t), trunc.dim).second;
    const int tr = trunc.trusted();
    double s = 0.0;
    for (int bi = 0; bi < 4; ++bi)
        for (int bj = 0; bj < 4; ++bj)
            s += hf2.block(bi * trunc.dim, bj * trunc.dim, tr, tr).squaredNorm();
    return 0.5 * std::abs(p.delta) * std::sqrt(s);
}

/// The eight-term fixed-n operator {sum_lambda sum_j ...} of the m = 2
/// expansion, as a 4x4 matrix over the product labels.  The displaced-element
/// prefactor <n|e^{x(a^dag-a)}|n> is not included; the phases are independent
/// of n.
inline Eigen::Matrix4cd expansion_m2(int n, const ModelParams& p, double t) {
    detail::require_two_atoms(p, "expansion_m2");
    (void)n;
    Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
    for (int li = 0; li < 4; ++li) {
        SpinLabel l = SpinLabel::from_index(2, li);
        for (int j = 1; j <= 2; ++j)
            out(li, l.flipped(j).index()) += std::exp(complexd(0.0, hf_phase(l, j, p, t)));
    }
    return out;
}

/// E_{delta,n,+-} = (delta/2) <n|e^{x(a^dag-a)}|n> (J_0(Gamma_1) +- J_0(Gamma_2)).
inline double E_delta(int n, const ModelParams& p, int sign) {
    detail::require_two_atoms(p, "E_delta");
    if (sign != 1 && sign != -1) throw std::invalid_argument("E_delta: sign must be +-1");
    const double g1m = 2.0 * p.g2 / p.drive_freqs[0];
    const double g2m = 2.0 * p.g2 / p.drive_freqs[1];
    const double j01 = bessel_j(0, g1m), j02 = bessel_j(0, g2m);
    return 0.5 * p.delta * displaced_diag_element(n, p.x()) *
           (sign == 1 ? j01 + j02 : j01 - j02);
}

/// Truncated harmonic series behind the coupling coefficients:
///   A0 = pref (E1 + E2), B0 = pref (O1 - O2), C0 = pref (O1 + O2),
///   D0 = pref (E1 - E2), with E_j / O_j the even / odd alpha != 0 parts of
/// the Jacobi-Anger expansion of drive j and pref = (delta/2)<n|e^{x(..)}|n>.
/// A0, D0 are real; B0, C0 imaginary, which is the conjugation symmetry.
struct CoefficientFunctions {
    int n = 0;
    double prefactor = 0.0;
    double omega1 = 0.0, omega2 = 0.0;
    int cutoff = 0;
    std::vector<double> j1, j2;  // J_0..J_cutoff of Gamma_1, Gamma_2

    static CoefficientFunctions build(int n, const ModelParams& p, int cutoff) {
        detail::require_two_atoms(p, "CoefficientFunctions");
        if (cutoff < 1) throw std::invalid_argument("CoefficientFunctions: cutoff must be >= 1");
        CoefficientFunctions c;
        c.n = n;
        c.prefactor = 0.5 * p.delta * displaced_diag_element(n, p.x());
        c.omega1 = p.drive_freqs[0];
        c.omega2 = p.drive_freqs[1];
        c.cutoff = cutoff;
        c.j1 = bessel_j_array(cutoff, 2.0 * p.g2 / c.omega1);
        c.j2 = bessel_j_array(cutoff, 2.0 * p.g2 / c.omega2);
        return c;
    }

    // even part: sum_{alpha != 0 even} J_alpha e^{i alpha w t} = 2 sum_{a>=2 even} J_a cos(a w t)
    complexd even_series(const std::vector<double>& tab, double w, double t) const {
        double s = 0.0;
        for (int a = 2; a <= cutoff; a += 2) s += tab[a] * std::cos(a * w * t);
        return complexd(2.0 * s, 0.0);
    }
    // odd part: sum_{alpha odd} J_alpha e^{i alpha w t} = 2 i sum_{a>=1 odd} J_a sin(a w t)
    complexd odd_series(const std::vector<double>& tab, double w, double t) const {
        double s = 0.0;
        for (int a = 1; a <= cutoff; a += 2) s += tab[a] * std::sin(a * w * t);
        return complexd(0.0, 2.0 * s);
    }

    complexd A0(double t) const {
        return prefactor * (even_series(j1, omega1, t) + even_series(j2, omega2, t));
    }
    complexd B0(double t) const {
        return prefactor * (odd_series(j1, omega1, t) - odd_series(j2, omega2, t));
    }
    complexd C0(double t) const {
        return prefactor * (odd_series(j1, omega1, t) + odd_series(j2, omega2, t));
    }
    complexd D0(double t) const {
        return prefactor * (even_series(j1, omega1, t) - even_series(j2, omega2, t));
    }
};

/// Cat-basis split of the fixed-n operator into the alpha = 0 part K0F'
/// (which the U_n / V_n frame integrates exactly) and the alpha != 0
/// harmonics K1F'.  Matrices are 4x4 over (Phi1, Phi2, Phi3, Phi4); the
/// displaced-element prefactor is again left out.
struct CatFrameSplit {
    double gamma = 0.0;  // omega x^2
    double j01 = 0.0, j02 = 0.0;
    CoefficientFunctions coeffs;  // prefactor included in coeffs only

    static CatFrameSplit build(int n, const ModelParams& p, int cutoff) {
        CatFrameSplit s;
        s.coeffs = CoefficientFunctions::build(n, p, cutoff);
        s.gamma = p.omega * p.x() * p.x();
        s.j01 = bessel_j(0, 2.0 * p.g2 / p.drive_freqs[0]);
        s.j02 = bessel_j(0, 2.0 * p.g2 / p.drive_freqs[1]);
        return s;
    }

    Eigen::Matrix4cd K0F(double t) const {
        Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
        complexd em = std::exp(complexd(0.0, -gamma * t));
        out(0, 2) = (j01 + j02) * em;
        out(2, 0) = std::conj(out(0, 2));
        out(1, 3) = (j01 - j02) * em;
        out(3, 1) = std::conj(out(1, 3));
        return out;
    }

    Eigen::Matrix4cd K1F(double t) const {
        const CoefficientFunctions& c = coeffs;
        complexd e1 = c.even_series(c.j1, c.omega1, t), e2 = c.even_series(c.j2, c.omega2, t);
        complexd o1 = c.odd_series(c.j1, c.omega1, t), o2 = c.odd_series(c.j2, c.omega2, t);
        complexd em = std::exp(complexd(0.0, -gamma * t));
        Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
        out(0, 2) = em * (e1 + e2);   // Phi1 <- Phi3
        out(0, 3) = em * (o1 - o2);   // Phi1 <- Phi4
        out(1, 2) = em * (o1 + o2);   // Phi2 <- Phi3
        out(1, 3) = em * (e1 - e2);   // Phi2 <- Phi4
        out(2, 0) = std::conj(out(0, 2));
        out(3, 0) = std::conj(out(0, 3));
        out(2, 1) = std::conj(out(1, 2));
        out(3, 1) = std::conj(out(1, 3));
        return out;
    }
};

}  // namespace scqed
