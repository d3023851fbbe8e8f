#pragma once

// The unified m-atom Hamiltonian, its drive-free/perturbation split, dressed
// eigenstates, the exact propagator U0 of the dominant part, and the operator
// identities behind the dressing transformation for the Heisenberg (N),
// su(1,1) (K) and su(2) (J) algebras.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "scqed/fock.hpp"
#include "scqed/spin.hpp"

namespace scqed {

using complexd = std::complex<double>;

enum class Algebra { N, K, J };

struct ModelParams {
    double omega = 1.0;  // cavity frequency
    double g1 = 0.0;     // photon coupling
    double g2 = 0.0;     // classical drive amplitude
    double delta = 0.0;  // level splitting
    std::vector<double> drive_freqs;   // omega_j, one per atom
    std::vector<double> drive_phases;  // phi_j, one per atom
    int atoms = 1;
    Algebra algebra = Algebra::N;

    double x() const { return 2.0 * g1 / omega; }  // algebra N dressing parameter
    int dim_spin() const { return 1 << atoms; }

    bool strong_coupling(double ratio = 10.0) const {
        return delta == 0.0 || g1 >= ratio * std::abs(delta);
    }

    void validate() const {
        if (omega <= 0) throw std::invalid_argument("ModelParams: omega must be positive");
        if (g1 < 0 || g2 < 0) throw std::invalid_argument("ModelParams: couplings must be >= 0");
        if (atoms < 1 || atoms > kMaxAtoms)
            throw std::invalid_argument("ModelParams: atom count out of range");
        if (int(drive_freqs.size()) != atoms || int(drive_phases.size()) != atoms)
            throw std::invalid_argument("ModelParams: one drive frequency/phase per atom");
        for (double w : drive_freqs)
            if (w <= 0) throw std::invalid_argument("ModelParams: drive frequencies must be positive");
    }
};

// Generators of the bosonic/su(1,1)/su(2) representation entering H_L.
struct AlgebraRep {
    Algebra kind = Algebra::N;
    Eigen::MatrixXd Lp, Lm, L3;
    double index = 0.0;  // Bargmann index (K) or spin (J); unused for N

    int dim() const { return int(L3.rows()); }

    static AlgebraRep heisenberg(const FockTruncation& trunc) {
        trunc.validate();
        return {Algebra::N, creation(trunc.dim), annihilation(trunc.dim),
                number_operator(trunc.dim), 0.0};
    }

    // discrete-series su(1,1) in the single-index realization:
    // K3|n> = (k+n)|n>, K+|n> = sqrt((n+1)(n+2k))|n+1>
    static AlgebraRep su11_discrete(double bargmann_k, int dim) {
        if (bargmann_k <= 0) throw std::invalid_argument("su11_discrete: k must be positive");
        Eigen::MatrixXd kp = Eigen::MatrixXd::Zero(dim, dim);
        for (int n = 0; n + 1 < dim; ++n) kp(n + 1, n) = std::sqrt((n + 1.0) * (n + 2.0 * bargmann_k));
        Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(dim, bargmann_k, bargmann_k + dim - 1);
        return {Algebra::K, kp, kp.transpose(), Eigen::MatrixXd(d.asDiagonal()), bargmann_k};
    }

    // spin-j su(2); J3 spectrum {-j..j} exactly, finite so no truncation error
    static AlgebraRep su2(double spin) {
        int d = int(std::lround(2 * spin + 1));
        if (d < 2 || std::abs(2 * spin + 1 - d) > 1e-12)
            throw std::invalid_argument("su2: spin must be a nonnegative half-integer");
        Eigen::MatrixXd jp = Eigen::MatrixXd::Zero(d, d);
        for (int i = 0; i + 1 < d; ++i) {
            double mm = -spin + i;
            jp(i + 1, i) = std::sqrt(spin * (spin + 1) - mm * (mm + 1));
        }
        Eigen::VectorXd d3 = Eigen::VectorXd::LinSpaced(d, -spin, spin);
        return {Algebra::J, jp, jp.transpose(), Eigen::MatrixXd(d3.asDiagonal()), spin};
    }

    // two-boson Schwinger construction K+ = a1^dag a2^dag on a dim x dim
    // two-mode truncation; used to cross-check the single-index realization
    static AlgebraRep su11_two_boson(int dim_each) {
        Eigen::MatrixXd a = annihilation(dim_each);
        Eigen::MatrixXd ad = creation(dim_each);
        Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim_each, dim_each);
        auto kron = [](const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
            Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
            for (int r = 0; r < A.rows(); ++r)
                for (int c = 0; c < A.cols(); ++c)
                    out.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = A(r, c) * B;
            return out;
        };
        Eigen::MatrixXd kp = kron(ad, ad);
        Eigen::MatrixXd k3 = 0.5 * (kron(ad * a, id) + kron(id, ad * a) +
                                    Eigen::MatrixXd::Identity(dim_each * dim_each, dim_each * dim_each));
        return {Algebra::K, kp, kp.transpose(), k3, 0.5};
    }
};

namespace detail {
inline Eigen::MatrixXd kron(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    Eigen::MatrixXd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (int r = 0; r < A.rows(); ++r)
        for (int c = 0; c < A.cols(); ++c)
            out.block(r * B.rows(), c * B.cols(), B.rows(), B.cols()) = A(r, c) * B;
    return out;
}
}  // namespace detail

/// Max-norm residual of the dressing identity
///   omega L3 + g1 Lambda (L+ + L-) = Omega e^{-(Lambda x/2)(L+-L-)} G e^{+...}
/// on the leading (dim - buffer) block.  G is N - (g1 Lambda / omega)^2 for
/// the Heisenberg case and L3 itself for K and J, with (Omega, x) the
/// per-algebra closed forms.
inline double key_formula_residual(const AlgebraRep& rep, double omega, double g1, int Lambda,
                                   int buffer = 0) {
    if (omega <= 0) throw std::invalid_argument("key_formula_residual: omega must be positive");
    const double s = 2.0 * g1 * Lambda / omega;
    double Omega = 0.0, x = 0.0;
    switch (rep.kind) {
        case Algebra::N:
            Omega = omega;
            x = 2.0 * g1 / omega;
            break;
        case Algebra::K:
            if (Lambda == 0) throw std::invalid_argument("key_formula_residual: Lambda = 0 invalid for K");
            if (std::abs(s) >= 1.0)
                throw std::domain_error("key_formula_residual: |2 g1 Lambda / omega| must be < 1 for K");
            Omega = omega * std::sqrt(1.0 - s * s);
            x = std::atanh(s) / Lambda;
            break;
        case Algebra::J:
            if (Lambda == 0) throw std::invalid_argument("key_formula_residual: Lambda = 0 invalid for J");
            Omega = omega * std::sqrt(1.0 + s * s);
            x = std::atan(s) / Lambda;
            break;
    }
    const int d = rep.dim();
    if (buffer < 0 || buffer >= d) throw std::invalid_argument("key_formula_residual: bad buffer");
    Eigen::MatrixXd lhs = omega * rep.L3 + g1 * Lambda * (rep.Lp + rep.Lm);
    Eigen::MatrixXd core = rep.L3;
    if (rep.kind == Algebra::N)
        core -= std::pow(g1 * Lambda / omega, 2) * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd gen = (-0.5 * Lambda * x) * (rep.Lp - rep.Lm);
    Eigen::MatrixXd U = gen.exp();
    // for K the generator is not antisymmetric; invert explicitly
    Eigen::MatrixXd Uinv = (rep.kind == Algebra::K)
                               ? Eigen::MatrixXd((-gen).exp())
                               : Eigen::MatrixXd(U.transpose());
    Eigen::MatrixXd rhs = Omega * U * core * Uinv;
    const int t = d - buffer;
    return (lhs - rhs).topLeftCorner(t, t).cwiseAbs().maxCoeff();
}

/// H_L(t) for an arbitrary generator triple; all terms are real symmetric.
inline Eigen::MatrixXd build_HL(const ModelParams& p, const AlgebraRep& rep, double t) {
    p.validate();
    const int M = p.dim_spin(), dL = rep.dim();
    Eigen::MatrixXd idL = Eigen::MatrixXd::Identity(dL, dL);
    Eigen::MatrixXd H = detail::kron(Eigen::MatrixXd::Identity(M, M), p.omega * rep.L3);
    Eigen::MatrixXd x_op = rep.Lp + rep.Lm;
    for (int j = 1; j <= p.atoms; ++j) {
        Eigen::MatrixXd s1 = pauli_embedded(p.atoms, 1, j);
        Eigen::MatrixXd s3 = pauli_embedded(p.atoms, 3, j);
        double drive = p.g2 * std::cos(p.drive_freqs[j - 1] * t + p.drive_phases[j - 1]);
        H += detail::kron(s1, p.g1 * x_op + drive * idL);
        H += detail::kron(s3, (0.5 * p.delta) * idL);
    }
    return H;
}

inline Eigen::MatrixXd build_H0(const ModelParams& p, const AlgebraRep& rep, double t) {
    ModelParams q = p;
    q.delta = 0.0;
    return build_HL(q, rep, t);
}

/// Heisenberg-algebra (N) conveniences used by the dynamics path.
inline Eigen::MatrixXd build_HL(const ModelParams& p, const FockTruncation& trunc, double t) {
    return build_HL(p, AlgebraRep::heisenberg(trunc), t);
}
inline Eigen::MatrixXd build_H0(const ModelParams& p, const FockTruncation& trunc, double t) {
    return build_H0(p, AlgebraRep::heisenberg(trunc), t);
}

// ---- dressed states (algebra N) --------------------------------------------

struct DressedState {
    SpinLabel label;
    int n = 0;
    Eigen::VectorXd vector;
};

namespace detail {
inline void require_N(const ModelParams& p, const char* who) {
    if (p.algebra != Algebra::N)
        throw std::invalid_argument(std::string(who) + ": only the Heisenberg algebra (N) has a dynamics path");
}
}  // namespace detail

/// Per-Lambda displacement blocks, cached so that U0 and interaction-frame
/// code do not re-exponentiate for every time sample.
struct Dressing {
    ModelParams params;
    FockTruncation trunc;
    std::vector<Eigen::MatrixXd> block;  // D(-Lambda(lambda) x / 2), one per label index

    static Dressing build(const ModelParams& p, const FockTruncation& trunc) {
        detail::require_N(p, "Dressing");
        p.validate();
        trunc.validate();
        Dressing d{p, trunc, {}};
        const int M = p.dim_spin();
        d.block.reserve(M);
        for (int li = 0; li < M; ++li) {
            SpinLabel l = SpinLabel::from_index(p.atoms, li);
            d.block.push_back(displacement(trunc, -0.5 * l.Lambda() * p.x()));
        }
        return d;
    }
};

/// Drive-free part of the dressed eigenvalue: omega (n - x^2 Lambda^2 / 4).
inline double dressed_energy_static(const SpinLabel& label, int n, const ModelParams& p) {
    const double x = p.x();
    return p.omega * (n - 0.25 * x * x * label.Lambda() * label.Lambda());
}

/// Full instantaneous eigenvalue E_n(t) of the drive-dressed Hamiltonian.
inline double dressed_energy(const SpinLabel& label, int n, const ModelParams& p, double t) {
    detail::require_N(p, "dressed_energy");
    double e = dressed_energy_static(label, n, p);
    for (int j = 0; j < p.atoms; ++j)
        e += label.lambdas[j] * p.g2 * std::cos(p.drive_freqs[j] * t + p.drive_phases[j]);
    return e;
}

inline DressedState dressed_state(const SpinLabel& label, int n, const ModelParams& p,
                                  const FockTruncation& trunc) {
    detail::require_N(p, "dressed_state");
    trunc.validate();
    if (n < 0 || n >= trunc.trusted())
        throw std::out_of_range("dressed_state: n must lie below the buffered block");
    Eigen::MatrixXd D = displacement(trunc, -0.5 * label.Lambda() * p.x());
    Eigen::VectorXd spin = lambda_vector(label);
    Eigen::VectorXd out(spin.size() * trunc.dim);
    for (int i = 0; i < spin.size(); ++i) out.segment(i * trunc.dim, trunc.dim) = spin(i) * D.col(n);
    return {label, n, out};
}

/// All dressed vectors as columns, label-major then Fock index.
inline Eigen::MatrixXd dressed_basis(const ModelParams& p, const FockTruncation& trunc) {
    detail::require_N(p, "dressed_basis");
    Dressing d = Dressing::build(p, trunc);
    const int M = p.dim_spin(), dim = trunc.dim;
    Eigen::MatrixXd B(M * dim, M * dim);
    for (int li = 0; li < M; ++li) {
        Eigen::VectorXd spin = lambda_vector(SpinLabel::from_index(p.atoms, li));
        for (int n = 0; n < dim; ++n) {
            for (int i = 0; i < M; ++i)
                B.block(i * dim, li * dim + n, dim, 1) = spin(i) * d.block[li].col(n);
        }
    }
    return B;
}

/// U0(t) = sum e^{-i[t E_n(lambda) + sum_j lambda_j (g2/omega_j) sin(omega_j t + phi_j)]}
///         |{lambda,n}><{lambda,n}|  (paper normalization: U0(0) carries the
/// e^{-i sum lambda_j (g2/omega_j) sin(phi_j)} phases, identity when phi = 0).
inline Eigen::MatrixXcd U0(const Dressing& d, double t) {
    const ModelParams& p = d.params;
    const int M = p.dim_spin(), dim = d.trunc.dim, N = M * dim;
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
    for (int li = 0; li < M; ++li) {
        SpinLabel l = SpinLabel::from_index(p.atoms, li);
        double drive_phase = 0.0;
        for (int j = 0; j < p.atoms; ++j)
            drive_phase += l.lambdas[j] * (p.g2 / p.drive_freqs[j]) *
                           std::sin(p.drive_freqs[j] * t + p.drive_phases[j]);
        Eigen::VectorXcd ph(dim);
        for (int n = 0; n < dim; ++n)
            ph(n) = std::exp(complexd(0.0, -(t * dressed_energy_static(l, n, p) + drive_phase)));
        Eigen::MatrixXcd blk =
            d.block[li] * ph.asDiagonal() * d.block[li].transpose();
        Eigen::VectorXd spin = lambda_vector(l);
        for (int i = 0; i < M; ++i)
            for (int k = 0; k < M; ++k)
                out.block(i * dim, k * dim, dim, dim) += spin(i) * spin(k) * blk;
    }
    return out;
}

inline Eigen::MatrixXcd U0(const ModelParams& p, const FockTruncation& trunc, double t) {
    return U0(Dressing::build(p, trunc), t);
}

}  // namespace scqed
