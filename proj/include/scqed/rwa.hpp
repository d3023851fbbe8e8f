#pragma once

// The time-dependent 2x2 solver, the U_n / V_n block propagators, the
// Bessel-resonance root finder and the closed-form gate unitary built from
// rank-1 projector algebra.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "scqed/cat.hpp"
#include "scqed/errors.hpp"

namespace scqed {

// ---- 2x2 spectral machinery -------------------------------------------------

/// Spectral data of A = (0 alpha; alpha theta):
///   mu = (theta + sqrt(theta^2 + 4 alpha^2))/2, nu = (theta - ...)/2,
/// P orthogonal with columns (alpha, mu)/|.| and (alpha, nu)/|.|.
struct TwoLevelSpectral {
    double alpha = 0.0, theta = 0.0;
    double mu = 0.0, nu = 0.0;
    Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
};

inline TwoLevelSpectral spectral_decompose(double alpha, double theta) {
    TwoLevelSpectral s;
    s.alpha = alpha;
    s.theta = theta;
    const double disc = std::hypot(theta, 2.0 * alpha);
    // stable quadratic: take the non-cancelling root, get the other from
    // mu nu = -alpha^2 so that P stays orthogonal for |alpha| << |theta|
    if (theta >= 0.0) {
        s.mu = 0.5 * (theta + disc);
        s.nu = (s.mu != 0.0) ? -(alpha * alpha) / s.mu : 0.0;
    } else {
        s.nu = 0.5 * (theta - disc);
        s.mu = (s.nu != 0.0) ? -(alpha * alpha) / s.nu : 0.0;
    }
    if (alpha == 0.0) {
        // continuous limit of the eigenvector columns, ordered by (mu, nu)
        if (theta > 0.0)
            s.P << 0, 1, 1, 0;
        else
            s.P = Eigen::Matrix2d::Identity();
        return s;
    }
    Eigen::Vector2d cm(alpha, s.mu), cn(alpha, s.nu);
    s.P.col(0) = cm / cm.norm();
    s.P.col(1) = cn / cn.norm();
    return s;
}

/// Q(t) = e^{-i t A} = P diag(e^{-i t mu}, e^{-i t nu}) P^T.
inline Eigen::Matrix2cd Q_of_t(const TwoLevelSpectral& s, double t) {
    Eigen::Vector2cd ph(std::exp(complexd(0, -t * s.mu)), std::exp(complexd(0, -t * s.nu)));
    return s.P.cast<complexd>() * ph.asDiagonal() * s.P.transpose().cast<complexd>();
}

/// Propagator of i psi' = (0, alpha e^{-i theta t}; alpha e^{i theta t}, 0) psi:
/// U(t) = diag(1, e^{i theta t}) e^{-i t A}.
inline Eigen::Matrix2cd appendix_propagator(double alpha, double theta, double t) {
    Eigen::Matrix2cd u = Q_of_t(spectral_decompose(alpha, theta), t);
    u.row(1) *= std::exp(complexd(0, theta * t));
    return u;
}

/// U_n, V_n: the same propagator with (alpha, theta) = (E_{delta,n,+-}, omega x^2).
inline std::pair<Eigen::Matrix2cd, Eigen::Matrix2cd> Un_Vn(int n, const ModelParams& p, double t) {
    const double gamma = p.omega * p.x() * p.x();
    return {appendix_propagator(E_delta(n, p, +1), gamma, t),
            appendix_propagator(E_delta(n, p, -1), gamma, t)};
}

// ---- resonance condition ----------------------------------------------------

/// Which exponent difference the drive harmonic must cancel.  MuMu is the
/// published condition alpha w2 + mu_+ - mu_- = 0; the other branches are the
/// natural companions obtained by picking the nu eigenvalue on either side
/// and share all of the machinery below.
enum class ResonanceBranch { MuMu, MuNu, NuMu, NuNu };

struct ResonanceSolution {
    int n = 0;
    int alpha_harmonic = 0;
    double omega2 = 0.0;
    TwoLevelSpectral spectral_plus, spectral_minus;
    ResonanceBranch branch = ResonanceBranch::MuMu;
    double residual = 0.0;
};

namespace detail {
inline double branch_value(const TwoLevelSpectral& s, bool take_mu) { return take_mu ? s.mu : s.nu; }
}

/// alpha w2 + b(+) - b(-) with both spectra recomputed at this w2 (the Bessel
/// self-consistency: E_{delta,n,+-} contain J_0(2 g2 / w2)).
inline double resonance_residual(int n, const ModelParams& p, int alpha, double omega2,
                                 ResonanceBranch branch = ResonanceBranch::MuMu) {
    if (omega2 <= 0) throw std::invalid_argument("resonance_residual: omega2 must be positive");
    ModelParams q = p;
    q.drive_freqs[1] = omega2;
    const double gamma = p.omega * p.x() * p.x();
    TwoLevelSpectral sp = spectral_decompose(E_delta(n, q, +1), gamma);
    TwoLevelSpectral sm = spectral_decompose(E_delta(n, q, -1), gamma);
    const bool plus_mu = (branch == ResonanceBranch::MuMu || branch == ResonanceBranch::MuNu);
    const bool minus_mu = (branch == ResonanceBranch::MuMu || branch == ResonanceBranch::NuMu);
    return alpha * omega2 + detail::branch_value(sp, plus_mu) - detail::branch_value(sm, minus_mu);
}

/// Enumerate the roots of the resonance condition in [lo, hi].  The residual
/// oscillates through J_0(2 g2 / w2), so the grid is refined in the Bessel
/// argument as well as in w2 before bracketed bisection (200 halvings) plus a
/// final secant polish.  Roots are returned in increasing w2.
inline std::vector<ResonanceSolution> solve_resonance(int n, const ModelParams& p, int alpha,
                                                      double lo, double hi,
                                                      ResonanceBranch branch = ResonanceBranch::MuMu,
                                                      int max_roots = 64) {
    detail::require_two_atoms(p, "solve_resonance");
    if (alpha == 0) throw std::invalid_argument("solve_resonance: alpha_harmonic must be nonzero");
    if (!(lo > 0) || !(hi > lo)) throw std::invalid_argument("solve_resonance: bad bracket");
    auto f = [&](double w) { return resonance_residual(n, p, alpha, w, branch); };

    // grid: uniform in w2, refined so the Bessel argument never jumps by more
    // than ~pi/8 between samples
    const double gspan = 2.0 * p.g2 * (1.0 / lo - 1.0 / hi);
    long n_bessel = long(gspan / (M_PI / 8.0)) + 1;
    long n_grid = std::min<long>(4'000'000, std::max<long>(2048, n_bessel));
    std::vector<ResonanceSolution> roots;
    double prev_w = lo, prev_f = f(lo);
    for (long i = 1; i <= n_grid && int(roots.size()) < max_roots; ++i) {
        // uniform in 1/w2 (uniform Bessel argument), lo..hi
        double inv = (1.0 / lo) + (double(i) / double(n_grid)) * ((1.0 / hi) - (1.0 / lo));
        double w = 1.0 / inv;
        double fw = f(w);
        if (prev_f == 0.0 || (std::signbit(prev_f) != std::signbit(fw))) {
            double a = prev_w, b = w, fa = prev_f;
            for (int it = 0; it < 200 && b - a > 0; ++it) {
                double m = 0.5 * (a + b);
                if (m == a || m == b) break;
                double fm = f(m);
                if (fm == 0.0) { a = b = m; fa = 0.0; break; }
                if (std::signbit(fm) == std::signbit(fa)) { a = m; fa = fm; }
                else b = m;
            }
            double r = 0.5 * (a + b);
            // secant polish
            for (int it = 0; it < 4; ++it) {
                double h = std::max(1e-9 * r, 1e-15);
                double d = (f(r + h) - f(r - h)) / (2 * h);
                if (d == 0.0) break;
                double step = f(r) / d;
                if (!std::isfinite(step) || std::abs(step) > (b - a) + h) break;
                r -= step;
            }
            ModelParams q = p;
            q.drive_freqs[1] = r;
            const double gamma = p.omega * p.x() * p.x();
            ResonanceSolution sol;
            sol.n = n;
            sol.alpha_harmonic = alpha;
            sol.omega2 = r;
            sol.spectral_plus = spectral_decompose(E_delta(n, q, +1), gamma);
            sol.spectral_minus = spectral_decompose(E_delta(n, q, -1), gamma);
            sol.branch = branch;
            sol.residual = f(r);
            if (roots.empty() || std::abs(roots.back().omega2 - r) > 1e-13 * std::max(1.0, r))
                roots.push_back(sol);
        }
        prev_w = w;
        prev_f = fw;
    }
    return roots;
}

/// First root in the bracket; throws NoRootError when the harmonic is
/// unreachable for these parameters.
inline ResonanceSolution solve_resonance_first(int n, const ModelParams& p, int alpha, double lo,
                                               double hi,
                                               ResonanceBranch branch = ResonanceBranch::MuMu) {
    auto roots = solve_resonance(n, p, alpha, lo, hi, branch, 1);
    if (roots.empty())
        throw NoRootError("solve_resonance: no root of the resonance condition in bracket [" +
                          std::to_string(lo) + ", " + std::to_string(hi) + "] for alpha = " +
                          std::to_string(alpha));
    return roots.front();
}

// ---- RWA gate ----------------------------------------------------------------

/// Rabi rate and coupling matrix of the published rotating-wave reduction at a
/// solved resonance: R and the rank-1 K = (E+, mu+)^T (E-, mu-) / (N+ N-).
/// K K^T and K^T K are the rank-1 projectors onto those vectors.
struct RwaGate {
    double rabi_rate = 0.0;
    Eigen::Matrix2d K = Eigen::Matrix2d::Zero();
    ResonanceSolution resonance;
    bool trivial = false;  // even harmonic: J_alpha(G) - J_alpha(-G) = 0, so R = 0

    /// Closed form of exp{(i R t / 2) (0 K; K^T 0)} over (c1, c3, c2, c4):
    /// 1 - KK^T + cos(Rt/2) KK^T on the odd block, i sin(Rt/2) K coupling,
    /// written as 1 + (cos - 1) KK^T so that gate(0) is exactly the identity.
    Eigen::Matrix4cd gate(double t) const {
        const Eigen::Matrix2d kkt = K * K.transpose();
        const Eigen::Matrix2d ktk = K.transpose() * K;
        const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
        const double cs = std::cos(0.5 * rabi_rate * t), sn = std::sin(0.5 * rabi_rate * t);
        Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
        u.topLeftCorner<2, 2>() = (id + (cs - 1.0) * kkt).cast<complexd>();
        u.bottomRightCorner<2, 2>() = (id + (cs - 1.0) * ktk).cast<complexd>();
        u.topRightCorner<2, 2>() = complexd(0, 1) * sn * K.cast<complexd>();
        u.bottomLeftCorner<2, 2>() = complexd(0, 1) * sn * K.transpose().cast<complexd>();
        return u;
    }
};

inline RwaGate rwa_reduce(int n, const ModelParams& p, const ResonanceSolution& res) {
    detail::require_two_atoms(p, "rwa_reduce");
    if (res.branch != ResonanceBranch::MuMu)
        throw std::invalid_argument("rwa_reduce: the gate construction is defined for the MuMu branch");
    ModelParams q = p;
    q.drive_freqs[1] = res.omega2;
    const double gamma2 = 2.0 * q.g2 / res.omega2;
    const int a = res.alpha_harmonic;
    const double jdiff = 0.5 * (bessel_j(a, gamma2) - bessel_j(a, -gamma2));
    const double ep = res.spectral_plus.alpha, em = res.spectral_minus.alpha;
    const double mup = res.spectral_plus.mu, mum = res.spectral_minus.mu;
    const double np = std::hypot(ep, mup), nm = std::hypot(em, mum);

    RwaGate g;
    g.resonance = res;
    g.trivial = (a % 2 == 0);
    g.K = Eigen::Vector2d(ep, mup) * Eigen::RowVector2d(em, mum) / (np * nm);
    g.rabi_rate = 0.5 * q.delta * displaced_diag_element(n, q.x()) * jdiff *
                  (ep * mum + em * mup) / (np * nm);
    return g;
}

inline Eigen::Matrix4cd gate_unitary(const RwaGate& g, double t) { return g.gate(t); }

// ---- exact pre-RWA block equations -------------------------------------------

/// The coupled fixed-n system on (c1, c3, c2, c4): the exact interaction-frame
/// right-hand side with all drive harmonics retained, which the RWA gate is
/// supposed to approximate.  Bessel tables and the 2x2 spectra are cached at
/// construction.
struct BlockSystem {
    int n = 0;
    double gamma = 0.0;
    CoefficientFunctions coeffs;
    TwoLevelSpectral sp, sm;

    static BlockSystem build(int n, const ModelParams& p, int cutoff) {
        detail::require_two_atoms(p, "BlockSystem");
        BlockSystem b;
        b.n = n;
        b.gamma = p.omega * p.x() * p.x();
        b.coeffs = CoefficientFunctions::build(n, p, cutoff);
        b.sp = spectral_decompose(E_delta(n, p, +1), b.gamma);
        b.sm = spectral_decompose(E_delta(n, p, -1), b.gamma);
        return b;
    }

    /// default cutoff |alpha| <= max(40, 3 max(Gamma_1, Gamma_2))
    static int default_cutoff(const ModelParams& p) {
        double gmax = std::max(2.0 * p.g2 / p.drive_freqs[0], 2.0 * p.g2 / p.drive_freqs[1]);
        return std::max(40, int(std::ceil(3.0 * gmax)));
    }

    /// Hermitian generator M(t): i c' = M(t) c.
    Eigen::Matrix4cd generator(double t) const {
        const complexd a0 = coeffs.A0(t), b0 = coeffs.B0(t), c0 = coeffs.C0(t), d0 = coeffs.D0(t);
        Eigen::Matrix2cd qp = Q_of_t(sp, t), qm = Q_of_t(sm, t);
        Eigen::Matrix2cd qpd = qp.adjoint(), qmd = qm.adjoint();
        Eigen::Matrix2cd w_a, w_x, w_d;
        w_a << 0.0, a0, std::conj(a0), 0.0;
        w_x << 0.0, b0, std::conj(c0), 0.0;
        w_d << 0.0, d0, std::conj(d0), 0.0;
        Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
        m.topLeftCorner<2, 2>() = qpd * w_a * qp;
        m.topRightCorner<2, 2>() = qpd * w_x * qm;
        m.bottomLeftCorner<2, 2>() = m.topRightCorner<2, 2>().adjoint();
        m.bottomRightCorner<2, 2>() = qmd * w_d * qm;
        return m;
    }

    Eigen::Vector4cd rhs(double t, const Eigen::Vector4cd& c) const {
        return complexd(0, -1) * (generator(t) * c);
    }
};

inline Eigen::Vector4cd block_equations_rhs(int n, const ModelParams& p, double t,
                                            const Eigen::Vector4cd& c, int cutoff = 0) {
    if (cutoff <= 0) cutoff = BlockSystem::default_cutoff(p);
    return BlockSystem::build(n, p, cutoff).rhs(t, c);
}

}  // namespace scqed
