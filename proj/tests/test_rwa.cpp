#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "scqed/ode.hpp"
#include "scqed/rwa.hpp"

using namespace scqed;
using Eigen::Matrix2cd;
using Eigen::Matrix2d;
using Eigen::Matrix4cd;
using Eigen::Vector4cd;

namespace {
ModelParams params(double g1 = 0.2, double g2 = 0.05, double delta = 0.005, double w1 = 1.3,
                   double w2 = 0.9) {
    ModelParams p;
    p.omega = 1.0;
    p.g1 = g1;
    p.g2 = g2;
    p.delta = delta;
    p.atoms = 2;
    p.drive_freqs = {w1, w2};
    p.drive_phases = {0.0, 0.0};
    return p;
}
}  // namespace

TEST_CASE("appendix propagator closed forms") {
    SECTION("alpha = 0: the frame phase cancels and U is the identity") {
        for (double t : {0.0, 0.8, 4.4})
            REQUIRE((appendix_propagator(0.0, 1.7, t) - Matrix2cd::Identity()).cwiseAbs().maxCoeff() <
                    1e-14);
    }
    SECTION("theta = 0: pure Rabi flopping") {
        double a = 0.6, t = 1.1;
        Matrix2cd u = appendix_propagator(a, 0.0, t);
        REQUIRE(std::abs(u(0, 0) - std::cos(a * t)) < 1e-14);
        REQUIRE(std::abs(u(0, 1) - complexd(0, -std::sin(a * t))) < 1e-14);
        REQUIRE(std::abs(u(1, 0) - complexd(0, -std::sin(a * t))) < 1e-14);
        REQUIRE(std::abs(u(1, 1) - std::cos(a * t)) < 1e-14);
    }
    SECTION("U(0) = 1 and the finite-difference equation of motion") {
        const double a = 0.3, th = 1.2, t = 2.0, h = 1e-5;
        REQUIRE((appendix_propagator(a, th, 0.0) - Matrix2cd::Identity()).cwiseAbs().maxCoeff() <
                1e-14);
        Matrix2cd du = (appendix_propagator(a, th, t + h) - appendix_propagator(a, th, t - h)) / (2 * h);
        Matrix2cd hT;
        hT << 0.0, a * std::exp(complexd(0, -th * t)), a * std::exp(complexd(0, th * t)), 0.0;
        REQUIRE((du + complexd(0, 1) * hT * appendix_propagator(a, th, t)).cwiseAbs().maxCoeff() <
                1e-6);
    }
    SECTION("unitarity") {
        Matrix2cd u = appendix_propagator(0.4, -0.9, 3.3);
        REQUIRE((u.adjoint() * u - Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("two-level spectral decomposition") {
    SECTION("closed-form eigenvalues") {
        TwoLevelSpectral s = spectral_decompose(1.0, 0.0);
        REQUIRE(s.mu == Catch::Approx(1.0));
        REQUIRE(s.nu == Catch::Approx(-1.0));
        TwoLevelSpectral z = spectral_decompose(0.0, 2.0);
        REQUIRE(z.mu == Catch::Approx(2.0));
        REQUIRE(z.nu == Catch::Approx(0.0));
    }
    SECTION("eigenvalue identities mu nu = -alpha^2, mu + nu = theta") {
        TwoLevelSpectral s = spectral_decompose(0.7, 0.9);
        REQUIRE(s.mu * s.nu == Catch::Approx(-0.49).margin(1e-14));
        REQUIRE(s.mu + s.nu == Catch::Approx(0.9).margin(1e-14));
    }
    SECTION("reconstruction and orthogonality") {
        TwoLevelSpectral s = spectral_decompose(0.7, 0.9);
        Matrix2d a;
        a << 0, 0.7, 0.7, 0.9;
        Matrix2d rec = s.P * Eigen::Vector2d(s.mu, s.nu).asDiagonal() * s.P.transpose();
        REQUIRE((rec - a).cwiseAbs().maxCoeff() < 1e-13);
        REQUIRE((s.P * s.P.transpose() - Matrix2d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("degenerate conventions") {
        TwoLevelSpectral d0 = spectral_decompose(0.0, 0.0);
        REQUIRE(d0.mu == 0.0);
        REQUIRE(d0.nu == 0.0);
        REQUIRE((d0.P - Matrix2d::Identity()).cwiseAbs().maxCoeff() == 0.0);
        TwoLevelSpectral dp = spectral_decompose(0.0, 1.3);
        REQUIRE(dp.P(0, 1) == 1.0);  // columns e2, e1: mu column is (0,1)
        REQUIRE(dp.P(1, 0) == 1.0);
    }
    SECTION("Q(t) against a generic matrix exponential") {
        TwoLevelSpectral s = spectral_decompose(0.7, 0.9);
        double t = 1.3;
        Matrix2cd a;
        a << 0, 0.7, 0.7, 0.9;
        Matrix2cd ref = (complexd(0, -t) * a).exp();
        REQUIRE((Q_of_t(s, t) - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("U_n / V_n block propagators") {
    ModelParams p = params();
    auto [u0, v0] = Un_Vn(0, p, 0.0);
    REQUIRE((u0 - Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    REQUIRE((v0 - Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);

    SECTION("degenerate drives: E_- = 0 makes V_n the identity for all t") {
        ModelParams q = params(0.2, 0.05, 0.005, 1.3, 1.3);
        auto [uq, vq] = Un_Vn(0, q, 2.7);
        REQUIRE((vq - Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-13);
    }

    SECTION("they solve the unperturbed cat-frame equations") {
        const double h = 1e-5, gamma = p.omega * p.x() * p.x();
        const double ep = E_delta(0, p, +1), em = E_delta(0, p, -1);
        for (double t : {0.6, 3.9}) {
            auto [up1, vp1] = Un_Vn(0, p, t + h);
            auto [um1, vm1] = Un_Vn(0, p, t - h);
            auto [uc, vc] = Un_Vn(0, p, t);
            Matrix2cd hu;
            hu << 0.0, ep * std::exp(complexd(0, -gamma * t)), ep * std::exp(complexd(0, gamma * t)),
                0.0;
            Matrix2cd hv;
            hv << 0.0, em * std::exp(complexd(0, -gamma * t)), em * std::exp(complexd(0, gamma * t)),
                0.0;
            REQUIRE(((up1 - um1) / (2 * h) + complexd(0, 1) * hu * uc).cwiseAbs().maxCoeff() < 1e-6);
            REQUIRE(((vp1 - vm1) / (2 * h) + complexd(0, 1) * hv * vc).cwiseAbs().maxCoeff() < 1e-6);
        }
    }
}

TEST_CASE("resonance solving") {
    SECTION("delta = 0 collapses both spectra: no positive root") {
        ModelParams q = params(0.2, 0.05, 0.0);
        REQUIRE(solve_resonance(0, q, 1, 1e-4, 1.0).empty());
        REQUIRE_THROWS_AS(solve_resonance_first(0, q, 1, 1e-4, 1.0), NoRootError);
    }
    SECTION("g2 -> 0 limit matches the closed-form right side") {
        ModelParams q = params(0.2, 1e-8, 0.005, 1.3, 0.9);
        const double gamma = q.omega * q.x() * q.x();
        const double c = 0.5 * q.delta * displaced_diag_element(0, q.x());
        // E+ -> 2c, E- -> 0: root of -w2 + mu+ - mu- at
        double expect = 0.5 * (std::sqrt(gamma * gamma + 16 * c * c) - gamma);
        auto roots = solve_resonance(0, q, -1, 1e-5, 1e-3);
        REQUIRE(!roots.empty());
        REQUIRE(roots.front().omega2 == Catch::Approx(expect).epsilon(1e-6));
        REQUIRE(std::abs(roots.front().residual) < 1e-10);
    }
    SECTION("self-consistent roots re-substitute below 1e-10") {
        ModelParams q = params(0.2, 1.25e-4, 0.01, 1.0, 0.9);
        for (int alpha : {1, -1}) {
            auto roots = solve_resonance(0, q, alpha, 1e-5, 2e-3);
            REQUIRE(!roots.empty());
            for (const auto& r : roots) {
                REQUIRE(std::abs(r.residual) < 1e-10);
                REQUIRE(std::abs(resonance_residual(0, q, alpha, r.omega2)) < 1e-10);
            }
        }
    }
    SECTION("the companion branches expose the cross resonances") {
        ModelParams q = params();
        // mu(+) - nu(-) ~ gamma: roots at order-one drive frequencies
        auto roots = solve_resonance(0, q, -1, 0.05, 1.0, ResonanceBranch::MuNu);
        REQUIRE(!roots.empty());
        const auto& r = roots.front();
        REQUIRE(r.omega2 == Catch::Approx(0.16).epsilon(0.1));
        REQUIRE(std::abs(resonance_residual(0, q, -1, r.omega2, ResonanceBranch::MuNu)) < 1e-10);
    }
    SECTION("argument validation") {
        REQUIRE_THROWS_AS(solve_resonance(0, params(), 0, 1e-4, 1.0), std::invalid_argument);
        REQUIRE_THROWS_AS(solve_resonance(0, params(), 1, -1.0, 1.0), std::invalid_argument);
    }
}

TEST_CASE("rwa reduction: rate, coupling matrix and projector algebra") {
    ModelParams q = params(0.2, 1.25e-4, 0.01, 1.0, 0.9);
    auto res = solve_resonance_first(0, q, -1, 3e-4, 8e-4);

    RwaGate g = rwa_reduce(0, q, res);
    REQUIRE_FALSE(g.trivial);
    REQUIRE(g.rabi_rate != 0.0);

    SECTION("pinned rate formula") {
        ModelParams qq = q;
        qq.drive_freqs[1] = res.omega2;
        double gamma2 = 2 * qq.g2 / res.omega2;
        double jd = 0.5 * (bessel_j(-1, gamma2) - bessel_j(-1, -gamma2));
        double ep = res.spectral_plus.alpha, em = res.spectral_minus.alpha;
        double mup = res.spectral_plus.mu, mum = res.spectral_minus.mu;
        double expect = 0.5 * qq.delta * displaced_diag_element(0, qq.x()) * jd *
                        (ep * mum + em * mup) /
                        std::sqrt((ep * ep + mup * mup) * (em * em + mum * mum));
        REQUIRE(g.rabi_rate == Catch::Approx(expect).margin(1e-18));
    }

    SECTION("K equals the appendix projector contraction") {
        Matrix2d e11 = Matrix2d::Zero();
        e11(0, 0) = 1.0;
        Matrix2d x;
        x << 0, 1, 1, 0;
        const Matrix2d pp = res.spectral_plus.P, pm = res.spectral_minus.P;
        Matrix2d contraction = pp * e11 * pp.transpose() * x * pm * e11 * pm.transpose();
        double ep = res.spectral_plus.alpha, em = res.spectral_minus.alpha;
        double mup = res.spectral_plus.mu, mum = res.spectral_minus.mu;
        double a11 = (ep * mum + em * mup) /
                     (std::hypot(ep, mup) * std::hypot(em, mum));
        REQUIRE((contraction - a11 * g.K).cwiseAbs().maxCoeff() < 1e-14);
    }

    SECTION("projector identities") {
        Matrix2d kkt = g.K * g.K.transpose(), ktk = g.K.transpose() * g.K;
        REQUIRE((kkt * kkt - kkt).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((ktk * ktk - ktk).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((kkt - kkt.transpose()).cwiseAbs().maxCoeff() < 1e-14);
        REQUIRE(kkt.trace() == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(ktk.trace() == Catch::Approx(1.0).margin(1e-12));
        REQUIRE((g.K * g.K.transpose() * g.K - g.K).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((g.K.transpose() * g.K * g.K.transpose() - g.K.transpose()).cwiseAbs().maxCoeff() <
                1e-12);
    }

    SECTION("even harmonics are flagged trivial with zero rate") {
        // synthetic resonance record with an even harmonic index
        ResonanceSolution even = res;
        even.alpha_harmonic = 2;
        RwaGate ge = rwa_reduce(0, q, even);
        REQUIRE(ge.trivial);
        REQUIRE(ge.rabi_rate == 0.0);
    }
}

TEST_CASE("odd-harmonic antisymmetry of the coupling coefficient") {
    for (int a : {1, 3, 5})
        for (double gam : {0.3, 1.1, 2.6}) {
            double lhs = 0.5 * (bessel_j(-a, gam) - bessel_j(-a, -gam));
            double rhs = -0.5 * (bessel_j(a, gam) - bessel_j(a, -gam));
            REQUIRE(lhs == Catch::Approx(rhs).margin(1e-15));
        }
}

TEST_CASE("closed-form gate vs generic matrix exponential") {
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> ur(-1.0, 1.0), ut(-20.0, 20.0);
    for (int draw = 0; draw < 50; ++draw) {
        // random rank-1 K built the same way the reduction builds it
        Eigen::Vector2d up(ur(rng), ur(rng)), vm(ur(rng), ur(rng));
        up.normalize();
        vm.normalize();
        RwaGate g;
        g.K = up * vm.transpose();
        g.rabi_rate = 2.0 * ur(rng);
        double t = ut(rng);
        Matrix4cd gen = Matrix4cd::Zero();
        gen.topRightCorner<2, 2>() = g.K.cast<complexd>();
        gen.bottomLeftCorner<2, 2>() = g.K.transpose().cast<complexd>();
        Matrix4cd ref = (complexd(0, 0.5 * g.rabi_rate * t) * gen).exp();
        REQUIRE((g.gate(t) - ref).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE((g.gate(t) * g.gate(t).adjoint() - Matrix4cd::Identity()).cwiseAbs().maxCoeff() <
                1e-12);
        REQUIRE((g.gate(t) * g.gate(-t) - Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("gate trivial values and the quarter-period transfer") {
    ModelParams q = params(0.2, 1.25e-4, 0.01, 1.0, 0.9);
    auto res = solve_resonance_first(0, q, -1, 3e-4, 8e-4);
    RwaGate g = rwa_reduce(0, q, res);
    REQUIRE((g.gate(0.0) - Matrix4cd::Identity()).cwiseAbs().maxCoeff() == 0.0);
    // t = pi / R: cos(R t / 2) = 0, the projected block empties along the K channel
    double t = M_PI / g.rabi_rate;
    Matrix4cd u = g.gate(t);
    Matrix2d kkt = g.K * g.K.transpose();
    REQUIRE((u.topLeftCorner<2, 2>().real() - (Matrix2d::Identity() - kkt)).cwiseAbs().maxCoeff() <
            1e-12);
    Eigen::Vector2cd od = u.topRightCorner<2, 2>() * Eigen::Vector2cd(1, 0);
    REQUIRE(od.norm() == Catch::Approx((g.K * Eigen::Vector2d(1, 0)).norm()).margin(1e-12));
}

TEST_CASE("block equations: structure of the exact generator") {
    ModelParams q = params(0.2, 0.08, 0.006, 1.2, 0.7);
    BlockSystem sys = BlockSystem::build(0, q, 40);

    SECTION("delta = 0 gives the zero vector") {
        ModelParams z = params(0.2, 0.08, 0.0, 1.2, 0.7);
        Vector4cd out = block_equations_rhs(0, z, 0.9, Vector4cd(1, 0, 0, 0));
        REQUIRE(out.cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("c = e1 at t = 0 lands in the (c3, c4) slots") {
        Vector4cd out = sys.rhs(0.0, Vector4cd(1, 0, 0, 0));
        REQUIRE(std::abs(out(0)) < 1e-18);
        REQUIRE(std::abs(out(2)) < 1e-18);
        REQUIRE(std::abs(out(1)) > 0.0);  // A0(0) != 0 drives the c3 slot
    }
    SECTION("Hermitian generator at arbitrary times") {
        for (double t : {0.21, 1.9, 7.7}) {
            Matrix4cd m = sys.generator(t);
            REQUIRE((m - m.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("time-averaged cross coupling at resonance: channel structure") {
    // at a solved resonance the time average of the od<->ev coupling contains
    // the published mu-channel with weight -R, and the exactly co-stationary
    // nu-channel with the companion weight a22; both are measured here
    ModelParams q = params(0.2, 1.25e-4, 0.01, 1.0, 0.9);
    auto res = solve_resonance_first(0, q, -1, 3e-4, 8e-4);
    ModelParams qr = q;
    qr.drive_freqs[1] = res.omega2;
    RwaGate g = rwa_reduce(0, q, res);
    BlockSystem sys = BlockSystem::build(0, qr, 40);

    const double period = 2.0 * M_PI / res.omega2;
    const int periods = 40, per = 1024;
    const long nsamp = long(periods) * per;
    Eigen::Matrix2cd acc = Eigen::Matrix2cd::Zero();
    for (long k = 0; k < nsamp; ++k)
        acc += sys.generator(k * (periods * period / nsamp)).topRightCorner<2, 2>();
    acc /= double(nsamp);

    const auto& sp = res.spectral_plus;
    const auto& sm = res.spectral_minus;
    Eigen::Vector2d upl = sp.P.col(0), vpl = sp.P.col(1);
    Eigen::Vector2d umi = sm.P.col(0), vmi = sm.P.col(1);

    complexd mu_channel = upl.cast<complexd>().dot(acc * umi.cast<complexd>());
    REQUIRE(std::abs(mu_channel - complexd(-g.rabi_rate, 0)) < 0.02 * std::abs(g.rabi_rate));

    // companion channel weight: +c Jtilde a22 with a22 from the appendix matrix
    double gamma2 = 2 * qr.g2 / res.omega2;
    double jd = 0.5 * (bessel_j(res.alpha_harmonic, gamma2) - bessel_j(res.alpha_harmonic, -gamma2));
    double c = 0.5 * qr.delta * displaced_diag_element(0, qr.x());
    double a22 = (sp.alpha * sm.nu + sm.alpha * sp.nu) /
                 (std::hypot(sp.alpha, sp.nu) * std::hypot(sm.alpha, sm.nu));
    complexd nu_channel = vpl.cast<complexd>().dot(acc * vmi.cast<complexd>());
    REQUIRE(std::abs(nu_channel - complexd(c * jd * a22, 0)) < 0.02 * std::abs(c * jd * a22));
}

TEST_CASE("exact block dynamics at resonance follow the completed two-channel reduction") {
    // headline check of the exact machinery: integrate the full pre-RWA block
    // equations over one population cycle and compare against the static
    // generator that keeps both stationary channels
    ModelParams q = params(0.2, 8e-5, 0.01, 1.0, 0.9);
    auto res = solve_resonance_first(0, q, -1, 3e-4, 8e-4);
    ModelParams qr = q;
    qr.drive_freqs[1] = res.omega2;
    RwaGate g = rwa_reduce(0, q, res);
    BlockSystem sys = BlockSystem::build(0, qr, 40);

    const auto& sp = res.spectral_plus;
    const auto& sm = res.spectral_minus;
    double gamma2 = 2 * qr.g2 / res.omega2;
    double jd = 0.5 * (bessel_j(res.alpha_harmonic, gamma2) - bessel_j(res.alpha_harmonic, -gamma2));
    double c = 0.5 * qr.delta * displaced_diag_element(0, qr.x());
    double a11 = (sp.alpha * sm.mu + sm.alpha * sp.mu) /
                 (std::hypot(sp.alpha, sp.mu) * std::hypot(sm.alpha, sm.mu));
    double a22 = (sp.alpha * sm.nu + sm.alpha * sp.nu) /
                 (std::hypot(sp.alpha, sp.nu) * std::hypot(sm.alpha, sm.nu));
    Eigen::Matrix2d w = -c * jd *
                        (a11 * sp.P.col(0) * sm.P.col(0).transpose() -
                         a22 * sp.P.col(1) * sm.P.col(1).transpose());
    Matrix4cd kept = Matrix4cd::Zero();
    kept.topRightCorner<2, 2>() = w.cast<complexd>();
    kept.bottomLeftCorner<2, 2>() = w.transpose().cast<complexd>();

    const double T = M_PI / std::abs(g.rabi_rate);  // one full population cycle
    std::vector<double> ts, pod_exact, pod_kept;
    OdeOptions opt;
    opt.rtol = 1e-10;
    opt.atol = 1e-12;
    Eigen::VectorXcd c0 = Eigen::VectorXcd::Zero(4);
    c0(0) = 1.0;
    double next = 0.0;
    integrate_ode(
        [&](double t, const Eigen::VectorXcd& y) -> Eigen::VectorXcd {
            return complexd(0, -1) * (sys.generator(t) * Vector4cd(y)).eval();
        },
        c0, 0.0, T, opt, [&](double t, Eigen::VectorXcd& y) {
            if (t < next && t < T) return;
            next = t + T / 400.0;
            ts.push_back(t);
            pod_exact.push_back(std::norm(y(0)) + std::norm(y(1)));
            Vector4cd pred = (complexd(0, -t) * kept).exp() * Vector4cd(1, 0, 0, 0);
            pod_kept.push_back(std::norm(pred(0)) + std::norm(pred(1)));
        });

    double worst = 0, pmin = 1;
    for (size_t i = 0; i < ts.size(); ++i) {
        worst = std::max(worst, std::abs(pod_exact[i] - pod_kept[i]));
        pmin = std::min(pmin, pod_exact[i]);
    }
    // agreement is limited by the second-order shifts of the dropped fast
    // terms, which scale with Gamma_2^2; at Gamma_2 ~ 0.3 they sit below 8%
    REQUIRE(worst < 0.08);
    REQUIRE(pmin < 0.01);  // the transfer through the resonance is essentially complete
}
