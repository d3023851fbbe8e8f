#pragma once

// Command implementations behind the CLI: verify / resonance / gate /
// simulate / sweep, with deterministic CSV and versioned JSON output.
//
// Exit codes: 0 success, 1 validation error, 2 numerical failure,
// 3 no result (e.g. no resonance root in the bracket).

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "scqed/config.hpp"
#include "scqed/propagator.hpp"

namespace scqed::cli {

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CheckResult {
    std::string name;
    double residual;
    double tolerance;
    bool pass() const { return residual <= tolerance; }
};

// ---- verify -------------------------------------------------------------------

inline std::vector<CheckResult> run_verify_checks(const RunConfig& cfg) {
    std::vector<CheckResult> out;
    auto add = [&](const std::string& name, double residual, double tol) {
        out.push_back({name, residual, tol});
    };
    const ModelParams& p = cfg.model;
    const FockTruncation& tr = cfg.truncation;
    const double x = p.x();

    {
        FockTruncation t16{16, 1};
        auto [a, ad, nn] = ladder_operators(t16);
        double r1 = ((a * ad - ad * a) - Eigen::MatrixXd::Identity(16, 16))
                        .topLeftCorner(15, 15).cwiseAbs().maxCoeff();
        double r2 = ((ad * a) - nn).topLeftCorner(15, 15).cwiseAbs().maxCoeff();
        add("ladder_algebra", std::max(r1, r2), 1e-12);
    }
    {
        FockTruncation t64{64, 16};
        double th = std::min(std::max(x, 0.3), 2.0);
        Eigen::MatrixXd d = displacement(t64, th);
        add("displacement_unitarity",
            (d.transpose() * d - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff(), 1e-12);
        add("displacement_inverse",
            (d * displacement(t64, -th) - Eigen::MatrixXd::Identity(64, 64)).cwiseAbs().maxCoeff(),
            1e-12);
        double worst = 0, sym = 0;
        for (double xv : {0.3, 0.8, 1.5, 2.0}) {
            Eigen::MatrixXd dx = displacement(t64, xv);
            for (int n = 0; n <= 10; ++n) {
                worst = std::max(worst, std::abs(dx(n, n) - displaced_diag_element(n, xv)));
                sym = std::max(sym,
                               std::abs(displaced_diag_element(n, xv) - displaced_diag_element(n, -xv)));
            }
        }
        add("displaced_element_oracle", worst, 1e-10);
        add("displaced_element_symmetry", sym, 1e-12);
    }
    {
        double worst = 0;
        for (double z : {0.1, 0.7, 2.3, 5.0})
            for (int al = -10; al <= 10; ++al) {
                double lhs = bessel_j(al - 1, z) + bessel_j(al + 1, z);
                worst = std::max(worst, std::abs(lhs - (2.0 * al / z) * bessel_j(al, z)));
            }
        add("bessel_recurrence", worst, 1e-10);
        double par = 0;
        for (int al = 0; al <= 12; ++al)
            for (double z : {0.4, 1.9, 6.2}) {
                double s = (al % 2 == 0) ? 1.0 : -1.0;
                par = std::max(par, std::abs(bessel_j(al, -z) - s * bessel_j(al, z)));
                par = std::max(par, std::abs(bessel_j(-al, z) - s * bessel_j(al, z)));
            }
        add("bessel_parity", par, 1e-15);
        double ja = 0;
        for (double t : {0.0, 0.7, 3.1}) {
            double th = 0.75 * std::sin(1.3 * t) / 1.3;  // g2 = 0.375, omega = 1.3
            complexd exact = std::exp(complexd(0, 2.0 * th));
            ja = std::max(ja, std::abs(jacobi_anger(1, 0.375, 1.3, t, 40) - exact));
        }
        add("jacobi_anger_convergence", ja, 1e-10);
    }
    {
        int m = std::min(p.atoms, 4);
        Eigen::MatrixXd w = walsh_hadamard(m);
        double worst = 0;
        for (int j = 1; j <= m; ++j)
            worst = std::max(worst, (w * pauli_embedded(m, 1, j) * w - pauli_embedded(m, 3, j))
                                        .cwiseAbs().maxCoeff());
        add("walsh_conjugation", worst, 1e-14);
        Eigen::MatrixXd gram(1 << m, 1 << m);
        for (int i = 0; i < (1 << m); ++i)
            for (int k = 0; k < (1 << m); ++k)
                gram(i, k) = lambda_vector(SpinLabel::from_index(m, i))
                                 .dot(lambda_vector(SpinLabel::from_index(m, k)));
        add("lambda_orthonormality",
            (gram - Eigen::MatrixXd::Identity(1 << m, 1 << m)).cwiseAbs().maxCoeff(), 1e-14);
    }
    add("truncation_soundness", x * x * tr.trusted() / (tr.dim / 4.0), 1.0);
    {
        FockTruncation t64{64, 16};
        AlgebraRep nrep = AlgebraRep::heisenberg(t64);
        double worst = 0;
        for (int L : {-2, -1, 1, 2})
            worst = std::max(worst, key_formula_residual(nrep, p.omega, p.g1, L, t64.buffer));
        add("key_formula_N", worst, 1e-8);
        add("key_formula_J", key_formula_residual(AlgebraRep::su2(1.5), 1.0, 0.2, 1), 1e-10);
        add("key_formula_K",
            key_formula_residual(AlgebraRep::su11_discrete(0.5, 64), 1.0, 0.25, 1, 40), 1e-7);
    }
    if (p.algebra == Algebra::N) {
        const double t_probe = 0.37;
        Eigen::MatrixXd h0 = build_H0(p, tr, t_probe);
        double hnorm = h0.cwiseAbs().maxCoeff();
        const int M = p.dim_spin(), keep = tr.trusted();
        double worst = 0;
        for (int li = 0; li < M; ++li) {
            SpinLabel l = SpinLabel::from_index(p.atoms, li);
            for (int n : {0, 1, 2}) {
                if (n >= keep) break;
                DressedState d = dressed_state(l, n, p, tr);
                Eigen::VectorXd r = h0 * d.vector - dressed_energy(l, n, p, t_probe) * d.vector;
                for (int b = 0; b < M; ++b)
                    worst = std::max(worst, r.segment(b * tr.dim, keep).cwiseAbs().maxCoeff());
            }
        }
        add("dressed_eigenresidual", worst / std::max(hnorm, 1.0), 1e-8);

        Dressing dr = Dressing::build(p, tr);
        Eigen::MatrixXcd u = U0(dr, 10.0 / p.omega);
        Eigen::MatrixXcd uu = u.adjoint() * u - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
        double uworst = 0;
        for (int bi = 0; bi < M; ++bi)
            for (int bj = 0; bj < M; ++bj)
                uworst = std::max(uworst,
                                  uu.block(bi * tr.dim, bj * tr.dim, keep, keep).cwiseAbs().maxCoeff());
        add("u0_unitarity", uworst, 1e-10);

        const double h = 1e-5, t0 = 0.7;
        Eigen::MatrixXcd du = (U0(dr, t0 + h) - U0(dr, t0 - h)) / (2 * h);
        Eigen::MatrixXcd res = du + complexd(0, 1) * build_H0(p, tr, t0).cast<complexd>() * U0(dr, t0);
        double rworst = 0;
        for (int bi = 0; bi < M; ++bi)
            for (int bj = 0; bj < M; ++bj)
                rworst = std::max(rworst,
                                  res.block(bi * tr.dim, bj * tr.dim, keep, keep).cwiseAbs().maxCoeff());
        add("u0_ode_residual", rworst, 1e-6);

        Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(M * tr.dim, M * tr.dim);
        for (int li = 0; li < M; ++li)
            for (int n = 0; n < keep; ++n) {
                Eigen::VectorXd v = dressed_state(SpinLabel::from_index(p.atoms, li), n, p, tr).vector;
                proj += v * v.transpose();
            }
        double cworst = 0, hworst = 0;
        Eigen::MatrixXd hrec = Eigen::MatrixXd::Zero(M * tr.dim, M * tr.dim);
        for (int li = 0; li < M; ++li) {
            SpinLabel l = SpinLabel::from_index(p.atoms, li);
            for (int n = 0; n < keep; ++n) {
                Eigen::VectorXd v = dressed_state(l, n, p, tr).vector;
                hrec += dressed_energy(l, n, p, t_probe) * (v * v.transpose());
            }
        }
        const int inner = std::max(1, keep - tr.buffer);  // doubly buffered interior
        for (int bi = 0; bi < M; ++bi)
            for (int bj = 0; bj < M; ++bj) {
                Eigen::MatrixXd pe = proj.block(bi * tr.dim, bj * tr.dim, inner, inner);
                if (bi == bj) pe -= Eigen::MatrixXd::Identity(inner, inner);
                cworst = std::max(cworst, pe.cwiseAbs().maxCoeff());
                hworst = std::max(hworst, (hrec - h0).block(bi * tr.dim, bj * tr.dim, inner, inner)
                                              .cwiseAbs().maxCoeff());
            }
        add("completeness", cworst, 1e-8);
        add("h0_reconstruction", hworst, 1e-7);
    }
    if (p.atoms == 2 && p.algebra == Algebra::N) {
        FockTruncation small{std::min(tr.dim, 32), std::min(tr.dim, 32) / 4};
        Eigen::MatrixXcd hf = HF_matrix(p, small, 0.7);
        Eigen::MatrixXcd u = U0(p, small, 0.7);
        Eigen::MatrixXd s3 = detail::kron(pauli_embedded(2, 3, 1) + pauli_embedded(2, 3, 2),
                                          Eigen::MatrixXd::Identity(small.dim, small.dim));
        Eigen::MatrixXd b = dressed_basis(p, small);
        Eigen::MatrixXcd oracle =
            b.transpose().cast<complexd>() * (u.adjoint() * s3.cast<complexd>() * u) * b.cast<complexd>();
        const int keep = small.trusted();
        double worst = 0;
        for (int bi = 0; bi < 4; ++bi)
            for (int bj = 0; bj < 4; ++bj)
                worst = std::max(worst, (hf - oracle)
                                            .block(bi * small.dim, bj * small.dim, keep, keep)
                                            .cwiseAbs().maxCoeff());
        add("hf_conjugation_oracle", worst, 1e-8);
    }
    {
        // projector algebra and the closed-form gate on synthetic spectral data
        double gamma = std::max(p.omega * x * x, 0.1);
        TwoLevelSpectral sp = spectral_decompose(0.21 * gamma, gamma);
        TwoLevelSpectral sm = spectral_decompose(0.07 * gamma, gamma);
        RwaGate g;
        g.rabi_rate = 0.8;
        double np = std::hypot(sp.alpha, sp.mu), nm = std::hypot(sm.alpha, sm.mu);
        g.K = Eigen::Vector2d(sp.alpha, sp.mu) * Eigen::RowVector2d(sm.alpha, sm.mu) / (np * nm);
        Eigen::Matrix2d kkt = g.K * g.K.transpose(), ktk = g.K.transpose() * g.K;
        double pr = std::max((kkt * kkt - kkt).cwiseAbs().maxCoeff(),
                             (ktk * ktk - ktk).cwiseAbs().maxCoeff());
        pr = std::max(pr, (g.K * g.K.transpose() * g.K - g.K).cwiseAbs().maxCoeff());
        pr = std::max(pr, std::abs(kkt.trace() - 1.0));
        add("projector_algebra", pr, 1e-12);
        double gw = 0;
        for (double t : {0.0, 0.9, 4.4}) {
            Eigen::Matrix4cd gen = Eigen::Matrix4cd::Zero();
            gen.topRightCorner<2, 2>() = g.K.cast<complexd>();
            gen.bottomLeftCorner<2, 2>() = g.K.transpose().cast<complexd>();
            Eigen::Matrix4cd ex = (complexd(0, 0.5 * g.rabi_rate * t) * gen).exp();
            gw = std::max(gw, (g.gate(t) - ex).cwiseAbs().maxCoeff());
            gw = std::max(gw, (g.gate(t) * g.gate(t).adjoint() - Eigen::Matrix4cd::Identity())
                                  .cwiseAbs().maxCoeff());
        }
        add("gate_vs_exponential", gw, 1e-12);
    }
    {
        Eigen::Matrix2cd u = appendix_propagator(0.6, 0.0, 1.1);
        Eigen::Matrix2cd ref;
        ref << std::cos(0.6 * 1.1), complexd(0, -std::sin(0.6 * 1.1)),
            complexd(0, -std::sin(0.6 * 1.1)), std::cos(0.6 * 1.1);
        double ap = (u - ref).cwiseAbs().maxCoeff();
        const double h = 1e-6, al = 0.3, th = 1.2, t0 = 2.0;
        Eigen::Matrix2cd du = (appendix_propagator(al, th, t0 + h) - appendix_propagator(al, th, t0 - h)) / (2 * h);
        Eigen::Matrix2cd ht;
        ht << 0.0, al * std::exp(complexd(0, -th * t0)), al * std::exp(complexd(0, th * t0)), 0.0;
        double ode = (du + complexd(0, 1) * ht * appendix_propagator(al, th, t0)).cwiseAbs().maxCoeff();
        add("appendix_solver_closed_form", ap, 1e-12);
        add("appendix_solver_ode", ode, 1e-6);
    }
    return out;
}

// ---- command outputs ------------------------------------------------------------

struct CommandOutput {
    int exit_code = 0;
    std::string payload;       // CSV or JSON document
    std::string error_record;  // single-line JSON, empty on success
};

inline std::string make_error_record(int code, const std::string& kind, const std::string& msg) {
    nlohmann::json j;
    j["error"] = {{"code", code}, {"kind", kind}, {"message", msg}};
    return j.dump();
}

inline CommandOutput cmd_verify(const RunConfig& cfg) {
    auto checks = run_verify_checks(cfg);
    bool all = true;
    for (const auto& c : checks) all = all && c.pass();
    CommandOutput out;
    if (cfg.output_format == OutputFormat::CSV) {
        std::string s = "check,residual,tolerance,status\n";
        for (const auto& c : checks)
            s += c.name + "," + fmt(c.residual) + "," + fmt(c.tolerance) + "," +
                 (c.pass() ? "pass" : "fail") + "\n";
        out.payload = s;
    } else {
        nlohmann::json j;
        j["schema"] = "scqed.verify.v1";
        j["pass"] = all;
        j["checks"] = nlohmann::json::array();
        for (const auto& c : checks)
            j["checks"].push_back({{"name", c.name},
                                   {"residual", c.residual},
                                   {"tolerance", c.tolerance},
                                   {"pass", c.pass()}});
        out.payload = j.dump(2) + "\n";
    }
    if (!all) {
        out.exit_code = 2;
        std::string failed;
        for (const auto& c : checks)
            if (!c.pass()) failed += (failed.empty() ? "" : ", ") + c.name;
        out.error_record = make_error_record(2, "verification_failed", failed);
    }
    return out;
}

inline CommandOutput cmd_resonance(const RunConfig& cfg) {
    CommandOutput out;
    std::vector<ResonanceSolution> all;
    for (int alpha : cfg.resonance.alphas) {
        auto roots = solve_resonance(cfg.resonance.n, cfg.model, alpha, cfg.resonance.bracket_lo,
                                     cfg.resonance.bracket_hi);
        all.insert(all.end(), roots.begin(), roots.end());
    }
    if (cfg.output_format == OutputFormat::CSV) {
        std::string s =
            "alpha,n,omega2,residual,E_plus,E_minus,mu_plus,mu_minus,nu_plus,nu_minus\n";
        for (const auto& r : all)
            s += std::to_string(r.alpha_harmonic) + "," + std::to_string(r.n) + "," +
                 fmt(r.omega2) + "," + fmt(r.residual) + "," + fmt(r.spectral_plus.alpha) + "," +
                 fmt(r.spectral_minus.alpha) + "," + fmt(r.spectral_plus.mu) + "," +
                 fmt(r.spectral_minus.mu) + "," + fmt(r.spectral_plus.nu) + "," +
                 fmt(r.spectral_minus.nu) + "\n";
        out.payload = s;
    } else {
        nlohmann::json j;
        j["schema"] = "scqed.resonance.v1";
        j["roots"] = nlohmann::json::array();
        for (const auto& r : all)
            j["roots"].push_back({{"alpha", r.alpha_harmonic},
                                  {"n", r.n},
                                  {"omega2", r.omega2},
                                  {"residual", r.residual},
                                  {"E_plus", r.spectral_plus.alpha},
                                  {"E_minus", r.spectral_minus.alpha},
                                  {"mu_plus", r.spectral_plus.mu},
                                  {"mu_minus", r.spectral_minus.mu},
                                  {"nu_plus", r.spectral_plus.nu},
                                  {"nu_minus", r.spectral_minus.nu}});
        out.payload = j.dump(2) + "\n";
    }
    if (all.empty()) {
        out.exit_code = 3;
        out.error_record = make_error_record(
            3, "no_root",
            "no resonance root in bracket [" + fmt(cfg.resonance.bracket_lo) + ", " +
                fmt(cfg.resonance.bracket_hi) + "] for the requested harmonics");
    }
    return out;
}

inline CommandOutput cmd_gate(const RunConfig& cfg) {
    CommandOutput out;
    ResonanceSolution res = solve_resonance_first(cfg.gate.n, cfg.model, cfg.gate.alpha,
                                                  cfg.gate.bracket_lo, cfg.gate.bracket_hi);
    RwaGate gate = rwa_reduce(cfg.gate.n, cfg.model, res);
    ComparisonReport rep;
    bool compared = false;
    if (cfg.gate.compare) {
        CompareOptions copt;
        copt.periods = cfg.gate.periods;
        copt.tol = cfg.gate.compare_tol;
        rep = compare_rwa(cfg.model, cfg.truncation, res, cfg.gate.n, copt);
        compared = true;
    }
    if (cfg.output_format == OutputFormat::CSV) {
        std::string s;
        s += "# omega2 = " + fmt(res.omega2) + "\n";
        s += "# residual = " + fmt(res.residual) + "\n";
        s += "# rabi_rate = " + fmt(gate.rabi_rate) + "\n";
        s += "# even_harmonic = " + std::string(gate.trivial ? "true" : "false") + "\n";
        s += "# K = " + fmt(gate.K(0, 0)) + "," + fmt(gate.K(0, 1)) + "," + fmt(gate.K(1, 0)) +
             "," + fmt(gate.K(1, 1)) + "\n";
        if (compared) {
            s += "# amplitude_error = " + fmt(rep.amplitude_error) + "\n";
            s += "# phase_error = " + fmt(rep.phase_error) + "\n";
            s += "# dropped_HF2_norm = " + fmt(rep.dropped_HF2_norm) + "\n";
        }
        s += "t";
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c)
                s += ",re_u" + std::to_string(r + 1) + std::to_string(c + 1) + ",im_u" +
                     std::to_string(r + 1) + std::to_string(c + 1);
        s += "\n";
        for (double t : cfg.gate.times) {
            Eigen::Matrix4cd u = gate.gate(t);
            s += fmt(t);
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c)
                    s += "," + fmt(u(r, c).real()) + "," + fmt(u(r, c).imag());
            s += "\n";
        }
        out.payload = s;
    } else {
        nlohmann::json j;
        j["schema"] = "scqed.gate.v1";
        j["omega2"] = res.omega2;
        j["residual"] = res.residual;
        j["rabi_rate"] = gate.rabi_rate;
        j["even_harmonic"] = gate.trivial;
        j["K"] = {gate.K(0, 0), gate.K(0, 1), gate.K(1, 0), gate.K(1, 1)};
        j["unitaries"] = nlohmann::json::array();
        for (double t : cfg.gate.times) {
            Eigen::Matrix4cd u = gate.gate(t);
            nlohmann::json m;
            m["t"] = t;
            m["re"] = nlohmann::json::array();
            m["im"] = nlohmann::json::array();
            for (int r = 0; r < 4; ++r)
                for (int c = 0; c < 4; ++c) {
                    m["re"].push_back(u(r, c).real());
                    m["im"].push_back(u(r, c).imag());
                }
            j["unitaries"].push_back(m);
        }
        if (compared) {
            j["comparison"] = {{"amplitude_error", rep.amplitude_error},
                               {"phase_error", rep.phase_error},
                               {"dropped_HF2_norm", rep.dropped_HF2_norm},
                               {"fitted_frequency", rep.fitted_frequency},
                               {"fitted_amplitude", rep.fitted_amplitude},
                               {"predicted_amplitude", rep.predicted_amplitude}};
        }
        out.payload = j.dump(2) + "\n";
    }
    return out;
}

/// "dressed:+1,-1;n=0" | "cat:1;n=0" | "basis:17"
inline Eigen::VectorXcd parse_state_spec(const std::string& spec, const ModelParams& p,
                                         const FockTruncation& tr) {
    auto bad = [&](const std::string& msg) {
        throw ConfigError({{"simulate.initial", 0, msg + ": '" + spec + "'"}});
    };
    size_t colon = spec.find(':');
    if (colon == std::string::npos) bad("expected kind:args");
    std::string kind = spec.substr(0, colon);
    std::string rest = spec.substr(colon + 1);
    int n = 0;
    size_t semi = rest.find(';');
    std::string args = rest.substr(0, semi == std::string::npos ? rest.size() : semi);
    if (semi != std::string::npos) {
        std::string ntag = rest.substr(semi + 1);
        if (ntag.rfind("n=", 0) != 0) bad("expected ;n=<index>");
        n = std::atoi(ntag.c_str() + 2);
    }
    const int N = p.dim_spin() * tr.dim;
    if (kind == "basis") {
        int idx = std::atoi(args.c_str());
        if (idx < 0 || idx >= N) bad("basis index out of range");
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(N);
        v(idx) = 1.0;
        return v;
    }
    if (kind == "dressed") {
        std::vector<int> ls;
        std::istringstream in(args);
        std::string item;
        while (std::getline(in, item, ',')) ls.push_back(std::atoi(detail::trim(item).c_str()));
        if (int(ls.size()) != p.atoms) bad("need one lambda per atom");
        return dressed_state(SpinLabel(ls), n, p, tr).vector.cast<complexd>();
    }
    if (kind == "cat") {
        int k = std::atoi(args.c_str());
        if (k < 1 || k > 4) bad("cat index must be 1..4");
        return cat_basis(n, p, tr)[k - 1].vector.cast<complexd>();
    }
    bad("unknown state kind");
    return {};
}

inline CommandOutput cmd_simulate(const RunConfig& cfg) {
    CommandOutput out;
    Eigen::VectorXcd psi0 = parse_state_spec(cfg.simulate.initial, cfg.model, cfg.truncation);
    std::vector<std::string> track = cfg.simulate.track;
    if (track.empty()) track.push_back(cfg.simulate.initial);
    std::vector<Eigen::VectorXcd> basis;
    for (const auto& s : track) basis.push_back(parse_state_spec(s, cfg.model, cfg.truncation));

    IntegrateOptions opt;
    opt.tol = cfg.simulate.tol;
    opt.sample_interval = (cfg.simulate.t1 - cfg.simulate.t0) / cfg.simulate.samples;
    Trajectory traj = integrate(cfg.model, cfg.truncation, psi0, cfg.simulate.t0, cfg.simulate.t1, opt);
    auto pops = populations(traj, basis);

    if (cfg.output_format == OutputFormat::CSV) {
        std::string s = "# norm_drift = " + fmt(traj.norm_drift) + "\n";
        s += "# renormalizations = " + std::to_string(traj.renormalizations) + "\n";
        s += "t";
        for (size_t i = 0; i < track.size(); ++i) s += ",pop_" + std::to_string(i);
        s += "\n";
        for (size_t k = 0; k < traj.times.size(); ++k) {
            s += fmt(traj.times[k]);
            for (size_t i = 0; i < pops.size(); ++i) s += "," + fmt(pops[i][k]);
            s += "\n";
        }
        out.payload = s;
    } else {
        nlohmann::json j;
        j["schema"] = "scqed.simulate.v1";
        j["norm_drift"] = traj.norm_drift;
        j["renormalizations"] = traj.renormalizations;
        j["track"] = track;
        j["times"] = traj.times;
        j["populations"] = nlohmann::json::array();
        for (const auto& series : pops) j["populations"].push_back(series);
        out.payload = j.dump(2) + "\n";
    }
    return out;
}

inline bool set_model_parameter(ModelParams& p, const std::string& path, double v) {
    if (path == "model.omega") p.omega = v;
    else if (path == "model.g1") p.g1 = v;
    else if (path == "model.g2") p.g2 = v;
    else if (path == "model.delta") p.delta = v;
    else if (path == "model.omega1") p.drive_freqs[0] = v;
    else if (path == "model.omega2" && p.atoms >= 2) p.drive_freqs[1] = v;
    else return false;
    return true;
}

inline CommandOutput cmd_sweep(const RunConfig& cfg) {
    CommandOutput out;
    if (cfg.sweep.parameter.empty())
        throw ConfigError({{"sweep.parameter", 0, "missing required key"}});
    {
        ModelParams probe = cfg.model;
        if (!set_model_parameter(probe, cfg.sweep.parameter, cfg.sweep.from))
            throw ConfigError({{"sweep.parameter", 0, "unknown sweep axis '" + cfg.sweep.parameter + "'"}});
    }
    const int steps = cfg.sweep.steps;
    struct Row {
        double value = 0;
        int roots = 0;
        double omega2 = std::nan("");
        double rabi = std::nan("");
        double residual = std::nan("");
        double ep = std::nan(""), em = std::nan("");
    };
    std::vector<Row> rows(steps);

    int workers = int(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SCQED_WORKERS")) workers = std::max(1, std::atoi(env));
    workers = std::max(1, std::min(workers, steps));

    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= steps) return;
            double v = cfg.sweep.from + (cfg.sweep.to - cfg.sweep.from) * i / double(steps - 1);
            Row row;
            row.value = v;
            ModelParams p = cfg.model;
            if (set_model_parameter(p, cfg.sweep.parameter, v)) {
                try {
                    auto roots = solve_resonance(cfg.sweep.n, p, cfg.sweep.alpha,
                                                 cfg.sweep.bracket_lo, cfg.sweep.bracket_hi);
                    row.roots = int(roots.size());
                    if (!roots.empty()) {
                        const auto& r = roots.front();
                        row.omega2 = r.omega2;
                        row.residual = r.residual;
                        row.ep = r.spectral_plus.alpha;
                        row.em = r.spectral_minus.alpha;
                        row.rabi = rwa_reduce(cfg.sweep.n, p, r).rabi_rate;
                    }
                } catch (const std::exception&) {
                    row.roots = 0;
                }
            }
            rows[i] = row;
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();

    if (cfg.output_format == OutputFormat::CSV) {
        std::string s = "value,roots,omega2,rabi_rate,residual,E_plus,E_minus\n";
        for (const auto& r : rows)
            s += fmt(r.value) + "," + std::to_string(r.roots) + "," + fmt(r.omega2) + "," +
                 fmt(r.rabi) + "," + fmt(r.residual) + "," + fmt(r.ep) + "," + fmt(r.em) + "\n";
        out.payload = s;
    } else {
        nlohmann::json j;
        j["schema"] = "scqed.sweep.v1";
        j["parameter"] = cfg.sweep.parameter;
        j["points"] = nlohmann::json::array();
        auto num = [](double v) {
            return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
        };
        for (const auto& r : rows)
            j["points"].push_back({{"value", r.value},
                                   {"roots", r.roots},
                                   {"omega2", num(r.omega2)},
                                   {"rabi_rate", num(r.rabi)},
                                   {"residual", num(r.residual)},
                                   {"E_plus", num(r.ep)},
                                   {"E_minus", num(r.em)}});
        out.payload = j.dump(2) + "\n";
    }
    return out;
}

/// Dispatch + exception-to-exit-code mapping.  The payload is written to
/// cfg.output_path (or returned for stdout); the error record is a single
/// JSON line for stderr.
inline CommandOutput run_command(const std::string& command, const RunConfig& cfg) {
    try {
        if (command == "verify") return cmd_verify(cfg);
        if (command == "resonance") return cmd_resonance(cfg);
        if (command == "gate") return cmd_gate(cfg);
        if (command == "simulate") return cmd_simulate(cfg);
        if (command == "sweep") return cmd_sweep(cfg);
        CommandOutput out;
        out.exit_code = 1;
        out.error_record = make_error_record(1, "usage", "unknown command '" + command + "'");
        return out;
    } catch (const ConfigError& e) {
        CommandOutput out;
        out.exit_code = 1;
        out.error_record = make_error_record(1, "validation", e.what());
        return out;
    } catch (const NoRootError& e) {
        CommandOutput out;
        out.exit_code = 3;
        out.error_record = make_error_record(3, "no_root", e.what());
        return out;
    } catch (const NumericalError& e) {
        CommandOutput out;
        out.exit_code = 2;
        out.error_record = make_error_record(2, "numerical", e.what());
        return out;
    } catch (const std::invalid_argument& e) {
        CommandOutput out;
        out.exit_code = 1;
        out.error_record = make_error_record(1, "validation", e.what());
        return out;
    } catch (const std::exception& e) {
        CommandOutput out;
        out.exit_code = 2;
        out.error_record = make_error_record(2, "numerical", e.what());
        return out;
    }
}

}  // namespace scqed::cli
