#pragma once

// Flat key-value run configuration with dotted section paths:
//
//   model.omega = 1.0
//   model.drive_freqs = 1.3, 0.9
//   truncation.dim = 48
//   resonance.alphas = 1, -1
//
// '#' starts a comment; keys are validated with their source line so errors
// point at the offending entry.  Command-line overrides are extra (key,
// value) pairs that win over the file.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scqed/errors.hpp"
#include "scqed/model.hpp"

namespace scqed {

enum class OutputFormat { CSV, JSON };

struct ResonanceConfig {
    int n = 0;
    std::vector<int> alphas = {1};
    double bracket_lo = 1e-6;
    double bracket_hi = 2.0;
};

struct GateConfig {
    int n = 0;
    int alpha = 1;
    double bracket_lo = 1e-6;
    double bracket_hi = 2.0;
    std::vector<double> times = {0.0};
    int periods = 1;
    bool compare = false;
    double compare_tol = 1e-9;
};

struct SimulateConfig {
    std::string initial = "dressed:+1,-1;n=0";
    std::vector<std::string> track;  // defaults to the initial state
    double t0 = 0.0;
    double t1 = 10.0;
    double tol = 1e-10;
    int samples = 200;
};

struct SweepConfig {
    std::string parameter;  // e.g. model.g2
    double from = 0.0;
    double to = 1.0;
    int steps = 2;
    int n = 0;
    int alpha = 1;
    double bracket_lo = 1e-6;
    double bracket_hi = 2.0;
};

struct RunConfig {
    ModelParams model;
    FockTruncation truncation{48, 12};
    ResonanceConfig resonance;
    GateConfig gate;
    SimulateConfig simulate;
    SweepConfig sweep;
    std::string output_path;  // empty: stdout
    OutputFormat output_format = OutputFormat::CSV;
};

namespace detail {

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    size_t e = s.find_last_not_of(" \t\r\n");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

struct ConfigReader {
    std::map<std::string, RawEntry> entries;
    std::vector<ConfigIssue> issues;

    void load(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = line;
            size_t hash = s.find('#');
            if (hash != std::string::npos) s = s.substr(0, hash);
            s = trim(s);
            if (s.empty()) continue;
            size_t eq = s.find('=');
            if (eq == std::string::npos) {
                issues.push_back({s, lineno, "expected key = value"});
                continue;
            }
            std::string key = trim(s.substr(0, eq));
            std::string val = trim(s.substr(eq + 1));
            if (key.empty()) {
                issues.push_back({s, lineno, "empty key"});
                continue;
            }
            entries[key] = {val, lineno, false};
        }
    }

    void set_override(const std::string& key, const std::string& value) {
        entries[key] = {value, 0, false};
    }

    std::optional<std::string> raw(const std::string& key) {
        auto it = entries.find(key);
        if (it == entries.end()) return std::nullopt;
        it->second.used = true;
        return it->second.value;
    }

    int line_of(const std::string& key) const {
        auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.line;
    }

    void fail(const std::string& key, const std::string& msg) {
        issues.push_back({key, line_of(key), msg});
    }

    double get_double(const std::string& key, double def) {
        auto r = raw(key);
        if (!r) return def;
        try {
            size_t pos = 0;
            double v = std::stod(*r, &pos);
            if (trim(r->substr(pos)).empty()) return v;
        } catch (...) {
        }
        fail(key, "not a number: '" + *r + "'");
        return def;
    }

    int get_int(const std::string& key, int def) {
        auto r = raw(key);
        if (!r) return def;
        try {
            size_t pos = 0;
            long v = std::stol(*r, &pos, 10);
            if (trim(r->substr(pos)).empty()) return int(v);
        } catch (...) {
        }
        fail(key, "not an integer: '" + *r + "'");
        return def;
    }

    bool get_bool(const std::string& key, bool def) {
        auto r = raw(key);
        if (!r) return def;
        if (*r == "true" || *r == "1") return true;
        if (*r == "false" || *r == "0") return false;
        fail(key, "not a boolean: '" + *r + "'");
        return def;
    }

    std::string get_string(const std::string& key, const std::string& def) {
        auto r = raw(key);
        return r ? *r : def;
    }

    template <typename T, typename Conv>
    std::vector<T> get_list(const std::string& key, std::vector<T> def, Conv conv) {
        auto r = raw(key);
        if (!r) return def;
        std::vector<T> out;
        std::string item;
        std::istringstream in(*r);
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(conv(item));
            } catch (...) {
                fail(key, "bad list element: '" + item + "'");
                return def;
            }
        }
        if (out.empty()) {
            fail(key, "empty list");
            return def;
        }
        return out;
    }

    std::vector<double> get_doubles(const std::string& key, std::vector<double> def) {
        return get_list<double>(key, std::move(def), [](const std::string& s) { return std::stod(s); });
    }
    std::vector<int> get_ints(const std::string& key, std::vector<int> def) {
        return get_list<int>(key, std::move(def), [](const std::string& s) { return std::stoi(s); });
    }

    void check_unused() {
        for (const auto& [k, e] : entries)
            if (!e.used) issues.push_back({k, e.line, "unknown key"});
    }
};

}  // namespace detail

inline RunConfig parse_config(const std::string& text,
                              const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    detail::ConfigReader r;
    r.load(text);
    for (const auto& [k, v] : overrides) r.set_override(k, v);

    RunConfig c;
    c.model.omega = r.get_double("model.omega", 1.0);
    c.model.g1 = r.get_double("model.g1", 0.2);
    c.model.g2 = r.get_double("model.g2", 0.05);
    c.model.delta = r.get_double("model.delta", 0.005);
    c.model.atoms = r.get_int("model.atoms", 2);
    std::string alg = r.get_string("model.algebra", "N");
    if (alg == "N")
        c.model.algebra = Algebra::N;
    else if (alg == "K")
        c.model.algebra = Algebra::K;
    else if (alg == "J")
        c.model.algebra = Algebra::J;
    else
        r.fail("model.algebra", "must be one of N, K, J");
    c.model.drive_freqs =
        r.get_doubles("model.drive_freqs", std::vector<double>(std::max(c.model.atoms, 1), 1.0));
    c.model.drive_phases =
        r.get_doubles("model.drive_phases", std::vector<double>(std::max(c.model.atoms, 1), 0.0));

    c.truncation.dim = r.get_int("truncation.dim", 48);
    c.truncation.buffer = r.get_int("truncation.buffer", 12);

    c.resonance.n = r.get_int("resonance.n", 0);
    c.resonance.alphas = r.get_ints("resonance.alphas", {1});
    c.resonance.bracket_lo = r.get_double("resonance.bracket_lo", 1e-6);
    c.resonance.bracket_hi = r.get_double("resonance.bracket_hi", 2.0);

    c.gate.n = r.get_int("gate.n", 0);
    c.gate.alpha = r.get_int("gate.alpha", 1);
    c.gate.bracket_lo = r.get_double("gate.bracket_lo", 1e-6);
    c.gate.bracket_hi = r.get_double("gate.bracket_hi", 2.0);
    c.gate.times = r.get_doubles("gate.times", {0.0});
    c.gate.periods = r.get_int("gate.periods", 1);
    c.gate.compare = r.get_bool("gate.compare", false);
    c.gate.compare_tol = r.get_double("gate.compare_tol", 1e-9);

    c.simulate.initial = r.get_string("simulate.initial", "dressed:+1,-1;n=0");
    {
        auto raw_track = r.raw("simulate.track");
        if (raw_track) {
            std::istringstream in(*raw_track);
            std::string item;
            while (std::getline(in, item, '|')) {
                item = detail::trim(item);
                if (!item.empty()) c.simulate.track.push_back(item);
            }
        }
    }
    c.simulate.t0 = r.get_double("simulate.t0", 0.0);
    c.simulate.t1 = r.get_double("simulate.t1", 10.0);
    c.simulate.tol = r.get_double("simulate.tol", 1e-10);
    c.simulate.samples = r.get_int("simulate.samples", 200);

    c.sweep.parameter = r.get_string("sweep.parameter", "");
    c.sweep.from = r.get_double("sweep.from", 0.0);
    c.sweep.to = r.get_double("sweep.to", 1.0);
    c.sweep.steps = r.get_int("sweep.steps", 2);
    c.sweep.n = r.get_int("sweep.n", 0);
    c.sweep.alpha = r.get_int("sweep.alpha", 1);
    c.sweep.bracket_lo = r.get_double("sweep.bracket_lo", 1e-6);
    c.sweep.bracket_hi = r.get_double("sweep.bracket_hi", 2.0);

    c.output_path = r.get_string("output.path", "");
    std::string fmt = r.get_string("output.format", "csv");
    if (fmt == "csv")
        c.output_format = OutputFormat::CSV;
    else if (fmt == "json")
        c.output_format = OutputFormat::JSON;
    else
        r.fail("output.format", "must be csv or json");

    r.check_unused();

    // range validation with key paths
    auto require = [&](bool ok, const std::string& key, const std::string& msg) {
        if (!ok) r.issues.push_back({key, r.line_of(key), msg});
    };
    require(c.model.omega > 0, "model.omega", "must be positive");
    require(c.model.g1 >= 0, "model.g1", "must be >= 0");
    require(c.model.g2 >= 0, "model.g2", "must be >= 0");
    require(c.model.atoms >= 1 && c.model.atoms <= kMaxAtoms, "model.atoms",
            "must lie in [1, " + std::to_string(kMaxAtoms) + "]");
    require(int(c.model.drive_freqs.size()) == c.model.atoms, "model.drive_freqs",
            "needs one entry per atom");
    require(int(c.model.drive_phases.size()) == c.model.atoms, "model.drive_phases",
            "needs one entry per atom");
    for (double w : c.model.drive_freqs)
        require(w > 0, "model.drive_freqs", "drive frequencies must be positive");
    require(c.truncation.dim >= 2, "truncation.dim", "must be >= 2");
    require(c.truncation.buffer >= 0 && c.truncation.buffer < c.truncation.dim,
            "truncation.buffer", "must satisfy 0 <= buffer < dim");
    require(c.resonance.bracket_hi > c.resonance.bracket_lo && c.resonance.bracket_lo > 0,
            "resonance.bracket_lo", "bracket must be positive and ordered");
    for (int a : c.resonance.alphas) require(a != 0, "resonance.alphas", "harmonics must be nonzero");
    require(c.gate.alpha != 0, "gate.alpha", "must be nonzero");
    require(c.gate.bracket_hi > c.gate.bracket_lo && c.gate.bracket_lo > 0, "gate.bracket_lo",
            "bracket must be positive and ordered");
    require(c.simulate.t1 > c.simulate.t0, "simulate.t1", "t_span must be nondegenerate");
    require(c.simulate.tol >= 1e-12 && c.simulate.tol <= 1e-6, "simulate.tol",
            "must lie in [1e-12, 1e-6]");
    require(c.simulate.samples >= 2, "simulate.samples", "must be >= 2");
    require(c.sweep.steps >= 2, "sweep.steps", "must be >= 2");

    if (!r.issues.empty()) throw ConfigError(r.issues);
    return c;
}

/// Deterministic full serialization; parsing it back reproduces the config.
inline std::string to_text(const RunConfig& c) {
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    std::ostringstream o;
    o << "model.omega = " << num(c.model.omega) << "\n";
    o << "model.g1 = " << num(c.model.g1) << "\n";
    o << "model.g2 = " << num(c.model.g2) << "\n";
    o << "model.delta = " << num(c.model.delta) << "\n";
    o << "model.atoms = " << c.model.atoms << "\n";
    o << "model.algebra = "
      << (c.model.algebra == Algebra::N ? "N" : (c.model.algebra == Algebra::K ? "K" : "J")) << "\n";
    auto list = [&](const std::vector<double>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
        return s;
    };
    o << "model.drive_freqs = " << list(c.model.drive_freqs) << "\n";
    o << "model.drive_phases = " << list(c.model.drive_phases) << "\n";
    o << "truncation.dim = " << c.truncation.dim << "\n";
    o << "truncation.buffer = " << c.truncation.buffer << "\n";
    o << "resonance.n = " << c.resonance.n << "\n";
    {
        std::string s;
        for (size_t i = 0; i < c.resonance.alphas.size(); ++i)
            s += (i ? ", " : "") + std::to_string(c.resonance.alphas[i]);
        o << "resonance.alphas = " << s << "\n";
    }
    o << "resonance.bracket_lo = " << num(c.resonance.bracket_lo) << "\n";
    o << "resonance.bracket_hi = " << num(c.resonance.bracket_hi) << "\n";
    o << "gate.n = " << c.gate.n << "\n";
    o << "gate.alpha = " << c.gate.alpha << "\n";
    o << "gate.bracket_lo = " << num(c.gate.bracket_lo) << "\n";
    o << "gate.bracket_hi = " << num(c.gate.bracket_hi) << "\n";
    o << "gate.times = " << list(c.gate.times) << "\n";
    o << "gate.periods = " << c.gate.periods << "\n";
    o << "gate.compare = " << (c.gate.compare ? "true" : "false") << "\n";
    o << "gate.compare_tol = " << num(c.gate.compare_tol) << "\n";
    o << "simulate.initial = " << c.simulate.initial << "\n";
    if (!c.simulate.track.empty()) {
        std::string s;
        for (size_t i = 0; i < c.simulate.track.size(); ++i)
            s += (i ? " | " : "") + c.simulate.track[i];
        o << "simulate.track = " << s << "\n";
    }
    o << "simulate.t0 = " << num(c.simulate.t0) << "\n";
    o << "simulate.t1 = " << num(c.simulate.t1) << "\n";
    o << "simulate.tol = " << num(c.simulate.tol) << "\n";
    o << "simulate.samples = " << c.simulate.samples << "\n";
    if (!c.sweep.parameter.empty()) {
        o << "sweep.parameter = " << c.sweep.parameter << "\n";
        o << "sweep.from = " << num(c.sweep.from) << "\n";
        o << "sweep.to = " << num(c.sweep.to) << "\n";
        o << "sweep.steps = " << c.sweep.steps << "\n";
        o << "sweep.n = " << c.sweep.n << "\n";
        o << "sweep.alpha = " << c.sweep.alpha << "\n";
        o << "sweep.bracket_lo = " << num(c.sweep.bracket_lo) << "\n";
        o << "sweep.bracket_hi = " << num(c.sweep.bracket_hi) << "\n";
    }
    if (!c.output_path.empty()) o << "output.path = " << c.output_path << "\n";
    o << "output.format = " << (c.output_format == OutputFormat::CSV ? "csv" : "json") << "\n";
    return o.str();
}

}  // namespace scqed
