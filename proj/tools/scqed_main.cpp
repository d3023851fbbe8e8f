// scqed command line: verify / resonance / gate / simulate / sweep over a
// key-value config file, CSV or JSON output.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "scqed/cli.hpp"

namespace {

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& sets) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : sets) {
        size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw scqed::ConfigError({{s, 0, "--set expects key=value"}});
        out.emplace_back(scqed::detail::trim(s.substr(0, eq)),
                         scqed::detail::trim(s.substr(eq + 1)));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strong-coupling cavity QED simulator and gate solver"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> sets;
    std::string command;
    for (const char* name : {"verify", "resonance", "gate", "simulate", "sweep"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("-c,--config", config_path, "config file (key = value lines)");
        sub->add_option("--set", sets, "override a config key, e.g. --set model.g2=0.01");
        sub->callback([&command, name]() { command = name; });
    }
    CLI11_PARSE(app, argc, argv);

    std::string text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) {
            std::cerr << scqed::cli::make_error_record(1, "validation",
                                                       "cannot open config file '" + config_path + "'")
                      << "\n";
            return 1;
        }
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }

    scqed::RunConfig cfg;
    try {
        cfg = scqed::parse_config(text, parse_overrides(sets));
    } catch (const scqed::ConfigError& e) {
        std::cerr << scqed::cli::make_error_record(1, "validation", e.what()) << "\n";
        return 1;
    }

    scqed::cli::CommandOutput out = scqed::cli::run_command(command, cfg);
    if (!out.payload.empty()) {
        if (cfg.output_path.empty()) {
            std::cout << out.payload;
        } else {
            std::ofstream f(cfg.output_path, std::ios::binary);
            if (!f) {
                std::cerr << scqed::cli::make_error_record(
                                 1, "validation", "cannot write output file '" + cfg.output_path + "'")
                          << "\n";
                return 1;
            }
            f << out.payload;
        }
    }
    if (!out.error_record.empty()) std::cerr << out.error_record << "\n";
    return out.exit_code;
}
