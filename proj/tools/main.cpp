// fieldwit: reproduce the field-witness experiments from a JSON config.
//
//   fieldwit <subcommand> [--config FILE] [--set key.path=value ...]
//                         [--output FILE] [--plot FILE.svg]
//
// Exit status: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "fieldwit/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Args {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output;
    std::string plot;
    bool print_config = false;
};

fieldwit::Json load(const std::string& path) {
    if (path.empty()) return nullptr;
    std::ifstream in(path);
    if (!in) throw fieldwit::ConfigError("cannot open config file '" + path + "'");
    try {
        return fieldwit::Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw fieldwit::ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

void emit_plot(const std::string& command, const fieldwit::ExperimentResult& r, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw fieldwit::ConfigError("cannot write plot file '" + path + "'");
    if (command == "fig1-sphere") {
        fieldwit::write_svg_map(out, r.table, "phi", "theta", "W", "W over observation directions");
    } else if (command == "dicke-sweep") {
        fieldwit::write_svg_plot(out, r.table, "theta", "W", "W vs observation angle");
    } else if (command == "decay") {
        fieldwit::write_svg_plot(out, r.table, "t", "W_min_over_dirs", "W during decay");
    } else if (command == "cumulant-tent") {
        fieldwit::write_svg_plot(out, r.table, "kd", "t_ent", "t_ent vs kd");
    } else {
        throw fieldwit::ConfigError("no plot available for '" + command + "'");
    }
}

int run(const std::string& command, const Args& args) {
    const auto config = fieldwit::resolve_config(command, load(args.config_path), args.overrides);
    if (args.print_config) {
        std::cout << config.dump(2) << '\n';
        return 0;
    }
    const auto result = fieldwit::run_experiment(command, config);

    std::ofstream file;
    if (!args.output.empty()) {
        file.open(args.output);
        if (!file) throw fieldwit::ConfigError("cannot write output file '" + args.output + "'");
    }
    std::ostream& out = args.output.empty() ? std::cout : file;
    if (command == "fuzz") {
        fieldwit::Json doc = result.summary;
        doc["config"] = config;
        out << doc.dump(2) << '\n';
    } else {
        fieldwit::write_csv(out, command, config, result);
    }
    if (!args.plot.empty()) emit_plot(command, result, args.plot);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electric-field entanglement witnesses for atomic ensembles"};
    app.require_subcommand(1);
    Args args;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"fig1-sphere", "Witnesses of the three-atom state over a sphere of directions"},
        {"dicke-sweep", "Witnesses of a phased Dicke state along an in-plane angle sweep"},
        {"decay", "Exact dissipative dynamics with witness and concurrence traces"},
        {"cumulant-tent", "Detection time from the second-order cumulant dynamics over (N, kd)"},
        {"fuzz", "Randomized separable-state check of the witness bounds (JSON report)"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", args.config_path, "JSON configuration file");
        sub->add_option("-s,--set", args.overrides, "Override a config key, e.g. geometry.n=8")->take_all();
        sub->add_option("-o,--output", args.output, "Output file (default: stdout)");
        sub->add_option("--plot", args.plot, "Also write an SVG plot to this file");
        sub->add_flag("--print-config", args.print_config, "Print the resolved config and exit");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, args);
    } catch (const fieldwit::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const fieldwit::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
