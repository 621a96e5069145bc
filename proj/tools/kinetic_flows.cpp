// kinetic-flows: batch experiment runner for the jump-equation simulator.
//
//   kinetic-flows <command> --config path.json [--seed S] [--threads K] [--out DIR]
//
// Exit codes: 0 pass, 1 usage/config error, 2 threshold failure.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kinetic/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stochastic particle simulation of Boltzmann/McKean-Vlasov jump equations"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::string> out_dir;

    const char* names[] = {"simulate",  "rate-time", "rate-particles", "weak-residual",
                           "conserve",  "stability", "validate-kernels"};
    for (const char* name : names) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment configuration")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--threads", threads, "worker cap (does not affect results)");
        sub->add_option("--out", out_dir, "override the output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // help/version exit 0; usage errors exit 1
    }

    try {
        const std::string sub = app.get_subcommands().front()->get_name();
        const int code = kinetic::run_from_file(config_path, sub, seed, threads, out_dir);
        if (code == 2) std::cerr << sub << ": threshold failure (see report.json)\n";
        return code;
    } catch (const kinetic::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
