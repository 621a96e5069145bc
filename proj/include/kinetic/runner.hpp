#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kinetic/euler.hpp"
#include "kinetic/flow.hpp"
#include "kinetic/json_io.hpp"
#include "kinetic/particle_rate.hpp"
#include "kinetic/validate.hpp"
#include "kinetic/weakform.hpp"

namespace kinetic {

enum class Command {
    Simulate,
    RateTime,
    RateParticles,
    WeakResidual,
    Conserve,
    Stability,
    ValidateKernels
};

inline std::string to_string(Command c) {
    switch (c) {
        case Command::Simulate: return "simulate";
        case Command::RateTime: return "rate-time";
        case Command::RateParticles: return "rate-particles";
        case Command::WeakResidual: return "weak-residual";
        case Command::Conserve: return "conserve";
        case Command::Stability: return "stability";
        case Command::ValidateKernels: return "validate-kernels";
    }
    return "?";
}

inline Command command_from_string(const std::string& s) {
    if (s == "simulate") return Command::Simulate;
    if (s == "rate-time") return Command::RateTime;
    if (s == "rate-particles") return Command::RateParticles;
    if (s == "weak-residual") return Command::WeakResidual;
    if (s == "conserve") return Command::Conserve;
    if (s == "stability") return Command::Stability;
    if (s == "validate-kernels") return Command::ValidateKernels;
    throw ConfigError("unknown command '" + s + "'");
}

struct ExperimentConfig {
    Command command = Command::Simulate;
    ModelSpec model;
    std::size_t N = 1000;
    int n = 10;
    double T = 1.0;
    int replicas = 8;
    std::vector<int> n_list;
    std::vector<std::size_t> N_list;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string output_dir = ".";
    int threads = 1;
    std::size_t reference_N = 0;  // 0: default 4 * max(N_list)
    double delta = 0.5;           // stability shift
    std::size_t samples = 100000; // validate-kernels draws

    void validate() const {
        if (!seed_set) throw ConfigError("seed is mandatory (no wall-clock default)");
        if (N < 1 || N > 1'000'000) throw ConfigError("N out of range [1, 1e6]");
        if (n < 1) throw ConfigError("n must be >= 1");
        if (T < 0.0) throw ConfigError("T must be nonnegative");
        if (threads < 1 || threads > 256) throw ConfigError("threads out of range");
        if (!n_list.empty() && n_list.front() < 1)
            throw ConfigError("n_list entries must be >= 1");
        for (std::size_t i = 1; i < n_list.size(); ++i)
            if (n_list[i] <= n_list[i - 1])
                throw ConfigError("n_list must be strictly increasing");
        for (std::size_t i = 1; i < N_list.size(); ++i)
            if (N_list[i] <= N_list[i - 1])
                throw ConfigError("N_list must be strictly increasing");
        switch (command) {
            case Command::RateTime:
                if (n_list.size() < 2) throw ConfigError("rate-time needs n_list");
                if (replicas < 2) throw ConfigError("rate-time needs replicas >= 2");
                break;
            case Command::RateParticles:
                if (N_list.size() < 2) throw ConfigError("rate-particles needs N_list");
                break;
            case Command::ValidateKernels:
                if (samples < 10000) throw ConfigError("validate-kernels needs samples >= 1e4");
                break;
            default: break;
        }
    }
};

inline json config_to_json(const ExperimentConfig& c) {
    return json{{"command", to_string(c.command)},
                {"model", model_to_json(c.model)},
                {"N", c.N},
                {"n", c.n},
                {"T", c.T},
                {"replicas", c.replicas},
                {"n_list", c.n_list},
                {"N_list", c.N_list},
                {"seed", c.seed},
                {"output_dir", c.output_dir},
                {"threads", c.threads},
                {"reference_N", c.reference_N},
                {"delta", c.delta},
                {"samples", c.samples}};
}

inline ExperimentConfig config_from_json(const json& j) {
    static const std::set<std::string> known{
        "command", "model",   "N",          "n",       "T",
        "replicas", "n_list", "N_list",     "seed",    "output_dir",
        "threads", "delta",   "reference_N", "samples"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("config: unknown key '" + it.key() + "'");
    ExperimentConfig c;
    try {
        c.command = command_from_string(j.at("command").get<std::string>());
        c.model = model_from_json(j.at("model"));
        c.N = j.value("N", c.N);
        c.n = j.value("n", c.n);
        c.T = j.value("T", c.T);
        c.replicas = j.value("replicas", c.replicas);
        c.n_list = j.value("n_list", c.n_list);
        c.N_list = j.value("N_list", c.N_list);
        if (j.contains("seed")) {
            c.seed = j.at("seed").get<std::uint64_t>();
            c.seed_set = true;
        }
        c.output_dir = j.value("output_dir", c.output_dir);
        c.threads = j.value("threads", c.threads);
        c.reference_N = j.value("reference_N", c.reference_N);
        c.delta = j.value("delta", c.delta);
        c.samples = j.value("samples", c.samples);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

namespace runner_detail {

inline void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << body;
}

inline void write_series_csv(const std::filesystem::path& path, const std::string& xname,
                             const std::string& yname,
                             const std::vector<std::pair<double, double>>& rows) {
    std::ostringstream out;
    out << xname << ',' << yname << '\n';
    for (auto [x, y] : rows)
        out << io_detail::format_double(x) << ',' << io_detail::format_double(y) << '\n';
    write_file(path, out.str());
}

inline std::vector<TestFunction> default_phi_set(const ModelSpec& model) {
    if (model.dim == 1)
        return {TestFunction::tanh_coordinate(0, 0.5), TestFunction::tanh_coordinate(0, 1.0)};
    return {TestFunction::tanh_coordinate(0, 1.0), TestFunction::product_tanh(0.5)};
}

}  // namespace runner_detail

/// Executes one experiment: writes report.json, series.csv and manifest.json
/// into the output directory. Returns 0 on pass, 2 on threshold failure
/// (after writing the report), and throws ConfigError on bad configuration.
inline int run_experiment(const ExperimentConfig& config) {
    config.validate();
    namespace fs = std::filesystem;
    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);

    const StepOptions opts{.threads = config.threads};
    json report;
    report["experiment"] = to_string(config.command);
    report["model"] = model_to_json(config.model);
    report["params"] = config_to_json(config);
    bool pass = true;
    std::string fail_reason;
    std::vector<std::pair<double, double>> series;
    std::string series_x = "resolution", series_y = "error";
    json manifest{{"seed", config.seed},
                  {"model", model_to_json(config.model)},
                  {"outputs", json::array({"report.json", "series.csv"})}};

    switch (config.command) {
        case Command::Simulate: {
            auto state0 = initial_state(config.model, config.N, config.seed);
            const PartitionSchedule schedule(0.0, config.T, config.n);
            std::vector<StepReport> step_reports;
            const auto trajectory =
                simulate(state0, schedule, config.model, config.seed, opts, &step_reports);
            json snapshots = json::array();
            for (std::size_t k = 0; k < trajectory.size(); ++k) {
                const std::string name = "snapshot_" + std::to_string(k) + ".csv";
                std::ostringstream csv;
                write_csv(trajectory[k].measure(), csv);
                runner_detail::write_file(out_dir / name, csv.str());
                snapshots.push_back(name);
                series.emplace_back(trajectory[k].clock, trajectory[k].measure().moment(1.0));
            }
            series_x = "time";
            series_y = "value";
            json sr = json::array();
            for (const auto& r : step_reports)
                sr.push_back(json{{"candidates", r.candidates},
                                  {"accepted", r.accepted},
                                  {"acceptance_rate", r.acceptance_rate}});
            manifest["schedule"] =
                json{{"s", schedule.s}, {"t", schedule.t}, {"n", schedule.n}};
            manifest["snapshots"] = snapshots;
            manifest["step_reports"] = sr;
            report["trajectory_length"] = trajectory.size();
            report["terminal_first_moment"] = trajectory.back().measure().moment(1.0);
            break;
        }
        case Command::RateTime: {
            const auto rho0 = initial_state(config.model, config.N, config.seed).measure();
            const RateReport r = refinement_rate(config.model, rho0, config.T, config.n_list,
                                                 config.replicas, config.seed, opts);
            report.update(rate_report_to_json(r));
            report["threshold"] = json{{"slope_min", -1.35}, {"slope_max", -0.65}};
            pass = r.slope >= -1.35 && r.slope <= -0.65;
            if (!pass) fail_reason = "rate-time slope outside [-1.35, -0.65]";
            series = r.pairs;
            break;
        }
        case Command::RateParticles: {
            ParticleRateSpec spec;
            spec.N_list = config.N_list;
            spec.reference_N =
                config.reference_N ? config.reference_N : 4 * config.N_list.back();
            const ParticleRateResult r =
                rate_particles(spec, config.model, config.T, config.n, config.replicas,
                               config.seed, opts);
            if (!r.n_budget_ok)
                std::cerr << "warning: C/n is not below the smallest V_N in the ladder\n";
            report.update(rate_report_to_json(r.report));
            report["expected_slope"] = r.expected_slope;
            report["chaos_pairs"] = r.chaos_pairs;
            report["chaos_N"] = r.chaos_N;
            report["n_budget_ok"] = r.n_budget_ok;
            const double lo = config.model.dim >= 3 ? -0.55 : -0.65;
            const double hi = config.model.dim >= 3 ? -0.15 : -0.35;
            report["threshold"] = json{{"slope_min", lo}, {"slope_max", hi}};
            pass = r.report.slope >= lo && r.report.slope <= hi &&
                   monotone_decreasing_trend(r.chaos_pairs);
            if (!pass) fail_reason = "rate-particles slope or chaos trend out of band";
            series = r.report.pairs;
            break;
        }
        case Command::WeakResidual: {
            auto state0 = initial_state(config.model, config.N, config.seed);
            const PartitionSchedule schedule(0.0, config.T, config.n);
            const auto traj = simulate(state0, schedule, config.model, config.seed, opts);
            std::vector<EmpiricalMeasure> measures;
            std::vector<double> times;
            for (const auto& s : traj) {
                measures.push_back(s.measure());
                times.push_back(s.clock);
            }
            const auto phi_set = runner_detail::default_phi_set(config.model);
            const ResidualReport r = weak_residual(measures, times, config.model, phi_set);
            const double budget =
                5.0 * (1.0 / std::sqrt(static_cast<double>(config.N)) + 1.0 / config.n);
            report.update(residual_report_to_json(r));
            report["budget"] = budget;
            report["threshold"] = json{{"max_residual", budget}};
            pass = r.max_residual <= budget;
            if (!pass) fail_reason = "weak residual exceeds 5(N^-1/2 + 1/n)";
            for (std::size_t k = 0; k < r.times.size(); ++k)
                series.emplace_back(r.times[k],
                                    std::abs(r.functions[0].residual_series[k]));
            series_x = "time";
            series_y = "value";
            break;
        }
        case Command::Conserve: {
            auto state0 = initial_state(config.model, config.N, config.seed);
            const auto initial = state0.measure();
            const auto terminal = simulate_terminal(state0, PartitionSchedule(0.0, config.T, config.n),
                                                    config.model, config.seed, opts)
                                      .measure();
            // paired per-particle differences; bootstrap of their mean
            const int d = config.model.dim;
            std::vector<double> energy_diff(config.N);
            std::vector<std::vector<double>> vel_diff(d, std::vector<double>(config.N));
            for (std::size_t i = 0; i < config.N; ++i) {
                auto a = initial.point(i);
                auto b = terminal.point(i);
                double e = 0.0;
                for (int k = 0; k < d; ++k) {
                    vel_diff[k][i] = b[k] - a[k];
                    e += b[k] * b[k] - a[k] * a[k];
                }
                energy_diff[i] = e;
            }
            auto mean_of = [](const std::vector<double>& v) {
                double s = 0.0;
                for (double x : v) s += x;
                return s / v.size();
            };
            auto boot_sd = [&](const std::vector<double>& v, std::uint64_t tag) {
                Substream st = root_stream(config.seed).child(0x424f4f54ULL, tag);
                const int B = 200;
                double s1 = 0.0, s2 = 0.0;
                for (int b = 0; b < B; ++b) {
                    double acc = 0.0;
                    for (std::size_t i = 0; i < v.size(); ++i)
                        acc += v[st.uniform_index(v.size())];
                    const double m = acc / v.size();
                    s1 += m;
                    s2 += m * m;
                }
                return std::sqrt(std::max(0.0, s2 / B - (s1 / B) * (s1 / B)));
            };
            json checks = json::array();
            for (int k = 0; k < d; ++k) {
                const double m = mean_of(vel_diff[k]);
                const double sd = boot_sd(vel_diff[k], k);
                const bool ok = std::abs(m) <= 5.0 * sd;
                checks.push_back(json{{"quantity", "mean_velocity_" + std::to_string(k)},
                                      {"drift", m},
                                      {"sigma", sd},
                                      {"pass", ok}});
                pass = pass && ok;
            }
            {
                const double m = mean_of(energy_diff);
                const double sd = boot_sd(energy_diff, 100);
                const bool ok = std::abs(m) <= 5.0 * sd;
                checks.push_back(json{{"quantity", "mean_energy"},
                                      {"drift", m},
                                      {"sigma", sd},
                                      {"pass", ok}});
                pass = pass && ok;
            }
            report["conservation"] = checks;
            report["threshold"] = "|drift| <= 5 sigma (bootstrap)";
            if (!pass) fail_reason = "conservation drift beyond 5 sigma";
            series.emplace_back(0.0, mean_of(energy_diff));
            break;
        }
        case Command::Stability: {
            const auto rho = initial_state(config.model, config.N, config.seed).measure();
            std::vector<double> shift(config.model.dim, 0.0);
            shift[0] = config.delta;
            const auto xi = rho.translated(shift);
            const StabilityResult r = stability_experiment(config.model, rho, xi, config.T,
                                                           config.n, config.seed, opts);
            report["stability"] = json{{"lhs", r.lhs},
                                       {"rhs", r.rhs},
                                       {"w1_inputs", r.w1_inputs},
                                       {"envelope", r.envelope},
                                       {"floor", r.floor},
                                       {"lhs_normalized", r.lhs_normalized},
                                       {"pass", r.pass}};
            report["threshold"] = "lhs <= exp(L_total T) W1(rho, xi) + floor";
            pass = r.pass;
            if (!pass) fail_reason = "stability envelope violated";
            series.emplace_back(r.lhs, r.rhs);
            break;
        }
        case Command::ValidateKernels: {
            const ValidationReport r =
                validate_kernels(config.model, config.samples, config.seed);
            report["validation"] = validation_report_to_json(r);
            report["threshold"] = "every identity at its stated tolerance";
            pass = r.all_as_expected;
            if (!pass) {
                for (const auto& c : r.checks)
                    if (c.applicable && c.pass != c.expected_pass)
                        fail_reason += c.name + " ";
            }
            for (const auto& c : r.checks)
                series.emplace_back(static_cast<double>(series.size()), c.max_deviation);
            break;
        }
    }

    report["pass"] = pass;
    if (!pass) report["failed_criterion"] = fail_reason;
    runner_detail::write_file(out_dir / "report.json", report.dump(2) + "\n");
    runner_detail::write_series_csv(out_dir / "series.csv", series_x, series_y, series);
    runner_detail::write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return pass ? 0 : 2;
}

/// Parse a config file, apply command-line overrides, run. The subcommand
/// name, when given, wins over the config's command field.
inline int run_from_file(const std::string& config_path,
                         const std::optional<std::string>& command_override,
                         const std::optional<std::uint64_t>& seed_override,
                         const std::optional<int>& threads_override,
                         const std::optional<std::string>& out_override) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot read config file " + config_path);
    json j = json::parse(in, nullptr, true, true);
    if (command_override) j["command"] = *command_override;
    if (seed_override) j["seed"] = *seed_override;
    if (threads_override) j["threads"] = *threads_override;
    if (out_override) j["output_dir"] = *out_override;
    return run_experiment(config_from_json(j));
}

}  // namespace kinetic
