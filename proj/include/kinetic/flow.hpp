#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "kinetic/euler.hpp"
#include "kinetic/measure.hpp"
#include "kinetic/model.hpp"
#include "kinetic/wasserstein.hpp"

namespace kinetic {

/// (resolution, error) pairs with a least-squares log-log fit.
struct RateReport {
    std::vector<std::pair<double, double>> pairs;
    double slope = 0.0;
    double intercept = 0.0;  // of the fit in log space
    double r_squared = 0.0;
    double floor = 0.0;                     // measured sampling floor, when estimated
    std::vector<double> normalized_errors;  // errors / (1 + first moment of the input)
};

inline void fit_loglog(RateReport& report) {
    const std::size_t n = report.pairs.size();
    double sx = 0, sy = 0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = std::log(report.pairs[i].first);
        ys[i] = std::log(std::max(report.pairs[i].second, 1e-300));
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    report.slope = sxy / sxx;
    report.intercept = my - report.slope * mx;
    double ss_res = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double fit = report.intercept + report.slope * xs[i];
        ss_res += (ys[i] - fit) * (ys[i] - fit);
    }
    report.r_squared = (syy > 0) ? 1.0 - ss_res / syy : 1.0;
}

namespace flow_detail {

constexpr std::uint64_t kTagReplica = 0x5245504cULL;
constexpr std::uint64_t kTagFloor = 0x464c4f52ULL;
constexpr std::uint64_t kTagSubsample = 0x53554253ULL;

inline double terminal_w1(const ParticleSystemState& a, const ParticleSystemState& b,
                          std::uint64_t seed) {
    return w1_auto(a.measure(), b.measure(), root_stream(seed).child(kTagSubsample));
}

}  // namespace flow_detail

/// W1 between two independent equal-configuration runs; the resolution floor
/// every Monte Carlo W1 comparison sits on.
inline double estimate_sampling_floor(const ModelSpec& model, const EmpiricalMeasure& rho0,
                                      double T, int n, std::uint64_t seed,
                                      const StepOptions& opts = {}) {
    const PartitionSchedule schedule(0.0, T, n);
    auto state0 = ParticleSystemState::from_measure(rho0);
    const auto a = simulate_terminal(state0, schedule, model,
                                     root_stream(seed).child(flow_detail::kTagFloor, 1).key(), opts);
    const auto b = simulate_terminal(state0, schedule, model,
                                     root_stream(seed).child(flow_detail::kTagFloor, 2).key(), opts);
    return flow_detail::terminal_w1(a, b, seed);
}

/// Partition-refinement rate of the composed scheme. For each n the terminal
/// empirical law is compared against a reference run at 2 * max(n_list)
/// steps. Within a replica all resolutions share their candidate streams
/// through micro-slot alignment (common random numbers), so the comparison
/// measures the discretization gap rather than the W1 sampling floor; the
/// floor is still estimated from an independent pair and reported. Replicas
/// use independent streams and errors are averaged across them.
inline RateReport refinement_rate(const ModelSpec& model, const EmpiricalMeasure& rho0,
                                  double T, const std::vector<int>& n_list, int replicas,
                                  std::uint64_t seed, const StepOptions& base_opts = {}) {
    if (n_list.size() < 2) throw SizeMismatch("refinement_rate: need at least two resolutions");
    for (std::size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw SizeMismatch("refinement_rate: n_list must be strictly increasing");
    if (replicas < 2) throw SizeMismatch("refinement_rate: need at least two replicas");

    const int n_ref = 2 * n_list.back();
    const auto state0 = ParticleSystemState::from_measure(rho0);

    std::vector<double> err(n_list.size(), 0.0);
    for (int r = 0; r < replicas; ++r) {
        const std::uint64_t rseed = root_stream(seed).child(flow_detail::kTagReplica, r).key();
        StepOptions ref_opts = base_opts;
        ref_opts.micro_slots = 1;
        const auto ref = simulate_terminal(state0, PartitionSchedule(0.0, T, n_ref), model,
                                           rseed, ref_opts);
        for (std::size_t k = 0; k < n_list.size(); ++k) {
            StepOptions opts = base_opts;
            opts.micro_slots = (n_ref % n_list[k] == 0) ? n_ref / n_list[k] : 1;
            const auto run = simulate_terminal(state0, PartitionSchedule(0.0, T, n_list[k]),
                                               model, rseed, opts);
            err[k] += flow_detail::terminal_w1(run, ref, rseed);
        }
    }

    RateReport report;
    const double scale = 1.0 + rho0.moment(1.0);
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        const double e = err[k] / replicas;
        report.pairs.emplace_back(static_cast<double>(n_list[k]), e);
        report.normalized_errors.push_back(e / scale);
    }
    fit_loglog(report);
    report.floor = estimate_sampling_floor(model, rho0, T, n_ref, seed, base_opts);
    return report;
}

/// W1 between the terminal laws of runs over [s, s+dt] and [0, dt] with
/// independent streams. Time-homogeneous coefficients make the two laws
/// equal, so the value should sit at the sampling floor.
inline double stationarity_check(const ModelSpec& model, const EmpiricalMeasure& rho0,
                                 double s, double dt, int n, std::uint64_t seed,
                                 const StepOptions& opts = {}) {
    if (s < 0.0 || dt <= 0.0) throw NegativeDuration("stationarity_check: need s >= 0, dt > 0");
    const auto state0 = ParticleSystemState::from_measure(rho0);
    const auto shifted = simulate_terminal(state0, PartitionSchedule(s, s + dt, n), model,
                                           root_stream(seed).child(11).key(), opts);
    const auto origin = simulate_terminal(state0, PartitionSchedule(0.0, dt, n), model,
                                          root_stream(seed).child(12).key(), opts);
    return flow_detail::terminal_w1(shifted, origin, seed);
}

struct StabilityResult {
    double lhs = 0.0;        // W1 between the two terminal laws
    double rhs = 0.0;        // envelope + floor allowance
    double w1_inputs = 0.0;  // W1(rho, xi)
    double envelope = 0.0;   // exp(L_total T) * W1(rho, xi)
    double floor = 0.0;
    double lhs_normalized = 0.0;
    bool pass = false;
};

/// Stability envelope check: terminal W1 of independent runs from rho and xi
/// against exp((2 L_b + 3 L_mu) T) * W1(rho, xi) plus the sampling floor.
inline StabilityResult stability_experiment(const ModelSpec& model, const EmpiricalMeasure& rho,
                                            const EmpiricalMeasure& xi, double T, int n,
                                            std::uint64_t seed, const StepOptions& opts = {}) {
    if (rho.dim() != xi.dim() || rho.size() != xi.size())
        throw SizeMismatch("stability_experiment: rho and xi must match in size and dimension");
    StabilityResult out;
    out.w1_inputs = w1_auto(rho, xi, root_stream(seed).child(21));
    const auto a = simulate_terminal(ParticleSystemState::from_measure(rho),
                                     PartitionSchedule(0.0, T, n), model,
                                     root_stream(seed).child(22).key(), opts);
    const auto b = simulate_terminal(ParticleSystemState::from_measure(xi),
                                     PartitionSchedule(0.0, T, n), model,
                                     root_stream(seed).child(23).key(), opts);
    out.lhs = flow_detail::terminal_w1(a, b, seed);
    out.lhs_normalized = out.lhs / (1.0 + rho.moment(1.0));
    out.floor = estimate_sampling_floor(model, rho, T, n, seed, opts);
    out.envelope = std::exp(lipschitz_budget(model).L_total * T) * out.w1_inputs;
    out.rhs = out.envelope + out.floor;
    out.pass = out.lhs <= out.rhs;
    return out;
}

/// Coupled check of translation equivariance (Maxwell molecules): runs from
/// rho and from rho + shift share every stream, so the terminal W1 should
/// equal |shift| exactly as long as the truncation radius is never active.
inline double translation_coupled_w1(const ModelSpec& model, const EmpiricalMeasure& rho,
                                     std::span<const double> shift, double T, int n,
                                     std::uint64_t seed, const StepOptions& opts = {}) {
    const std::uint64_t run_seed = root_stream(seed).child(31).key();
    const auto a = simulate_terminal(ParticleSystemState::from_measure(rho),
                                     PartitionSchedule(0.0, T, n), model, run_seed, opts);
    const auto b = simulate_terminal(ParticleSystemState::from_measure(rho.translated(shift)),
                                     PartitionSchedule(0.0, T, n), model, run_seed, opts);
    return flow_detail::terminal_w1(a, b, seed);
}

/// Time modulus of the flow: error(h) = W1(law at t + h, law at t) with a
/// common base run up to t; the per-h continuations are single steps. The
/// fitted slope should be close to +1 and each error is bounded by the
/// one-step mean-displacement constant times h.
inline RateReport time_lipschitz_check(const ModelSpec& model, const EmpiricalMeasure& rho0,
                                       double t, const std::vector<double>& h_list,
                                       std::uint64_t seed, int n_base = 32,
                                       const StepOptions& opts = {}) {
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (h_list[i] >= h_list[i - 1])
            throw SizeMismatch("time_lipschitz_check: h_list must be positive decreasing");
    const std::uint64_t run_seed = root_stream(seed).child(41).key();
    const auto base = simulate_terminal(ParticleSystemState::from_measure(rho0),
                                        PartitionSchedule(0.0, t, n_base), model, run_seed, opts);
    const EmpiricalMeasure at_t = base.measure();

    RateReport report;
    const double scale = 1.0 + rho0.moment(1.0);
    for (double h : h_list) {
        ParticleSystemState cont = base;
        particle_step(cont, h, model, run_seed, opts);
        const double e = w1_auto(at_t, cont.measure(), root_stream(seed).child(42));
        report.pairs.emplace_back(h, e);
        report.normalized_errors.push_back(e / scale);
    }
    fit_loglog(report);
    return report;
}

}  // namespace kinetic
