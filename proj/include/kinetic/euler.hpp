#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

#include "kinetic/errors.hpp"
#include "kinetic/kernels.hpp"
#include "kinetic/measure.hpp"
#include "kinetic/model.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

struct JumpEvent {
    double time = 0.0;  // position of the candidate inside the step
    std::size_t partner = 0;
    AngularParams z;
    double u = 0.0;  // thinning level in [0, rate_cap]
    bool accepted = false;
};

struct StepReport {
    std::uint64_t candidates = 0;
    std::uint64_t accepted = 0;
    double acceptance_rate = 0.0;

    void merge(const StepReport& other) noexcept {
        candidates += other.candidates;
        accepted += other.accepted;
        acceptance_rate =
            candidates ? static_cast<double>(accepted) / static_cast<double>(candidates) : 0.0;
    }
};

/// The discrete Boltzmann process: N particle states plus the simulation
/// clock. `micro_cursor` counts the candidate-substream slots consumed so far,
/// which is what makes a run over [0, T] bitwise equal to [0, T/2] followed by
/// a continuation over [T/2, T].
struct ParticleSystemState {
    std::vector<double> coords;  // N x dim, row major
    int dim = 1;
    double clock = 0.0;
    std::uint64_t micro_cursor = 0;

    std::size_t size() const noexcept { return coords.size() / dim; }
    std::span<const double> point(std::size_t i) const noexcept {
        return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
    }
    std::span<double> point_mut(std::size_t i) noexcept {
        return {coords.data() + i * dim, static_cast<std::size_t>(dim)};
    }
    EmpiricalMeasure measure() const { return EmpiricalMeasure(coords, dim); }

    static ParticleSystemState from_measure(const EmpiricalMeasure& mu) {
        return {mu.coords(), mu.dim(), 0.0, 0};
    }
};

struct StepOptions {
    int threads = 1;
    /// Candidate substream slots per step. Runs whose step counts divide a
    /// common reference resolution and that use matching slot counts share
    /// their Poisson candidates exactly (common-random-number coupling).
    int micro_slots = 1;
    /// Optional per-particle stream labels (tests of index symmetry). Partner
    /// indices drawn from a stream are labels and are mapped back to slots.
    const std::vector<std::size_t>* labels = nullptr;
    /// Optional per-particle event logs (diagnostics; slot-indexed).
    std::vector<std::vector<JumpEvent>>* event_log = nullptr;
};

/// One thinning candidate: a proposed collision before the u <= gamma test.
struct Candidate {
    double time = 0.0;  // slot-relative position, kept for event logs
    std::size_t partner = 0;
    AngularParams z;
    double u = 0.0;
};

namespace euler_detail {

constexpr std::uint64_t kTagEvents = 0x45564e54ULL;  // candidate streams

inline Substream event_stream(std::uint64_t seed, std::uint64_t micro_slot,
                              std::uint64_t label) {
    return root_stream(seed).child(kTagEvents).child(micro_slot, label);
}

/// Frozen-state update of a single particle from an explicit candidate list:
/// x_out = x + b(x) dt + sum over accepted candidates of c(v, z, x), with x
/// the step-start state in every term. Exposed so tests can force events.
template <typename PartnerFn>
StepReport apply_candidates(const ModelSpec& model, std::span<const double> x_old,
                            std::span<double> x_out, double dt,
                            std::span<const Candidate> candidates, PartnerFn&& partner,
                            double mf_factor, std::vector<JumpEvent>* log) {
    StepReport tally;
    const int d = model.dim;
    Point acc(x_old.begin(), x_old.end());
    const Point b = drift_b(model, x_old);
    for (int k = 0; k < d; ++k) acc[k] += b[k] * dt;

    for (const Candidate& cand : candidates) {
        const auto v = partner(cand.partner);
        const double gamma = speed_rate(model, v, x_old) * mf_factor;
        const bool accepted = cand.u <= gamma;
        ++tally.candidates;
        if (accepted) {
            ++tally.accepted;
            const Point jump = collision_c(model, v, cand.z, x_old);
            for (int k = 0; k < d; ++k) acc[k] += jump[k];
        }
        if (log) log->push_back({cand.time, cand.partner, cand.z, cand.u, accepted});
    }
    for (int k = 0; k < d; ++k) x_out[k] = acc[k];
    tally.acceptance_rate = tally.candidates ? static_cast<double>(tally.accepted) /
                                                   static_cast<double>(tally.candidates)
                                             : 0.0;
    return tally;
}

/// Draws the Poisson candidates of one (step, particle) pair, one substream
/// per micro slot. Draw order per candidate: time, partner index, angular
/// parameters (angular models only), thinning level.
inline void draw_candidates(const ModelSpec& model, double dt, double cap, double mass,
                            std::size_t n_partners, std::uint64_t seed,
                            std::uint64_t micro_base, int micro_slots, std::uint64_t label,
                            const std::vector<std::size_t>* inverse_labels,
                            std::vector<Candidate>& out) {
    out.clear();
    const double lambda = mass * cap * (dt / micro_slots);
    for (int s = 0; s < micro_slots; ++s) {
        Substream st = event_stream(seed, micro_base + s, label);
        const std::uint64_t n_cand = st.poisson(lambda);
        for (std::uint64_t c = 0; c < n_cand; ++c) {
            Candidate cand;
            cand.time = st.next_double();
            std::size_t j = static_cast<std::size_t>(st.uniform_index(n_partners));
            if (inverse_labels) j = (*inverse_labels)[j];
            cand.partner = j;
            if (model.angular()) cand.z = sample_angular(model, st);
            cand.u = cap * st.next_double();
            out.push_back(cand);
        }
    }
}

template <typename PartnerFn>
StepReport step_particle(const ModelSpec& model, std::span<const double> x_old,
                         std::span<double> x_out, double dt, double cap, double mass,
                         PartnerFn&& partner, std::size_t n_partners, double mf_factor,
                         std::uint64_t seed, std::uint64_t micro_base, int micro_slots,
                         std::uint64_t label, const std::vector<std::size_t>* inverse_labels,
                         std::vector<JumpEvent>* log) {
    thread_local std::vector<Candidate> candidates;
    draw_candidates(model, dt, cap, mass, n_partners, seed, micro_base, micro_slots, label,
                    inverse_labels, candidates);
    return apply_candidates(model, x_old, x_out, dt, candidates,
                            std::forward<PartnerFn>(partner), mf_factor, log);
}

inline void parallel_over(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t)>& body) {
    if (threads <= 1 || n < 2) {
        body(0, n);
        return;
    }
    const std::size_t workers = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& t : pool) t.join();
}

/// Mean-field factors for every particle from the frozen position marginal;
/// O(N^2), recomputed once per step.
inline std::vector<double> mean_field_factors(const ModelSpec& model,
                                              const ParticleSystemState& state,
                                              const EmpiricalMeasure& partner_positions,
                                              int threads) {
    std::vector<double> out(state.size(), 1.0);
    if (model.variant != ModelVariant::MeanFieldEnskog) return out;
    parallel_over(state.size(), threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            auto p = state.point(i);
            out[i] = mean_field_factor(model, Vec3{p[0], p[1], p[2]}, partner_positions);
        }
    });
    return out;
}

}  // namespace euler_detail

/// One step of the interacting particle system: exact Poisson thinning with
/// all coefficients frozen at the step start. Mutates `state` in place and
/// advances the clock by dt.
inline StepReport particle_step(ParticleSystemState& state, double dt, const ModelSpec& model,
                                std::uint64_t seed, const StepOptions& opts = {}) {
    if (dt < 0.0) throw NegativeDuration("particle_step: dt must be nonnegative");
    const std::size_t n = state.size();
    if (state.dim != model.dim) throw DimensionMismatch("particle_step: state/model dimension");
    StepReport report;
    if (dt == 0.0) return report;
    if (opts.event_log && opts.event_log->size() != n) opts.event_log->resize(n);

    const double cap = rate_cap(model);
    const double mass = mu_mass(model);
    const int slots = std::max(1, opts.micro_slots);

    std::vector<std::size_t> inverse;
    if (opts.labels) {
        inverse.resize(n);
        for (std::size_t i = 0; i < n; ++i) inverse[(*opts.labels)[i]] = i;
    }

    std::vector<double> mf(n, 1.0);
    if (model.variant == ModelVariant::MeanFieldEnskog) {
        const EmpiricalMeasure positions = position_marginal(state.measure());
        mf = euler_detail::mean_field_factors(model, state, positions, opts.threads);
    }

    const std::vector<double> frozen = state.coords;
    const int d = state.dim;
    auto partner = [&frozen, d](std::size_t j) {
        return std::span<const double>(frozen.data() + j * d, static_cast<std::size_t>(d));
    };

    std::vector<StepReport> per_particle(n);
    euler_detail::parallel_over(n, opts.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::uint64_t label = opts.labels ? (*opts.labels)[i] : i;
            std::vector<JumpEvent>* log =
                opts.event_log ? &(*opts.event_log)[i] : nullptr;
            per_particle[i] = euler_detail::step_particle(
                model, std::span<const double>(frozen.data() + i * d, d), state.point_mut(i),
                dt, cap, mass, partner, n, mf[i], seed, state.micro_cursor, slots, label,
                opts.labels ? &inverse : nullptr, log);
        }
    });
    for (const auto& r : per_particle) report.merge(r);
    state.clock += dt;
    state.micro_cursor += static_cast<std::uint64_t>(slots);
    return report;
}

/// The one-step endomorphism Theta_{s,t}: initial states from `initial`,
/// partners drawn from `rho`, everything frozen at the step start. In the
/// self-consistent case pass rho = initial.
inline EmpiricalMeasure one_step_theta(const EmpiricalMeasure& rho,
                                       const EmpiricalMeasure& initial, double s, double t,
                                       const ModelSpec& model, std::uint64_t seed,
                                       const StepOptions& opts = {}) {
    if (t < s) throw NegativeDuration("one_step_theta: t must be >= s");
    if (rho.dim() != model.dim || initial.dim() != model.dim)
        throw DimensionMismatch("one_step_theta: measure/model dimension");
    const double dt = t - s;
    if (dt == 0.0) return initial;

    const double cap = rate_cap(model);
    const double mass = mu_mass(model);
    const int slots = std::max(1, opts.micro_slots);
    const std::size_t n = initial.size();
    const int d = model.dim;

    std::vector<double> mf(n, 1.0);
    if (model.variant == ModelVariant::MeanFieldEnskog) {
        const EmpiricalMeasure positions = position_marginal(rho);
        for (std::size_t i = 0; i < n; ++i) {
            auto p = initial.point(i);
            mf[i] = mean_field_factor(model, Vec3{p[0], p[1], p[2]}, positions);
        }
    }

    std::vector<double> out(n * d);
    auto partner = [&rho](std::size_t j) { return rho.point(j); };
    euler_detail::parallel_over(n, opts.threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            euler_detail::step_particle(model, initial.point(i),
                                        std::span<double>(out.data() + i * d, d), dt, cap, mass,
                                        partner, rho.size(), mf[i], seed, 0, slots, i, nullptr,
                                        nullptr);
        }
    });
    return EmpiricalMeasure(std::move(out), d);
}

/// Uniform grid s = s_0 < ... < s_n = t.
struct PartitionSchedule {
    double s = 0.0;
    double t = 0.0;
    int n = 1;

    PartitionSchedule() = default;
    PartitionSchedule(double s_, double t_, int n_) : s(s_), t(t_), n(n_) {
        if (t < s) throw NegativeDuration("PartitionSchedule: t must be >= s");
        if (n < 1) throw SizeMismatch("PartitionSchedule: need at least one step");
    }
    double mesh() const noexcept { return (t - s) / n; }
};

/// Composed scheme over the partition: applies particle_step on each cell and
/// reports one state per grid node (n + 1 entries, the first being the
/// initial state). Deterministic in (state0, schedule, model, seed),
/// independent of thread count.
inline std::vector<ParticleSystemState> simulate(const ParticleSystemState& state0,
                                                 const PartitionSchedule& schedule,
                                                 const ModelSpec& model, std::uint64_t seed,
                                                 const StepOptions& opts = {},
                                                 std::vector<StepReport>* reports = nullptr) {
    std::vector<ParticleSystemState> nodes;
    nodes.reserve(schedule.n + 1);
    ParticleSystemState state = state0;
    nodes.push_back(state);
    const double dt = schedule.mesh();
    for (int k = 0; k < schedule.n; ++k) {
        const StepReport r = particle_step(state, dt, model, seed, opts);
        if (reports) reports->push_back(r);
        nodes.push_back(state);
    }
    return nodes;
}

/// Same composition but keeping only the terminal state.
inline ParticleSystemState simulate_terminal(const ParticleSystemState& state0,
                                             const PartitionSchedule& schedule,
                                             const ModelSpec& model, std::uint64_t seed,
                                             const StepOptions& opts = {}) {
    ParticleSystemState state = state0;
    const double dt = schedule.mesh();
    for (int k = 0; k < schedule.n; ++k) particle_step(state, dt, model, seed, opts);
    return state;
}

/// Seeded initial cloud (one substream per run tag).
inline ParticleSystemState initial_state(const ModelSpec& model, std::size_t n,
                                         std::uint64_t seed, std::uint64_t tag = 0) {
    const Substream st = root_stream(seed).child(0x494e4954ULL).child(tag);
    return ParticleSystemState::from_measure(EmpiricalMeasure::gaussian(n, model.dim, st));
}

}  // namespace kinetic
