#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "kinetic/errors.hpp"
#include "kinetic/kernels.hpp"
#include "kinetic/measure.hpp"
#include "kinetic/model.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

/// Bounded C^1 test functions with bounded gradient (tanh family).
struct TestFunction {
    enum class Kind { TanhCoordinate, ProductTanh, Constant };

    Kind kind = Kind::Constant;
    int index = 0;        // coordinate for TanhCoordinate
    double lambda = 1.0;  // slope parameter

    static TestFunction tanh_coordinate(int i, double lam) {
        return {Kind::TanhCoordinate, i, lam};
    }
    static TestFunction product_tanh(double lam) { return {Kind::ProductTanh, 0, lam}; }
    static TestFunction constant() { return {Kind::Constant, 0, 0.0}; }

    double operator()(std::span<const double> x) const {
        switch (kind) {
            case Kind::TanhCoordinate: return std::tanh(lambda * x[index]);
            case Kind::ProductTanh: {
                double p = 1.0;
                for (double c : x) p *= std::tanh(lambda * c);
                return p;
            }
            case Kind::Constant: return 1.0;
        }
        return 0.0;
    }

    Point gradient(std::span<const double> x) const {
        Point g(x.size(), 0.0);
        switch (kind) {
            case Kind::TanhCoordinate: {
                const double t = std::tanh(lambda * x[index]);
                g[index] = lambda * (1.0 - t * t);
                break;
            }
            case Kind::ProductTanh: {
                std::vector<double> t(x.size());
                for (std::size_t k = 0; k < x.size(); ++k) t[k] = std::tanh(lambda * x[k]);
                for (std::size_t k = 0; k < x.size(); ++k) {
                    double p = lambda * (1.0 - t[k] * t[k]);
                    for (std::size_t j = 0; j < x.size(); ++j)
                        if (j != k) p *= t[j];
                    g[k] = p;
                }
                break;
            }
            case Kind::Constant: break;
        }
        return g;
    }

    double grad_sup() const {
        return kind == Kind::Constant ? 0.0 : std::abs(lambda);
    }

    std::string name() const {
        switch (kind) {
            case Kind::TanhCoordinate:
                return "tanh(" + std::to_string(lambda) + "*x" + std::to_string(index + 1) + ")";
            case Kind::ProductTanh: return "prod_tanh(" + std::to_string(lambda) + ")";
            case Kind::Constant: return "constant";
        }
        return "?";
    }
};

namespace quad {

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
inline void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.resize(n);
    weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

}  // namespace quad

/// Precomputed tensor rule for integrals against zeta^{-(1+nu)} dzeta dphi on
/// [zeta_min, pi] x [0, 2pi). The substitution w = zeta^{-nu} turns the zeta
/// weight into a constant, so Gauss-Legendre applies cleanly; the azimuth uses
/// the midpoint rule (the integrand is 2pi-periodic).
struct AngularQuadrature {
    std::vector<double> zeta, wz;       // zeta nodes and their measure weights
    std::vector<double> cphi, sphi;     // azimuth cos/sin
    double phi_weight = 0.0;

    AngularQuadrature(const ModelSpec& m, int n_quad) {
        if (n_quad < 8) throw QuadratureUnderResolved("AngularQuadrature: n_quad must be >= 8");
        const double lo = std::pow(std::numbers::pi, -m.nu);
        const double hi = std::pow(m.zeta_min, -m.nu);
        std::vector<double> gl_x, gl_w;
        quad::gauss_legendre(n_quad, gl_x, gl_w);
        zeta.resize(n_quad);
        wz.resize(n_quad);
        for (int q = 0; q < n_quad; ++q) {
            const double w = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl_x[q];
            zeta[q] = std::pow(w, -1.0 / m.nu);
            wz[q] = gl_w[q] * 0.5 * (hi - lo) / m.nu;
        }
        cphi.resize(n_quad);
        sphi.resize(n_quad);
        for (int b = 0; b < n_quad; ++b) {
            const double phi = 2.0 * std::numbers::pi * (b + 0.5) / n_quad;
            cphi[b] = std::cos(phi);
            sphi[b] = std::sin(phi);
        }
        phi_weight = 2.0 * std::numbers::pi / n_quad;
    }

    double mass() const {
        double s = 0.0;
        for (double w : wz) s += w;
        return s * 2.0 * std::numbers::pi;
    }
};

namespace weak_detail {

/// integral over E of (phi(x + c(v, z, x)) - phi(x)) mu(dz) for an angular
/// model, on a prepared rule. The frame of v - x is built once per pair.
template <typename Phi>
double angular_jump_integral(const ModelSpec& m, const Phi& phi, std::span<const double> v,
                             std::span<const double> x, const AngularQuadrature& rule) {
    const int off = m.phase_space() ? 3 : 0;
    const Vec3 vt = truncate3(Vec3{v[off], v[off + 1], v[off + 2]}, m.gamma_cap);
    const Vec3 xt = truncate3(Vec3{x[off], x[off + 1], x[off + 2]}, m.gamma_cap);
    const Vec3 rel = vec3::sub(vt, xt);
    if (rel[0] == 0.0 && rel[1] == 0.0 && rel[2] == 0.0) return 0.0;
    const auto [fi, fj] = frame(rel);
    const double beta = (m.variant == ModelVariant::Enskog)
                            ? enskog_beta(m, Vec3{v[0], v[1], v[2]}, Vec3{x[0], x[1], x[2]})
                            : 1.0;
    const double sign = (m.convention == SignConvention::energy) ? 1.0 : -1.0;
    const double phi_x = phi(x);

    Point shifted(x.begin(), x.end());
    double total = 0.0;
    for (std::size_t q = 0; q < rule.zeta.size(); ++q) {
        const double drift = sign * 0.5 * (1.0 - std::cos(rule.zeta[q]));
        const double sd = 0.5 * std::sin(rule.zeta[q]);
        double az_sum = 0.0;
        for (std::size_t b = 0; b < rule.cphi.size(); ++b) {
            for (int k = 0; k < 3; ++k) {
                const double dk = rule.cphi[b] * fi[k] + rule.sphi[b] * fj[k];
                shifted[off + k] = x[off + k] + beta * (drift * rel[k] + sd * dk);
            }
            az_sum += phi(shifted) - phi_x;
        }
        total += rule.wz[q] * az_sum;
    }
    return total * rule.phi_weight;
}

/// Fixed-shape pairwise tree sum; deterministic and numerically stable.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

}  // namespace weak_detail

/// Jump functional Lambda_phi(v, x, rho) = gamma(v, x, rho) *
/// integral over E of (phi(x + c(v, z, x)) - phi(x)) mu(dz).
inline double lambda_phi(const ModelSpec& model, const TestFunction& phi,
                         std::span<const double> v, std::span<const double> x,
                         const EmpiricalMeasure* aux = nullptr, int n_quad = 32) {
    if (model.variant == ModelVariant::Synthetic1D) {
        const Point jump{x[0] + model.kappa * (v[0] - x[0])};
        return model.g * (phi(jump) - phi(x));
    }
    const AngularQuadrature rule(model, n_quad);
    const double gamma = rate_gamma(model, v, x, aux);
    if (gamma == 0.0) return 0.0;
    return gamma * weak_detail::angular_jump_integral(model, phi, v, x, rule);
}

/// lambda_phi with a convergence check: doubling n_quad must move the value
/// by at most `tolerance`.
inline double lambda_phi_checked(const ModelSpec& model, const TestFunction& phi,
                                 std::span<const double> v, std::span<const double> x,
                                 const EmpiricalMeasure* aux, int n_quad, double tolerance) {
    const double coarse = lambda_phi(model, phi, v, x, aux, n_quad);
    const double fine = lambda_phi(model, phi, v, x, aux, 2 * n_quad);
    if (std::abs(fine - coarse) > tolerance)
        throw QuadratureUnderResolved("lambda_phi: doubling n_quad moved the value by " +
                                      std::to_string(std::abs(fine - coarse)));
    return fine;
}

struct ResidualOptions {
    int n_quad = 12;
    /// Full U-statistic when N^2 <= full_pair_limit; otherwise each x_i is
    /// paired with `partners` substream-drawn columns (incomplete U-statistic,
    /// noise well inside the N^{-1/2} budget term).
    std::size_t full_pair_limit = 4'000'000;
    std::size_t partners = 512;
    std::uint64_t seed = 0x57454b52ULL;
};

struct ResidualReport {
    struct PerFunction {
        std::string phi;
        std::vector<double> residual_series;  // residual at every snapshot time
        double max_residual = 0.0;
    };
    std::vector<PerFunction> functions;
    std::vector<double> times;
    double max_residual = 0.0;
};

/// Residual of the weak equation along a simulated trajectory: for each test
/// function, |int phi df_t - int phi drho - int_0^t [drift + Lambda_phi]| with
/// left-endpoint time integration on the snapshot grid and the pair average
/// (1/N^2) sum Lambda_phi(v_j, x_i) at each node.
inline ResidualReport weak_residual(const std::vector<EmpiricalMeasure>& trajectory,
                                    const std::vector<double>& times, const ModelSpec& model,
                                    const std::vector<TestFunction>& phi_set,
                                    const ResidualOptions& opts = {}) {
    if (trajectory.size() != times.size() || trajectory.size() < 2)
        throw SizeMismatch("weak_residual: need a time-ordered trajectory with times");
    const std::size_t n_nodes = trajectory.size();
    const std::size_t n_phi = phi_set.size();

    ResidualReport report;
    report.times = times;
    report.functions.resize(n_phi);
    for (std::size_t f = 0; f < n_phi; ++f) {
        report.functions[f].phi = phi_set[f].name();
        report.functions[f].residual_series.assign(n_nodes, 0.0);
    }

    const bool angular = model.angular();
    const AngularQuadrature* rule_ptr = nullptr;
    AngularQuadrature rule = angular ? AngularQuadrature(model, opts.n_quad)
                                     : AngularQuadrature(ModelSpec::boltzmann3d(0.5, 0.5, 1, 0.5),
                                                         8);  // placeholder, unused
    if (angular) rule_ptr = &rule;

    // phi averages at every node
    std::vector<std::vector<double>> phi_mean(n_phi, std::vector<double>(n_nodes, 0.0));
    for (std::size_t k = 0; k < n_nodes; ++k) {
        const auto& mu = trajectory[k];
        std::vector<double> vals(mu.size());
        for (std::size_t f = 0; f < n_phi; ++f) {
            for (std::size_t i = 0; i < mu.size(); ++i) vals[i] = phi_set[f](mu.point(i));
            phi_mean[f][k] = weak_detail::pairwise_sum(vals) / static_cast<double>(mu.size());
        }
    }

    // accumulated generator terms, left endpoint
    std::vector<std::vector<double>> integral(n_phi, std::vector<double>(n_nodes, 0.0));
    const bool has_drift = model.phase_space() ||
                           (model.variant == ModelVariant::Synthetic1D &&
                            (model.b0 != 0.0 || model.b1 != 0.0));
    for (std::size_t k = 0; k + 1 < n_nodes; ++k) {
        const auto& mu = trajectory[k];
        const std::size_t n = mu.size();
        const double dt = times[k + 1] - times[k];

        std::vector<double> mf(n, 1.0);
        if (model.variant == ModelVariant::MeanFieldEnskog) {
            const EmpiricalMeasure positions = position_marginal(mu);
            for (std::size_t i = 0; i < n; ++i) {
                auto p = mu.point(i);
                mf[i] = mean_field_factor(model, Vec3{p[0], p[1], p[2]}, positions);
            }
        }

        const bool full = n * n <= opts.full_pair_limit;
        const std::size_t m_partners = full ? n : opts.partners;
        std::vector<double> row(n, 0.0), inner(m_partners, 0.0);
        for (std::size_t f = 0; f < n_phi; ++f) {
            const TestFunction& phi = phi_set[f];
            for (std::size_t i = 0; i < n; ++i) {
                auto x = mu.point(i);
                Substream pick =
                    root_stream(opts.seed).child(k, i);  // partner columns, incomplete case
                for (std::size_t c = 0; c < m_partners; ++c) {
                    const std::size_t j = full ? c : pick.uniform_index(n);
                    auto v = mu.point(j);
                    double lam;
                    if (model.variant == ModelVariant::Synthetic1D) {
                        const Point jump{x[0] + model.kappa * (v[0] - x[0])};
                        lam = model.g * (phi(jump) - phi(x));
                    } else {
                        const double gamma = speed_rate(model, v, x) * mf[i];
                        lam = (gamma == 0.0)
                                  ? 0.0
                                  : gamma * weak_detail::angular_jump_integral(model, phi, v, x,
                                                                               *rule_ptr);
                    }
                    inner[c] = lam;
                }
                row[i] = weak_detail::pairwise_sum(inner) / static_cast<double>(m_partners);
            }
            double term = weak_detail::pairwise_sum(row) / static_cast<double>(n);
            if (has_drift) {
                std::vector<double> drift_terms(n);
                for (std::size_t i = 0; i < n; ++i) {
                    auto x = mu.point(i);
                    const Point b = drift_b(model, x);
                    const Point grad = phi.gradient(x);
                    double s = 0.0;
                    for (std::size_t c2 = 0; c2 < b.size(); ++c2) s += b[c2] * grad[c2];
                    drift_terms[i] = s;
                }
                term += weak_detail::pairwise_sum(drift_terms) / static_cast<double>(n);
            }
            for (std::size_t l = k + 1; l < n_nodes; ++l) integral[f][l] += term * dt;
        }
    }

    for (std::size_t f = 0; f < n_phi; ++f) {
        auto& pf = report.functions[f];
        for (std::size_t k = 0; k < n_nodes; ++k) {
            pf.residual_series[k] = phi_mean[f][k] - phi_mean[f][0] - integral[f][k];
            pf.max_residual = std::max(pf.max_residual, std::abs(pf.residual_series[k]));
        }
        report.max_residual = std::max(report.max_residual, pf.max_residual);
    }
    return report;
}

/// Closed-form moments of the synthetic model: the mean is constant and the
/// variance solves dVar/dt = 2 g kappa (kappa - 1) Var.
inline std::pair<double, double> moment_ode_oracle(double kappa, double g, double mean0,
                                                   double var0, double t) {
    if (var0 < 0.0 || t < 0.0)
        throw std::invalid_argument("moment_ode_oracle: need var0 >= 0 and t >= 0");
    return {mean0, var0 * std::exp(2.0 * g * kappa * (kappa - 1.0) * t)};
}

}  // namespace kinetic
