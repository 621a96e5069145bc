#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include "kinetic/errors.hpp"
#include "kinetic/measure.hpp"
#include "kinetic/model.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

/// Deflection angle and azimuth, z = (zeta, phi) in [zeta_min, pi] x [0, 2pi).
struct AngularParams {
    double zeta = 0.0;
    double phi = 0.0;
};

using Vec3 = std::array<double, 3>;

namespace vec3 {

inline double dot(const Vec3& a, const Vec3& b) noexcept {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) noexcept { return std::sqrt(dot(a, a)); }
inline Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline Vec3 sub(const Vec3& a, const Vec3& b) noexcept {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 scale(const Vec3& a, double s) noexcept { return {a[0] * s, a[1] * s, a[2] * s}; }

}  // namespace vec3

/// Radial projection H_Gamma onto the ball of radius Gamma; 1-Lipschitz,
/// H_Gamma(0) = 0.
inline Vec3 truncate3(const Vec3& v, double gamma_cap) noexcept {
    const double n = vec3::norm(v);
    if (n <= gamma_cap || n == 0.0) return v;
    return vec3::scale(v, gamma_cap / n);
}

inline Point truncate(std::span<const double> v, double gamma_cap) {
    double n = 0.0;
    for (double c : v) n += c * c;
    n = std::sqrt(n);
    Point out(v.begin(), v.end());
    if (n > gamma_cap && n > 0.0)
        for (double& c : out) c *= gamma_cap / n;
    return out;
}

/// Orthogonal frame completing X: I . X = J . X = I . J = 0 and
/// |I| = |J| = |X|. The reference axis is the standard basis vector with the
/// smallest |X_k| (lowest index on ties), which keeps the construction
/// deterministic and well conditioned away from zero.
inline std::pair<Vec3, Vec3> frame(const Vec3& x) {
    const double n = vec3::norm(x);
    if (n == 0.0) throw ZeroVector("frame: zero vector has no orthogonal frame");
    int axis = 0;
    double best = std::abs(x[0]);
    for (int k = 1; k < 3; ++k) {
        if (std::abs(x[k]) < best) {
            best = std::abs(x[k]);
            axis = k;
        }
    }
    Vec3 e{0.0, 0.0, 0.0};
    e[axis] = 1.0;
    Vec3 i = vec3::cross(x, e);
    i = vec3::scale(i, n / vec3::norm(i));
    Vec3 j = vec3::scale(vec3::cross(x, i), 1.0 / n);
    return {i, j};
}

/// Delta(X, phi) = cos(phi) I(X) + sin(phi) J(X); orthogonal to X with the
/// same norm, and Delta(0, .) = 0.
inline Vec3 delta(const Vec3& x, double phi) {
    if (x[0] == 0.0 && x[1] == 0.0 && x[2] == 0.0) return {0.0, 0.0, 0.0};
    const auto [i, j] = frame(x);
    const double c = std::cos(phi), s = std::sin(phi);
    return {c * i[0] + s * j[0], c * i[1] + s * j[1], c * i[2] + s * j[2]};
}

/// Three-dimensional deflection on already-truncated inputs. Under the energy
/// convention the drift term is +(1-cos zeta)/2 (v - x); paper_literal keeps
/// the printed minus sign. Either way |c| = sin(zeta/2) |v - x|.
inline Vec3 deflection3(const Vec3& v_trunc, const AngularParams& z, const Vec3& x_trunc,
                        SignConvention conv) {
    const Vec3 rel = vec3::sub(v_trunc, x_trunc);
    if (rel[0] == 0.0 && rel[1] == 0.0 && rel[2] == 0.0) return {0.0, 0.0, 0.0};
    const double drift = 0.5 * (1.0 - std::cos(z.zeta));
    const double sign = (conv == SignConvention::energy) ? 1.0 : -1.0;
    const Vec3 d = delta(rel, z.phi);
    const double sd = 0.5 * std::sin(z.zeta);
    return {sign * drift * rel[0] + sd * d[0], sign * drift * rel[1] + sd * d[1],
            sign * drift * rel[2] + sd * d[2]};
}

/// Smoothstep localization i_R: 1 on [0, R], 0 on [2R, inf), cubic Hermite on
/// the ramp.
inline double smoothstep_ir(double r, double R) noexcept {
    if (r <= R) return 1.0;
    if (r >= 2.0 * R) return 0.0;
    const double t = (r - R) / R;
    return 1.0 - t * t * (3.0 - 2.0 * t);
}

namespace kernel_detail {

inline Vec3 take3(std::span<const double> p, int offset) noexcept {
    return {p[offset], p[offset + 1], p[offset + 2]};
}

/// Velocity-block offset within a state vector (0 for homogeneous models,
/// 3 for phase-space models where positions come first).
inline int vel_offset(const ModelSpec& m) noexcept { return m.phase_space() ? 3 : 0; }

}  // namespace kernel_detail

/// Localization factor beta for the Enskog kernel, evaluated on truncated
/// positions.
inline double enskog_beta(const ModelSpec& m, const Vec3& v_pos, const Vec3& x_pos) noexcept {
    const Vec3 vp = truncate3(v_pos, m.gamma_cap);
    const Vec3 xp = truncate3(x_pos, m.gamma_cap);
    return smoothstep_ir(vec3::norm(vec3::sub(xp, vp)), m.R);
}

/// Deflection applied to the typical particle. `v` and `x` are full states
/// (velocity for homogeneous models, position then velocity for phase-space
/// models); the returned vector has the same dimension as the state.
inline Point collision_c(const ModelSpec& m, std::span<const double> v, const AngularParams& z,
                         std::span<const double> x) {
    if (m.variant == ModelVariant::Synthetic1D) return {m.kappa * (v[0] - x[0])};
    const int off = kernel_detail::vel_offset(m);
    const Vec3 vt = truncate3(kernel_detail::take3(v, off), m.gamma_cap);
    const Vec3 xt = truncate3(kernel_detail::take3(x, off), m.gamma_cap);
    Vec3 c = deflection3(vt, z, xt, m.convention);
    if (m.variant == ModelVariant::Enskog) {
        const double beta =
            enskog_beta(m, kernel_detail::take3(v, 0), kernel_detail::take3(x, 0));
        c = vec3::scale(c, beta);
    }
    Point out(static_cast<std::size_t>(m.dim), 0.0);
    for (int k = 0; k < 3; ++k) out[off + k] = c[k];
    return out;
}

/// First three coordinates of every point; the position marginal of a
/// phase-space measure.
inline EmpiricalMeasure position_marginal(const EmpiricalMeasure& mu) {
    std::vector<double> flat;
    flat.reserve(mu.size() * 3);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.point(i);
        flat.insert(flat.end(), p.begin(), p.begin() + 3);
    }
    return EmpiricalMeasure(std::move(flat), 3);
}

/// Mean-field rate factor (1/M) sum_j p_R(xbar - xbar_j) over a position
/// marginal.
inline double mean_field_factor(const ModelSpec& m, const Vec3& x_pos,
                                const EmpiricalMeasure& positions) {
    const double inv_two_r2 = 1.0 / (2.0 * m.R * m.R);
    const double sup = gaussian_kernel_sup(m.R);
    double s = 0.0;
    for (std::size_t j = 0; j < positions.size(); ++j) {
        auto p = positions.point(j);
        const double dx = x_pos[0] - p[0], dy = x_pos[1] - p[1], dz = x_pos[2] - p[2];
        s += std::exp(-(dx * dx + dy * dy + dz * dz) * inv_two_r2);
    }
    return sup * s / static_cast<double>(positions.size());
}

/// Relative-speed part of the rate, |H_Gamma(v) - H_Gamma(x)|^a on the
/// velocity blocks (constant g for the synthetic model, 1 for Maxwell
/// molecules). The mean-field variant multiplies this by a position factor.
inline double speed_rate(const ModelSpec& m, std::span<const double> v,
                         std::span<const double> x) {
    if (m.variant == ModelVariant::Synthetic1D) return m.g;
    const int off = kernel_detail::vel_offset(m);
    const Vec3 vt = truncate3(kernel_detail::take3(v, off), m.gamma_cap);
    const Vec3 xt = truncate3(kernel_detail::take3(x, off), m.gamma_cap);
    if (m.a == 0.0) return 1.0;
    return std::pow(vec3::norm(vec3::sub(vt, xt)), m.a);
}

/// Jump rate gamma(v, x). For the mean-field variant `aux` must carry the
/// frozen position marginal.
inline double rate_gamma(const ModelSpec& m, std::span<const double> v,
                         std::span<const double> x, const EmpiricalMeasure* aux = nullptr) {
    if (m.variant == ModelVariant::MeanFieldEnskog) {
        if (aux == nullptr)
            throw MissingAux("rate_gamma: mean-field variant needs the position marginal");
        return speed_rate(m, v, x) * mean_field_factor(m, kernel_detail::take3(x, 0), *aux);
    }
    return speed_rate(m, v, x);
}

/// Drift coefficient b(x). Phase-space models move positions by velocities;
/// the homogeneous Boltzmann model has b = 0; the synthetic model allows an
/// affine drift for Lipschitz tests.
inline Point drift_b(const ModelSpec& m, std::span<const double> state) {
    if (static_cast<int>(state.size()) != m.dim)
        throw DimensionMismatch("drift_b: state dimension does not match model");
    switch (m.variant) {
        case ModelVariant::Synthetic1D: return {m.b0 + m.b1 * state[0]};
        case ModelVariant::Boltzmann3D: return {0.0, 0.0, 0.0};
        case ModelVariant::Enskog:
        case ModelVariant::MeanFieldEnskog:
            return {state[3], state[4], state[5], 0.0, 0.0, 0.0};
    }
    return Point(state.size(), 0.0);
}

/// Inverse-CDF draw of zeta from the density proportional to zeta^{-(1+nu)}
/// on [zeta_min, pi]; phi uniform on [0, 2pi).
inline AngularParams sample_angular(const ModelSpec& m, Substream& stream) {
    if (!(m.zeta_min < std::numbers::pi))
        throw DegenerateCutoff("sample_angular: zeta_min must be below pi");
    const double u = stream.next_double();
    const double phi = stream.uniform(0.0, 2.0 * std::numbers::pi);
    const double lo = std::pow(m.zeta_min, -m.nu);
    const double hi = std::pow(std::numbers::pi, -m.nu);
    const double zeta = std::pow(lo - u * (lo - hi), -1.0 / m.nu);
    return {zeta, phi};
}

/// Quantile of the zeta marginal, exposed for distribution tests.
inline double angular_quantile(const ModelSpec& m, double u) {
    const double lo = std::pow(m.zeta_min, -m.nu);
    const double hi = std::pow(std::numbers::pi, -m.nu);
    return std::pow(lo - u * (lo - hi), -1.0 / m.nu);
}

}  // namespace kinetic
