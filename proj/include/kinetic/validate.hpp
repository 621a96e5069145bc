#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "kinetic/kernels.hpp"
#include "kinetic/model.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

/// Random-sampling audit of the exact kernel identities.
struct IdentityCheck {
    std::string name;
    bool applicable = true;
    bool expected_pass = true;  // paper_literal conservation is expected to fail
    double max_deviation = 0.0;
    double tolerance = 0.0;
    bool pass = true;
};

struct ValidationReport {
    std::vector<IdentityCheck> checks;
    bool all_as_expected = true;
};

namespace validate_detail {

inline Vec3 random_ball_point(Substream& st, double radius) {
    // rejection inside the cube
    for (;;) {
        Vec3 v{st.uniform(-radius, radius), st.uniform(-radius, radius),
               st.uniform(-radius, radius)};
        if (vec3::norm(v) <= radius) return v;
    }
}

}  // namespace validate_detail

inline ValidationReport validate_kernels(const ModelSpec& model, std::size_t samples,
                                         std::uint64_t seed) {
    ValidationReport report;
    Substream st = root_stream(seed).child(0x56414c44ULL);
    const double radius = 2.0 * model.gamma_cap;

    auto add = [&report](IdentityCheck c) {
        c.pass = c.applicable ? (c.max_deviation <= c.tolerance) : true;
        report.checks.push_back(c);
        if (c.applicable && c.pass != c.expected_pass) report.all_as_expected = false;
    };

    if (!model.angular()) {
        IdentityCheck na;
        na.name = "frame_and_angular_identities";
        na.applicable = false;
        add(na);
        // rate cap audit still applies
        IdentityCheck cap{.name = "rate_cap_dominates_gamma", .tolerance = 0.0};
        const double rc = rate_cap(model);
        for (std::size_t i = 0; i < samples; ++i) {
            const Point v{st.uniform(-10, 10)}, x{st.uniform(-10, 10)};
            cap.max_deviation = std::max(cap.max_deviation, rate_gamma(model, v, x) - rc);
        }
        add(cap);
        return report;
    }

    IdentityCheck trunc{.name = "truncation_contraction", .tolerance = 1e-12};
    IdentityCheck frame_check{.name = "frame_orthonormality", .tolerance = 1e-10};
    IdentityCheck norm_id{.name = "deflection_norm_identity", .tolerance = 1e-10};
    IdentityCheck convention{.name = "convention_inner_product", .tolerance = 1e-10};
    IdentityCheck conservation{.name = "pairwise_conservation", .tolerance = 1e-10};
    conservation.expected_pass = model.convention == SignConvention::energy;
    IdentityCheck cap{.name = "rate_cap_dominates_gamma", .tolerance = 0.0};
    IdentityCheck angular_range{.name = "angular_sample_range", .tolerance = 0.0};

    const double rc = rate_cap(model);
    const int off = model.phase_space() ? 3 : 0;
    EmpiricalMeasure aux_cloud =
        EmpiricalMeasure::gaussian(64, 3, root_stream(seed).child(7));

    for (std::size_t i = 0; i < samples; ++i) {
        const Vec3 v = validate_detail::random_ball_point(st, radius);
        const Vec3 x = validate_detail::random_ball_point(st, radius);
        const AngularParams z = sample_angular(model, st);

        angular_range.max_deviation = std::max(
            {angular_range.max_deviation, model.zeta_min - z.zeta, z.zeta - std::numbers::pi});

        // truncation: contraction and norm bound
        const Vec3 w = validate_detail::random_ball_point(st, radius);
        const Vec3 hv = truncate3(v, model.gamma_cap), hw = truncate3(w, model.gamma_cap);
        trunc.max_deviation =
            std::max({trunc.max_deviation,
                      vec3::norm(vec3::sub(hv, hw)) - vec3::norm(vec3::sub(v, w)),
                      vec3::norm(hv) - model.gamma_cap});

        if (vec3::norm(v) > 0.0) {
            const auto [fi, fj] = frame(v);
            const double n = vec3::norm(v);
            frame_check.max_deviation = std::max(
                {frame_check.max_deviation, std::abs(vec3::dot(fi, v)) / n,
                 std::abs(vec3::dot(fj, v)) / n, std::abs(vec3::dot(fi, fj)) / n,
                 std::abs(vec3::norm(fi) - n), std::abs(vec3::norm(fj) - n)});
        }

        // assemble full states for phase-space models
        Point vp(model.dim, 0.0), xp(model.dim, 0.0);
        if (model.phase_space()) {
            const Vec3 vpos = validate_detail::random_ball_point(st, radius);
            const Vec3 xpos = validate_detail::random_ball_point(st, radius);
            for (int k = 0; k < 3; ++k) {
                vp[k] = vpos[k];
                xp[k] = xpos[k];
            }
        }
        for (int k = 0; k < 3; ++k) {
            vp[off + k] = v[k];
            xp[off + k] = x[k];
        }

        const Point c = collision_c(model, vp, z, xp);
        const Vec3 cv{c[off], c[off + 1], c[off + 2]};
        const Vec3 rel = vec3::sub(truncate3(v, model.gamma_cap), truncate3(x, model.gamma_cap));
        double beta = 1.0;
        if (model.variant == ModelVariant::Enskog)
            beta = enskog_beta(model, Vec3{vp[0], vp[1], vp[2]}, Vec3{xp[0], xp[1], xp[2]});
        norm_id.max_deviation =
            std::max(norm_id.max_deviation,
                     std::abs(vec3::norm(cv) -
                              beta * std::sin(0.5 * z.zeta) * vec3::norm(rel)));

        // <c, H(x) - H(v)> = -|c|^2 (energy) or +|c|^2 (paper_literal), beta = 1 case
        if (model.variant != ModelVariant::Enskog || beta == 1.0) {
            const double ip = vec3::dot(cv, vec3::scale(rel, -1.0));
            const double c2 = vec3::dot(cv, cv);
            convention.max_deviation = std::max(
                convention.max_deviation,
                std::abs(model.convention == SignConvention::energy ? ip + c2 : ip - c2));
        }

        // pairwise conservation on untruncated inputs
        if (vec3::norm(v) <= model.gamma_cap && vec3::norm(x) <= model.gamma_cap &&
            (model.variant != ModelVariant::Enskog || beta == 1.0)) {
            const Vec3 xprime{x[0] + cv[0], x[1] + cv[1], x[2] + cv[2]};
            const Vec3 vprime{v[0] - cv[0], v[1] - cv[1], v[2] - cv[2]};
            const double energy = vec3::dot(xprime, xprime) + vec3::dot(vprime, vprime) -
                                  vec3::dot(x, x) - vec3::dot(v, v);
            double mom = 0.0;
            for (int k = 0; k < 3; ++k)
                mom = std::max(mom, std::abs(xprime[k] + vprime[k] - x[k] - v[k]));
            conservation.max_deviation =
                std::max({conservation.max_deviation, std::abs(energy), mom});
        }

        const EmpiricalMeasure* aux =
            model.variant == ModelVariant::MeanFieldEnskog ? &aux_cloud : nullptr;
        cap.max_deviation = std::max(cap.max_deviation, rate_gamma(model, vp, xp, aux) - rc);
    }

    add(trunc);
    add(frame_check);
    add(norm_id);
    add(convention);
    add(conservation);
    add(cap);
    add(angular_range);
    return report;
}

}  // namespace kinetic
