#pragma once

#include <set>
#include <string>

#include <json.hpp>

#include "kinetic/errors.hpp"
#include "kinetic/flow.hpp"
#include "kinetic/measure.hpp"
#include "kinetic/model.hpp"
#include "kinetic/validate.hpp"
#include "kinetic/weakform.hpp"

namespace kinetic {

using nlohmann::json;

inline json model_to_json(const ModelSpec& m) {
    return json{{"variant", to_string(m.variant)},
                {"a", m.a},
                {"nu", m.nu},
                {"gamma_cap", m.gamma_cap},
                {"zeta_min", m.zeta_min},
                {"R", m.R},
                {"beta", "smoothstep"},
                {"kappa", m.kappa},
                {"g", m.g},
                {"convention", to_string(m.convention)},
                {"dim", m.dim}};
}

inline ModelSpec model_from_json(const json& j) {
    static const std::set<std::string> known{"variant", "a",     "nu",    "gamma_cap",
                                             "zeta_min", "R",    "beta",  "kappa",
                                             "g",        "convention", "dim"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw ConfigError("model: unknown key '" + it.key() + "'");
    ModelSpec m;
    const std::string variant = j.at("variant").get<std::string>();
    if (variant == "Synthetic1D")
        m.variant = ModelVariant::Synthetic1D;
    else if (variant == "Boltzmann3D")
        m.variant = ModelVariant::Boltzmann3D;
    else if (variant == "Enskog")
        m.variant = ModelVariant::Enskog;
    else if (variant == "MeanFieldEnskog")
        m.variant = ModelVariant::MeanFieldEnskog;
    else
        throw ConfigError("model: unknown variant '" + variant + "'");
    m.a = j.value("a", 0.0);
    m.nu = j.value("nu", 0.5);
    m.gamma_cap = j.value("gamma_cap", 1.0);
    m.zeta_min = j.value("zeta_min", 0.1);
    m.R = j.value("R", 1.0);
    m.kappa = j.value("kappa", 0.0);
    m.g = j.value("g", 0.0);
    if (j.contains("beta") && j.at("beta").get<std::string>() != "smoothstep")
        throw ConfigError("model: only the smoothstep localization is supported");
    const std::string conv = j.value("convention", "energy");
    if (conv == "energy")
        m.convention = SignConvention::energy;
    else if (conv == "paper_literal")
        m.convention = SignConvention::paper_literal;
    else
        throw ConfigError("model: unknown convention '" + conv + "'");
    m.dim = j.value("dim", m.angular() ? (m.phase_space() ? 6 : 3) : 1);

    const int expected_dim = m.phase_space() ? 6 : (m.angular() ? 3 : 1);
    if (m.dim != expected_dim) throw ConfigError("model: dim inconsistent with variant");
    if (m.variant == ModelVariant::Synthetic1D) {
        if (m.g < 0.0) throw ConfigError("model: g must be nonnegative");
    } else {
        if (m.a < 0.0 || m.a > 1.0) throw ConfigError("model: a must lie in [0, 1]");
        if (m.nu <= 0.0 || m.nu >= 1.0) throw ConfigError("model: nu must lie in (0, 1)");
        if (m.gamma_cap < 1.0) throw ConfigError("model: gamma_cap must be >= 1");
        if (m.zeta_min <= 0.0 || m.zeta_min >= std::numbers::pi)
            throw ConfigError("model: zeta_min must lie in (0, pi)");
        if (m.phase_space() && m.R <= 0.0) throw ConfigError("model: R must be positive");
    }
    return m;
}

inline json measure_to_json(const EmpiricalMeasure& mu) {
    json rows = json::array();
    for (std::size_t i = 0; i < mu.size(); ++i) {
        json row = json::array();
        for (double c : mu.point(i)) row.push_back(c);
        rows.push_back(std::move(row));
    }
    return rows;
}

inline EmpiricalMeasure measure_from_json(const json& rows) {
    std::vector<Point> pts;
    pts.reserve(rows.size());
    for (const auto& row : rows) pts.push_back(row.get<Point>());
    return EmpiricalMeasure::from_points(pts);
}

inline json rate_report_to_json(const RateReport& r) {
    json pairs = json::array();
    for (auto [res, err] : r.pairs) pairs.push_back(json::array({res, err}));
    return json{{"pairs", std::move(pairs)},
                {"slope", r.slope},
                {"intercept", r.intercept},
                {"r_squared", r.r_squared},
                {"floor", r.floor},
                {"normalized_errors", r.normalized_errors}};
}

inline json residual_report_to_json(const ResidualReport& r) {
    json fns = json::array();
    for (const auto& f : r.functions)
        fns.push_back(json{{"phi", f.phi},
                           {"residual_series", f.residual_series},
                           {"max_residual", f.max_residual}});
    return json{{"times", r.times}, {"functions", std::move(fns)},
                {"max_residual", r.max_residual}};
}

inline json validation_report_to_json(const ValidationReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks)
        checks.push_back(json{{"name", c.name},
                              {"applicable", c.applicable},
                              {"expected_pass", c.expected_pass},
                              {"max_deviation", c.max_deviation},
                              {"tolerance", c.tolerance},
                              {"pass", c.pass}});
    return json{{"checks", std::move(checks)}, {"all_as_expected", r.all_as_expected}};
}

}  // namespace kinetic
