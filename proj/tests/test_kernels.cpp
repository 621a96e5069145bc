#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "kinetic/kernels.hpp"
#include "kinetic/validate.hpp"

using namespace kinetic;

namespace {
const double kPi = std::numbers::pi;

ModelSpec boltz(double a = 0.5, double nu = 0.5, double cap = 2.0, double zeta_min = 0.2,
                SignConvention conv = SignConvention::energy) {
    return ModelSpec::boltzmann3d(a, nu, cap, zeta_min, conv);
}
}  // namespace

TEST_CASE("truncation is the radial projection") {
    CHECK(truncate3({3, 0, 0}, 2.0) == Vec3{2, 0, 0});
    CHECK(truncate3({0.5, 0.5, 0.5}, 2.0) == Vec3{0.5, 0.5, 0.5});
    const Vec3 t = truncate3({3, 4, 0}, 1.0);
    CHECK(t[0] == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(t[1] == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(t[2] == 0.0);
    CHECK(truncate3({0, 0, 0}, 1.0) == Vec3{0, 0, 0});

    // span overload matches
    const Point p = truncate(std::vector<double>{3, 4, 0}, 1.0);
    CHECK(p[0] == doctest::Approx(0.6));

    // contraction on random pairs
    Substream st = root_stream(2).child(0);
    for (int i = 0; i < 20000; ++i) {
        Vec3 v{st.uniform(-4, 4), st.uniform(-4, 4), st.uniform(-4, 4)};
        Vec3 w{st.uniform(-4, 4), st.uniform(-4, 4), st.uniform(-4, 4)};
        const Vec3 hv = truncate3(v, 1.5), hw = truncate3(w, 1.5);
        CHECK(vec3::norm(vec3::sub(hv, hw)) <= vec3::norm(vec3::sub(v, w)) + 1e-12);
        CHECK(vec3::norm(hv) <= 1.5 + 1e-12);
    }
}

TEST_CASE("frame follows the smallest-component rule") {
    const auto [i, j] = frame({1, 0, 0});
    CHECK(i[0] == doctest::Approx(0.0));
    CHECK(i[1] == doctest::Approx(0.0));
    CHECK(i[2] == doctest::Approx(1.0));
    CHECK(j[0] == doctest::Approx(0.0));
    CHECK(j[1] == doctest::Approx(-1.0));
    CHECK(j[2] == doctest::Approx(0.0));

    CHECK_THROWS_AS(frame({0, 0, 0}), ZeroVector);

    Substream st = root_stream(2).child(1);
    for (int k = 0; k < 20000; ++k) {
        Vec3 x{st.uniform(-3, 3), st.uniform(-3, 3), st.uniform(-3, 3)};
        if (vec3::norm(x) < 1e-6) continue;
        const auto [fi, fj] = frame(x);
        const double n = vec3::norm(x);
        CHECK(std::abs(vec3::dot(fi, x)) < 1e-12 * n * n);
        CHECK(std::abs(vec3::dot(fj, x)) < 1e-12 * n * n);
        CHECK(std::abs(vec3::dot(fi, fj)) < 1e-12 * n * n);
        CHECK(std::abs(vec3::norm(fi) - n) < 1e-12 * n);
        CHECK(std::abs(vec3::norm(fj) - n) < 1e-12 * n);
    }
}

TEST_CASE("delta is the rotated orthogonal vector") {
    const Vec3 d = delta({1, 0, 0}, 0.0);
    CHECK(d[0] == doctest::Approx(0.0));
    CHECK(d[2] == doctest::Approx(1.0));
    CHECK(delta({0, 0, 0}, 1.3) == Vec3{0, 0, 0});

    // 64-node midpoint average over phi vanishes componentwise
    const Vec3 x{0.3, -1.2, 0.8};
    Vec3 acc{0, 0, 0};
    const int nodes = 64;
    for (int b = 0; b < nodes; ++b) {
        const double phi = 2.0 * kPi * (b + 0.5) / nodes;
        const Vec3 d2 = delta(x, phi);
        for (int k = 0; k < 3; ++k) acc[k] += d2[k] / nodes;
    }
    for (int k = 0; k < 3; ++k) CHECK(std::abs(acc[k]) < 1e-12);
}

TEST_CASE("collision deflection examples") {
    const auto m = boltz();

    SUBCASE("zero deflection angle") {
        const Point c = collision_c(m, Point{1, 2, 0}, {0.0, 1.0}, Point{0, 0, 0});
        for (double v : c) CHECK(std::abs(v) < 1e-15);
    }

    SUBCASE("head-on exchange under the energy convention") {
        const Point c = collision_c(m, Point{1, 0, 0}, {kPi, 0.7}, Point{0, 0, 0});
        CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(c[1]) < 1e-12);
        CHECK(std::abs(c[2]) < 1e-12);
    }

    SUBCASE("right-angle deflection norm and components") {
        const Point c = collision_c(m, Point{1, 0, 0}, {kPi / 2, 0.0}, Point{0, 0, 0});
        const double nrm = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2]);
        CHECK(nrm == doctest::Approx(std::sin(kPi / 4)).epsilon(1e-10));
        CHECK(c[0] == doctest::Approx(0.5));
        CHECK(c[1] == doctest::Approx(0.0));
        CHECK(c[2] == doctest::Approx(0.5));
    }

    SUBCASE("v = x gives zero jump") {
        const Point c = collision_c(m, Point{1, 1, 1}, {1.0, 1.0}, Point{1, 1, 1});
        for (double v : c) CHECK(v == 0.0);
    }
}

TEST_CASE("norm identity and convention identities on random inputs") {
    for (auto conv : {SignConvention::energy, SignConvention::paper_literal}) {
        const auto m = boltz(0.5, 0.5, 2.0, 0.2, conv);
        Substream st = root_stream(5).child(conv == SignConvention::energy ? 0 : 1);
        for (int k = 0; k < 20000; ++k) {
            const Point v{st.uniform(-4, 4), st.uniform(-4, 4), st.uniform(-4, 4)};
            const Point x{st.uniform(-4, 4), st.uniform(-4, 4), st.uniform(-4, 4)};
            const AngularParams z{st.uniform(m.zeta_min, kPi), st.uniform(0, 2 * kPi)};
            const Point c = collision_c(m, v, z, x);
            const Vec3 cv{c[0], c[1], c[2]};
            const Vec3 rel = vec3::sub(truncate3({v[0], v[1], v[2]}, m.gamma_cap),
                                       truncate3({x[0], x[1], x[2]}, m.gamma_cap));
            CHECK(std::abs(vec3::norm(cv) - std::sin(0.5 * z.zeta) * vec3::norm(rel)) < 1e-10);
            const double ip = -vec3::dot(cv, rel);  // <c, H(x) - H(v)>
            const double c2 = vec3::dot(cv, cv);
            if (conv == SignConvention::energy)
                CHECK(std::abs(ip + c2) < 1e-10);
            else
                CHECK(std::abs(ip - c2) < 1e-10);
        }
    }
}

TEST_CASE("pairwise conservation holds exactly for the energy convention") {
    const auto m = boltz(0.5, 0.5, 3.0, 0.2, SignConvention::energy);
    Substream st = root_stream(6).child(0);
    double worst_literal = 0.0;
    const auto literal = boltz(0.5, 0.5, 3.0, 0.2, SignConvention::paper_literal);
    for (int k = 0; k < 20000; ++k) {
        // untruncated inputs: |v|, |x| <= Gamma
        Vec3 v{st.uniform(-1, 1), st.uniform(-1, 1), st.uniform(-1, 1)};
        Vec3 x{st.uniform(-1, 1), st.uniform(-1, 1), st.uniform(-1, 1)};
        const AngularParams z{st.uniform(m.zeta_min, kPi), st.uniform(0, 2 * kPi)};
        const Point c = collision_c(m, Point{v[0], v[1], v[2]}, z, Point{x[0], x[1], x[2]});
        const Vec3 cv{c[0], c[1], c[2]};
        const Vec3 xp{x[0] + cv[0], x[1] + cv[1], x[2] + cv[2]};
        const Vec3 vp{v[0] - cv[0], v[1] - cv[1], v[2] - cv[2]};
        CHECK(std::abs(vec3::dot(xp, xp) + vec3::dot(vp, vp) - vec3::dot(x, x) -
                       vec3::dot(v, v)) < 1e-10);
        for (int d = 0; d < 3; ++d) CHECK(std::abs(xp[d] + vp[d] - x[d] - v[d]) < 1e-12);

        const Point cl = collision_c(literal, Point{v[0], v[1], v[2]}, z, Point{x[0], x[1], x[2]});
        const Vec3 clv{cl[0], cl[1], cl[2]};
        const Vec3 xpl{x[0] + clv[0], x[1] + clv[1], x[2] + clv[2]};
        const Vec3 vpl{v[0] - clv[0], v[1] - clv[1], v[2] - clv[2]};
        worst_literal = std::max(worst_literal,
                                 std::abs(vec3::dot(xpl, xpl) + vec3::dot(vpl, vpl) -
                                          vec3::dot(x, x) - vec3::dot(v, v)));
    }
    // the printed sign does violate energy conservation
    CHECK(worst_literal > 1e-3);
}

TEST_CASE("rate_gamma examples") {
    const auto m = boltz(0.5, 0.5, 2.0, 0.2);
    CHECK(rate_gamma(m, Point{1, 1, 1}, Point{1, 1, 1}) == 0.0);
    CHECK(rate_gamma(m, Point{1, 0, 0}, Point{0, 0, 0}) == doctest::Approx(1.0));
    const auto m1 = boltz(0.5, 0.5, 1.0, 0.2);
    CHECK(rate_gamma(m1, Point{2, 0, 0}, Point{-2, 0, 0}) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));

    const auto mfe = ModelSpec::mean_field_enskog(0.5, 0.5, 2.0, 0.2, 1.0);
    const Point v6{0, 0, 0, 1, 0, 0}, x6{0, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(rate_gamma(mfe, v6, x6), MissingAux);
    const auto aux = EmpiricalMeasure::from_points({{0.0, 0.0, 0.0}});
    // single aux point at the same position: factor is the Gaussian sup
    CHECK(rate_gamma(mfe, v6, x6, &aux) ==
          doctest::Approx(gaussian_kernel_sup(1.0)).epsilon(1e-12));
}

TEST_CASE("drift_b per variant") {
    const auto ens = ModelSpec::enskog(0.5, 2.0, 0.2, 1.0);
    const Point b = drift_b(ens, Point{0, 0, 0, 1, 2, 3});
    CHECK(b == Point{1, 2, 3, 0, 0, 0});

    const auto bz = boltz();
    CHECK(drift_b(bz, Point{0.4, -1, 2}) == Point{0, 0, 0});

    const auto syn = ModelSpec::synthetic1d(0.5, 1.0, 1.0, 0.0);
    CHECK(drift_b(syn, Point{5.0}) == Point{1.0});

    CHECK_THROWS_AS(drift_b(bz, Point{1.0}), DimensionMismatch);
}

TEST_CASE("angular sampling follows the cutoff power law") {
    const auto m = boltz(0.5, 0.5, 2.0, 0.1);

    SUBCASE("quantile endpoints") {
        CHECK(angular_quantile(m, 0.0) == doctest::Approx(m.zeta_min).epsilon(1e-12));
        CHECK(angular_quantile(m, 1.0) == doctest::Approx(kPi).epsilon(1e-12));
    }

    SUBCASE("degenerate cutoff rejected") {
        auto bad = m;
        bad.zeta_min = kPi;
        Substream st = root_stream(1).child(1);
        CHECK_THROWS_AS(sample_angular(bad, st), DegenerateCutoff);
    }

    SUBCASE("Kolmogorov-Smirnov against the analytic CDF") {
        // analytic CDF cross-checked against numerical integration of the density
        const double lo = std::pow(m.zeta_min, -m.nu), hi = std::pow(kPi, -m.nu);
        auto cdf = [&](double z) { return (lo - std::pow(z, -m.nu)) / (lo - hi); };
        auto density = [&](double z) { return std::pow(z, -(1.0 + m.nu)) * m.nu / (lo - hi); };
        for (double z : {0.3, 1.0, 2.5}) {
            const double numeric =
                test_oracle::adaptive_simpson(density, m.zeta_min, z, 1e-12);
            CHECK(cdf(z) == doctest::Approx(numeric).epsilon(1e-8));
        }

        Substream st = root_stream(12).child(0);
        const std::size_t draws = 1000000;
        std::vector<double> zetas(draws);
        double phi_mean = 0.0;
        for (std::size_t i = 0; i < draws; ++i) {
            const AngularParams z = sample_angular(m, st);
            if (z.zeta < m.zeta_min || z.zeta > kPi) REQUIRE(false);
            zetas[i] = z.zeta;
            phi_mean += z.phi / draws;
        }
        CHECK(test_oracle::ks_statistic(std::move(zetas), cdf) < 0.002);
        // uniform azimuth: mean pi within 5 sigma
        const double sigma = 2.0 * kPi / std::sqrt(12.0 * draws);
        CHECK(std::abs(phi_mean - kPi) < 5.0 * sigma);
    }
}

TEST_CASE("mu_mass closed form vs quadrature") {
    auto m = boltz(0.5, 0.5, 2.0, kPi / 4);
    const double expected = 2.0 * kPi * (std::pow(kPi / 4, -0.5) - std::pow(kPi, -0.5)) / 0.5;
    CHECK(mu_mass(m) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(7.0898).epsilon(1e-3));
    const double numeric = 2.0 * kPi *
                           test_oracle::adaptive_simpson(
                               [](double z) { return std::pow(z, -1.5); }, kPi / 4, kPi, 1e-12);
    CHECK(mu_mass(m) == doctest::Approx(numeric).epsilon(1e-9));

    m.zeta_min = kPi - 1e-9;
    CHECK(mu_mass(m) < 1e-6);

    CHECK(mu_mass(ModelSpec::synthetic1d(0.5, 1.0)) == 1.0);
}

TEST_CASE("rate_cap values and audit") {
    CHECK(rate_cap(boltz(0.5, 0.5, 2.0, 0.2)) == doctest::Approx(2.0));
    CHECK(rate_cap(ModelSpec::synthetic1d(0.5, 1.5)) == doctest::Approx(1.5));

    const auto m = boltz(0.5, 0.5, 2.0, 0.2);
    const double cap = rate_cap(m);
    Substream st = root_stream(13).child(0);
    double worst = 0.0;
    for (int i = 0; i < 1000000; ++i) {
        const Point v{st.uniform(-6, 6), st.uniform(-6, 6), st.uniform(-6, 6)};
        const Point x{st.uniform(-6, 6), st.uniform(-6, 6), st.uniform(-6, 6)};
        worst = std::max(worst, rate_gamma(m, v, x) - cap);
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("lipschitz budgets") {
    SUBCASE("synthetic linear kernel") {
        const auto b = lipschitz_budget(ModelSpec::synthetic1d(0.5, 1.0));
        CHECK(b.L_mu == doctest::Approx(0.5));
        CHECK(b.L_b == 0.0);
        CHECK(b.L_total == doctest::Approx(1.5));
        CHECK(b.C_mu == doctest::Approx(0.5));
    }

    SUBCASE("3d Boltzmann with the paper's constants") {
        // nu = 0.5, zeta_min = 0, a = 0.5, Gamma = 1: L_mu = 6 Gamma^a int alpha dmu
        const auto m = ModelSpec::boltzmann3d(0.5, 0.5, 1.0, 0.0);
        const auto b = lipschitz_budget(m);
        CHECK(b.L_mu == doctest::Approx(267.28).epsilon(1e-3));
        CHECK(b.L_b == 0.0);
        // integral oracle: int int 2 zeta zeta^{-1.5} dzeta dphi, singular end split off
        const double eps = 1e-6;
        const double head = 8.0 * kPi * std::sqrt(eps);  // exact integral over [0, eps]
        const double numeric = 2.0 * kPi *
                                   test_oracle::adaptive_simpson(
                                       [](double z) { return 2.0 * std::pow(z, -0.5); }, eps,
                                       kPi, 1e-11) +
                               head;
        CHECK(b.L_mu == doctest::Approx(6.0 * numeric).epsilon(1e-6));
    }

    SUBCASE("enskog budgets carry the Gamma^{a+1} scaling") {
        const auto lo = lipschitz_budget(ModelSpec::enskog(0.5, 1.0, 0.2, 1.0));
        const auto hi = lipschitz_budget(ModelSpec::enskog(0.5, 4.0, 0.2, 1.0));
        CHECK(hi.L_mu > lo.L_mu * std::pow(4.0, 0.5));  // grows faster than Gamma^a
        CHECK(lipschitz_budget(ModelSpec::enskog(0.5, 1.0, 0.2, 1.0)).L_b == 1.0);
    }
}

TEST_CASE("smoothstep localization") {
    CHECK(smoothstep_ir(0.5, 1.0) == 1.0);
    CHECK(smoothstep_ir(1.0, 1.0) == 1.0);
    CHECK(smoothstep_ir(2.0, 1.0) == 0.0);
    CHECK(smoothstep_ir(1.5, 1.0) == doctest::Approx(0.5));
    // max slope 1.5 / R
    double worst = 0.0;
    for (double r = 1.0; r < 2.0; r += 1e-3) {
        const double d = (smoothstep_ir(r + 5e-7, 1.0) - smoothstep_ir(r - 5e-7, 1.0)) / 1e-6;
        worst = std::max(worst, std::abs(d));
    }
    CHECK(worst <= smoothstep_lipschitz(1.0) + 1e-6);
}

TEST_CASE("validate_kernels drives the identity suite") {
    const auto energy = validate_kernels(boltz(), 20000, 77);
    CHECK(energy.all_as_expected);

    // phase-space variants: norm identity carries the beta scaling, the
    // mean-field cap covers the Gaussian factor
    CHECK(validate_kernels(ModelSpec::enskog(0.5, 2.0, 0.2, 1.0), 20000, 78).all_as_expected);
    CHECK(validate_kernels(ModelSpec::mean_field_enskog(0.5, 0.5, 2.0, 0.2, 1.0), 20000, 79)
              .all_as_expected);

    const auto literal =
        validate_kernels(boltz(0.5, 0.5, 2.0, 0.2, SignConvention::paper_literal), 20000, 77);
    CHECK(literal.all_as_expected);  // conservation expected (and observed) to fail
    bool saw_conservation_failure = false;
    for (const auto& c : literal.checks)
        if (c.name == "pairwise_conservation") saw_conservation_failure = !c.pass;
    CHECK(saw_conservation_failure);

    const auto synthetic = validate_kernels(ModelSpec::synthetic1d(0.5, 1.0), 20000, 77);
    CHECK(synthetic.all_as_expected);
    CHECK(!synthetic.checks.front().applicable);  // frame/angular not applicable
}
