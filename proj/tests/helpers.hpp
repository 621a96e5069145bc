// Test-only oracles: these stay independent of the implementation paths they
// check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "kinetic/measure.hpp"
#include "kinetic/rng.hpp"

namespace test_oracle {

/// Exact W1 by enumerating all N! pairings (N <= 10, equal weights).
inline double w1_bruteforce(const kinetic::EmpiricalMeasure& mu,
                            const kinetic::EmpiricalMeasure& nu) {
    const std::size_t n = mu.size();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            total += kinetic::distance(mu.point(i), nu.point(perm[i]));
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / static_cast<double>(n);
}

/// Regularized upper incomplete gamma Q(a, x), for chi-square p-values.
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // lower series
        double sum = 1.0 / a, term = sum, ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::abs(term) < std::abs(sum) * 1e-15) break;
        }
        const double p = sum * std::exp(-x + a * std::log(x) - lg);
        return 1.0 - p;
    }
    // continued fraction for Q
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-290) d = 1e-290;
        c = b + an / c;
        if (std::abs(c) < 1e-290) c = 1e-290;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

/// Chi-square goodness-of-fit p-value of integer counts against expected cell
/// probabilities (cells with tiny expectation merged into the tail).
inline double chi_square_pvalue(const std::vector<std::uint64_t>& counts,
                                const std::function<double(std::size_t)>& cell_prob,
                                std::size_t draws) {
    std::vector<double> expected, observed;
    double used_exp = 0.0, used_obs = 0.0, total_obs = 0.0;
    for (auto c : counts) total_obs += static_cast<double>(c);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        const double e = cell_prob(k) * draws;
        if (e >= 5.0) {
            expected.push_back(e);
            observed.push_back(static_cast<double>(counts[k]));
            used_exp += e;
            used_obs += static_cast<double>(counts[k]);
        }
    }
    const double tail_exp = static_cast<double>(draws) - used_exp;
    const double tail_obs = total_obs - used_obs;
    if (tail_exp > 5.0) {
        expected.push_back(tail_exp);
        observed.push_back(tail_obs);
    }
    double chi2 = 0.0;
    for (std::size_t k = 0; k < expected.size(); ++k) {
        const double d = observed[k] - expected[k];
        chi2 += d * d / expected[k];
    }
    const double dof = static_cast<double>(expected.size()) - 1.0;
    return gamma_q(dof / 2.0, chi2 / 2.0);
}

/// Kolmogorov-Smirnov statistic of samples against an analytic CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    double d = 0.0;
    const double n = static_cast<double>(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::max(std::abs((i + 1) / n - f), std::abs(f - i / n)));
    }
    return d;
}

/// Adaptive Simpson quadrature, the independent integral oracle.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-10, int depth = 30) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double a_, double b_, double fa_, double fb_, double fm_, double whole,
            int d) -> double {
        const double m_ = 0.5 * (a_ + b_);
        const double lm = 0.5 * (a_ + m_), rm = 0.5 * (m_ + b_);
        const double flm = f(lm), frm = f(rm);
        const double left = (m_ - a_) / 6.0 * (fa_ + 4.0 * flm + fm_);
        const double right = (b_ - m_) / 6.0 * (fm_ + 4.0 * frm + fb_);
        if (d <= 0 || std::abs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return rec(a_, m_, fa_, fm_, flm, left, d - 1) +
               rec(m_, b_, fm_, fb_, frm, right, d - 1);
    };
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return rec(a, b, fa, fb, fm, whole, depth);
}

/// Bootstrap standard deviation of a statistic over resampled indices.
inline double bootstrap_sd(std::size_t n, std::uint64_t seed,
                           const std::function<double(const std::vector<std::size_t>&)>& stat,
                           int resamples = 200) {
    kinetic::Substream st = kinetic::root_stream(seed).child(0x42545354ULL);
    std::vector<std::size_t> idx(n);
    double s1 = 0.0, s2 = 0.0;
    for (int b = 0; b < resamples; ++b) {
        for (std::size_t i = 0; i < n; ++i)
            idx[i] = static_cast<std::size_t>(st.uniform_index(n));
        const double v = stat(idx);
        s1 += v;
        s2 += v * v;
    }
    s1 /= resamples;
    s2 /= resamples;
    return std::sqrt(std::max(0.0, s2 - s1 * s1));
}

inline double sample_mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double sample_variance(const std::vector<double>& v) {
    const double m = sample_mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

}  // namespace test_oracle
