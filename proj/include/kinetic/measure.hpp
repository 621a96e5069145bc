#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "kinetic/errors.hpp"
#include "kinetic/rng.hpp"

namespace kinetic {

using Point = std::vector<double>;

inline double norm(std::span<const double> x) noexcept {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double distance(std::span<const double> x, std::span<const double> y) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        s += d * d;
    }
    return std::sqrt(s);
}

/// Uniformly weighted point cloud; the computational stand-in for a
/// probability measure with finite first moment. Rows are stored flat
/// (N x d, row major) and the object is immutable after construction.
class EmpiricalMeasure {
  public:
    EmpiricalMeasure(std::vector<double> coords, int dim)
        : coords_(std::move(coords)), dim_(dim) {
        if (dim_ < 1) throw DimensionMismatch("EmpiricalMeasure: dimension must be >= 1");
        if (coords_.empty() || coords_.size() % static_cast<std::size_t>(dim_) != 0)
            throw SizeMismatch("EmpiricalMeasure: coordinate buffer does not hold N points");
        for (double v : coords_)
            if (!std::isfinite(v))
                throw DimensionMismatch("EmpiricalMeasure: non-finite coordinate");
    }

    static EmpiricalMeasure from_points(const std::vector<Point>& pts) {
        if (pts.empty()) throw SizeMismatch("EmpiricalMeasure: need at least one point");
        const int d = static_cast<int>(pts.front().size());
        std::vector<double> flat;
        flat.reserve(pts.size() * d);
        for (const Point& p : pts) {
            if (static_cast<int>(p.size()) != d)
                throw DimensionMismatch("EmpiricalMeasure: inconsistent point dimensions");
            flat.insert(flat.end(), p.begin(), p.end());
        }
        return EmpiricalMeasure(std::move(flat), d);
    }

    /// N iid standard normal points, for experiment initial conditions.
    static EmpiricalMeasure gaussian(std::size_t n, int dim, Substream stream,
                                     double mean = 0.0, double sdev = 1.0) {
        std::vector<double> flat(n * dim);
        for (double& v : flat) v = mean + sdev * stream.normal();
        return EmpiricalMeasure(std::move(flat), dim);
    }

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return coords_.size() / dim_; }

    std::span<const double> point(std::size_t i) const noexcept {
        return {coords_.data() + i * dim_, static_cast<std::size_t>(dim_)};
    }
    const std::vector<double>& coords() const noexcept { return coords_; }

    /// Raw p-th absolute moment (1/N) sum |x_i|^p.
    double moment(double p) const {
        if (p <= 0.0) throw std::invalid_argument("moment: p must be positive");
        double s = 0.0;
        for (std::size_t i = 0; i < size(); ++i) s += std::pow(norm(point(i)), p);
        return s / static_cast<double>(size());
    }

    /// Uniform index into {0, ..., N-1}; drawing point(i) realizes v ~ rho.
    std::size_t sample_index(Substream& stream) const noexcept {
        return static_cast<std::size_t>(stream.uniform_index(size()));
    }

    EmpiricalMeasure translated(std::span<const double> shift) const {
        if (static_cast<int>(shift.size()) != dim_)
            throw DimensionMismatch("translated: shift dimension mismatch");
        std::vector<double> flat = coords_;
        for (std::size_t i = 0; i < flat.size(); ++i) flat[i] += shift[i % dim_];
        return EmpiricalMeasure(std::move(flat), dim_);
    }

    EmpiricalMeasure scaled(double factor) const {
        std::vector<double> flat = coords_;
        for (double& v : flat) v *= factor;
        return EmpiricalMeasure(std::move(flat), dim_);
    }

    /// Per-coordinate mean.
    Point mean() const {
        Point m(dim_, 0.0);
        for (std::size_t i = 0; i < size(); ++i) {
            auto p = point(i);
            for (int k = 0; k < dim_; ++k) m[k] += p[k];
        }
        for (double& v : m) v /= static_cast<double>(size());
        return m;
    }

  private:
    std::vector<double> coords_;
    int dim_;
};

namespace io_detail {
// %.17g round-trips every finite double exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace io_detail

/// CSV with header x1,...,xd and one point per row, 17 significant digits.
inline void write_csv(const EmpiricalMeasure& mu, std::ostream& out) {
    for (int k = 0; k < mu.dim(); ++k) out << (k ? ",x" : "x") << (k + 1);
    out << '\n';
    for (std::size_t i = 0; i < mu.size(); ++i) {
        auto p = mu.point(i);
        for (int k = 0; k < mu.dim(); ++k) {
            if (k) out << ',';
            out << io_detail::format_double(p[k]);
        }
        out << '\n';
    }
}

inline EmpiricalMeasure read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SizeMismatch("read_csv: empty input");
    int dim = 1;
    for (char c : line)
        if (c == ',') ++dim;
    std::vector<double> flat;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        int k = 0;
        while (std::getline(row, cell, ',')) {
            flat.push_back(std::stod(cell));
            ++k;
        }
        if (k != dim) throw DimensionMismatch("read_csv: ragged row");
    }
    return EmpiricalMeasure(std::move(flat), dim);
}

}  // namespace kinetic
