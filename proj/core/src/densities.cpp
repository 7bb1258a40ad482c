#include "remest/densities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "remest/errors.hpp"
#include "remest/quadrature.hpp"

namespace remest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroMass = 1e-300;
constexpr double kQuadTol = 1e-10;

/// Mean and variance of W ~ Exp(rate) conditioned on W in (0, width].
/// The closed forms difference nearly equal terms for narrow intervals,
/// so widths with rate*width < 1e-5 switch to a two-term series.
void truncated_exp_moments(double rate, double width, double& mean, double& variance) {
    if (width == kInf) {
        mean = 1.0 / rate;
        variance = 1.0 / (rate * rate);
        return;
    }
    const double z = rate * width;
    if (z < 1e-5) {
        mean = width * (0.5 - z / 12.0);
        variance = width * width * (1.0 / 12.0 - z * z / 144.0);
        return;
    }
    const double r = std::exp(-z) / (-std::expm1(-z)); // 1 / (e^z - 1)
    mean = 1.0 / rate - width * r;
    const double second = 2.0 / (rate * rate) - (width * width + 2.0 * width / rate) * r;
    variance = std::max(0.0, second - mean * mean);
}

} // namespace

IntervalMoments combine_moments(std::span<const IntervalMoments> pieces) {
    double mass = 0.0;
    double first = 0.0;
    double second = 0.0;
    for (const auto& p : pieces) {
        mass += p.mass;
        first += p.mass * p.mean;
        second += p.mass * p.second_moment();
    }
    if (mass <= 0.0) {
        return {};
    }
    const double mean = first / mass;
    return {mass, mean, std::max(0.0, second / mass - mean * mean)};
}

SourceDensity SourceDensity::laplace(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("laplace rate must be positive");
    }
    SourceDensity d;
    d.kind_ = DensityKind::laplace;
    d.rate_ = rate;
    d.variance_ = 2.0 / (rate * rate);
    d.support_lower_ = -kInf;
    d.support_upper_ = kInf;
    return d;
}

SourceDensity SourceDensity::uniform(double half_width) {
    if (!(half_width > 0.0)) {
        throw std::invalid_argument("uniform half width must be positive");
    }
    SourceDensity d;
    d.kind_ = DensityKind::uniform;
    d.half_width_ = half_width;
    d.variance_ = half_width * half_width / 3.0;
    d.support_lower_ = -half_width;
    d.support_upper_ = half_width;
    return d;
}

SourceDensity SourceDensity::tabulated(std::vector<double> grid, std::vector<double> pdf) {
    const std::size_t n = grid.size();
    if (n < 3 || pdf.size() != n) {
        throw std::invalid_argument("tabulated density needs matching grids of >= 3 points");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(grid[i] < grid[i + 1])) {
            throw std::invalid_argument("tabulated grid must be strictly increasing");
        }
    }
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(pdf[i] >= 0.0) || !std::isfinite(pdf[i])) {
            throw std::invalid_argument("tabulated pdf values must be finite and nonnegative");
        }
        mass += 0.5 * (pdf[i] + pdf[i + 1]) * (grid[i + 1] - grid[i]);
    }
    if (std::abs(mass - 1.0) > 1e-10) {
        throw std::invalid_argument("tabulated pdf must integrate to 1 within 1e-10");
    }
    const double scale = std::max(std::abs(grid.front()), std::abs(grid.back()));
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = n - 1 - i;
        if (std::abs(grid[i] + grid[j]) > 1e-12 * std::max(1.0, scale) ||
            std::abs(pdf[i] - pdf[j]) > 1e-9 * std::max(1.0, pdf[i])) {
            throw std::invalid_argument("tabulated density must be symmetric around zero");
        }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (grid[i] >= 0.0 && pdf[i + 1] > pdf[i] + 1e-12) {
            throw std::invalid_argument("tabulated density must be nonincreasing on [0, inf)");
        }
    }

    SourceDensity d;
    d.kind_ = DensityKind::tabulated;
    d.support_lower_ = grid.front();
    d.support_upper_ = grid.back();
    d.grid_ = std::move(grid);
    d.pdf_ = std::move(pdf);

    d.cdf_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        d.cdf_[i + 1] = d.cdf_[i] +
                        0.5 * (d.pdf_[i] + d.pdf_[i + 1]) * (d.grid_[i + 1] - d.grid_[i]);
    }

    const auto second = d.unchecked_moments(d.support_lower_, d.support_upper_);
    d.variance_ = second.second_moment();
    return d;
}

double SourceDensity::pdf(double x) const {
    switch (kind_) {
    case DensityKind::laplace:
        return 0.5 * rate_ * std::exp(-rate_ * std::abs(x));
    case DensityKind::uniform:
        return std::abs(x) <= half_width_ ? 0.5 / half_width_ : 0.0;
    case DensityKind::tabulated: {
        if (x < grid_.front() || x > grid_.back()) {
            return 0.0;
        }
        const auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
        const std::size_t hi = std::min<std::size_t>(it - grid_.begin(), grid_.size() - 1);
        const std::size_t lo = hi - 1;
        const double t = (x - grid_[lo]) / (grid_[hi] - grid_[lo]);
        return pdf_[lo] + t * (pdf_[hi] - pdf_[lo]);
    }
    }
    return 0.0;
}

double SourceDensity::upper_tail_cap(double tail_mass) const {
    if (kind_ == DensityKind::laplace) {
        return -std::log(2.0 * tail_mass) / rate_;
    }
    return support_upper_;
}

/// Moments of the Laplace source over a positive-side interval, via the
/// memoryless decomposition X = a + W with W truncated exponential.
IntervalMoments SourceDensity::positive_side_moments(double a, double b) const {
    const double mass =
        (b == kInf) ? 0.5 * std::exp(-rate_ * a)
                    : 0.5 * std::exp(-rate_ * a) * (-std::expm1(-rate_ * (b - a)));
    double mean_w = 0.0;
    double var_w = 0.0;
    truncated_exp_moments(rate_, b - a, mean_w, var_w);
    return {mass, a + mean_w, var_w};
}

IntervalMoments SourceDensity::unchecked_moments(double a, double b) const {
    switch (kind_) {
    case DensityKind::laplace: {
        if (a >= 0.0) {
            return positive_side_moments(a, b);
        }
        if (b <= 0.0) {
            auto m = positive_side_moments(-b, -a);
            m.mean = -m.mean;
            return m;
        }
        auto neg = positive_side_moments(0.0, -a);
        neg.mean = -neg.mean;
        const auto pos = positive_side_moments(0.0, b);
        return combine_moments(std::array{neg, pos});
    }
    case DensityKind::uniform: {
        const double lo = std::max(a, -half_width_);
        const double hi = std::min(b, half_width_);
        if (!(hi > lo)) {
            return {};
        }
        return {(hi - lo) / (2.0 * half_width_), 0.5 * (lo + hi),
                (hi - lo) * (hi - lo) / 12.0};
    }
    case DensityKind::tabulated: {
        const double lo = std::max(a, grid_.front());
        const double hi = std::min(b, grid_.back());
        if (!(hi > lo)) {
            return {};
        }
        // Integrate each smooth segment separately: the integrands are
        // polynomials of degree <= 3 there, which Simpson handles exactly.
        auto p = [this](double x) { return pdf(x); };
        auto xp = [this](double x) { return x * pdf(x); };
        auto xxp = [this](double x) { return x * x * pdf(x); };
        double mass = 0.0;
        double first = 0.0;
        double second = 0.0;
        double left = lo;
        for (double node : grid_) {
            if (node <= lo || node >= hi) {
                continue;
            }
            mass += adaptive_simpson(p, left, node, kQuadTol);
            first += adaptive_simpson(xp, left, node, kQuadTol);
            second += adaptive_simpson(xxp, left, node, kQuadTol);
            left = node;
        }
        mass += adaptive_simpson(p, left, hi, kQuadTol);
        first += adaptive_simpson(xp, left, hi, kQuadTol);
        second += adaptive_simpson(xxp, left, hi, kQuadTol);
        if (mass <= 0.0) {
            return {};
        }
        const double mean = first / mass;
        return {mass, mean, std::max(0.0, second / mass - mean * mean)};
    }
    }
    return {};
}

IntervalMoments SourceDensity::interval_moments(double a, double b) const {
    if (!(a < b)) {
        throw std::invalid_argument("interval_moments requires a < b");
    }
    const auto m = unchecked_moments(a, b);
    if (m.mass < kZeroMass) {
        throw ZeroMassInterval(a, b);
    }
    return m;
}

std::optional<IntervalMoments> SourceDensity::try_interval_moments(double a, double b) const {
    if (!(a < b)) {
        return std::nullopt;
    }
    const auto m = unchecked_moments(a, b);
    if (m.mass < kZeroMass) {
        return std::nullopt;
    }
    return m;
}

double SourceDensity::sample(RngStream& rng) const {
    const double u = rng.next_uniform();
    switch (kind_) {
    case DensityKind::laplace:
        return u < 0.5 ? std::log(2.0 * u) / rate_ : -std::log(2.0 * (1.0 - u)) / rate_;
    case DensityKind::uniform:
        return half_width_ * (2.0 * u - 1.0);
    case DensityKind::tabulated: {
        const double target = u * cdf_.back();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
        const std::size_t hi = std::min<std::size_t>(it - cdf_.begin(), cdf_.size() - 1);
        const std::size_t lo = hi == 0 ? 0 : hi - 1;
        const double x0 = grid_[lo];
        const double x1 = grid_[hi];
        const double p0 = pdf_[lo];
        const double slope = (pdf_[hi] - p0) / (x1 - x0);
        const double need = target - cdf_[lo];
        // Solve p0*d + slope*d^2/2 = need for the offset d within the segment.
        if (std::abs(slope) < 1e-14) {
            return p0 > 0.0 ? x0 + need / p0 : x0;
        }
        const double disc = std::max(0.0, p0 * p0 + 2.0 * slope * need);
        return x0 + (-p0 + std::sqrt(disc)) / slope;
    }
    }
    return 0.0;
}

bool SourceDensity::operator==(const SourceDensity& other) const {
    if (kind_ != other.kind_) {
        return false;
    }
    switch (kind_) {
    case DensityKind::laplace:
        return rate_ == other.rate_;
    case DensityKind::uniform:
        return half_width_ == other.half_width_;
    case DensityKind::tabulated:
        return grid_ == other.grid_ && pdf_ == other.pdf_;
    }
    return false;
}

std::string SourceDensity::describe() const {
    std::ostringstream out;
    switch (kind_) {
    case DensityKind::laplace:
        out << "laplace(rate=" << rate_ << ")";
        break;
    case DensityKind::uniform:
        out << "uniform(half_width=" << half_width_ << ")";
        break;
    case DensityKind::tabulated:
        out << "tabulated(" << grid_.size() << " points on [" << grid_.front() << ", "
            << grid_.back() << "])";
        break;
    }
    return out.str();
}

double NoiseModel::sample(RngStream& rng) const {
    switch (shape) {
    case NoiseShape::gaussian:
        return std::sqrt(variance) * rng.next_gaussian();
    case NoiseShape::uniform: {
        const double half_width = std::sqrt(3.0 * variance);
        return half_width * (2.0 * rng.next_uniform() - 1.0);
    }
    case NoiseShape::laplace: {
        const double rate = std::sqrt(2.0 / variance);
        const double u = rng.next_uniform();
        return u < 0.5 ? std::log(2.0 * u) / rate : -std::log(2.0 * (1.0 - u)) / rate;
    }
    }
    return 0.0;
}

NoiseShape noise_shape_from_string(const std::string& name) {
    if (name == "gaussian") {
        return NoiseShape::gaussian;
    }
    if (name == "uniform") {
        return NoiseShape::uniform;
    }
    if (name == "laplace") {
        return NoiseShape::laplace;
    }
    throw std::invalid_argument("unknown noise shape: " + name);
}

std::string to_string(NoiseShape shape) {
    switch (shape) {
    case NoiseShape::gaussian:
        return "gaussian";
    case NoiseShape::uniform:
        return "uniform";
    case NoiseShape::laplace:
        return "laplace";
    }
    return "?";
}

} // namespace remest
