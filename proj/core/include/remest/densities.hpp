#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "remest/rng.hpp"

namespace remest {

enum class DensityKind { laplace, uniform, tabulated };

/// Moments of a source conditioned on landing in an interval (a, b].
struct IntervalMoments {
    double mass = 0.0;
    double mean = 0.0;
    double variance = 0.0;

    /// Contribution of this piece to an unconditional second moment.
    double second_moment() const { return variance + mean * mean; }
};

/// Pools conditional moments of disjoint pieces into the moments of their union.
IntervalMoments combine_moments(std::span<const IntervalMoments> pieces);

/// Zero-mean source density, symmetric and unimodal around the origin.
/// Immutable after construction; concurrent reads are safe. Sampling draws
/// from a caller-owned RngStream.
class SourceDensity {
public:
    /// Two-sided exponential with pdf rate/2 * exp(-rate*|x|).
    static SourceDensity laplace(double rate);

    /// Flat density 1/(2*half_width) on [-half_width, half_width].
    static SourceDensity uniform(double half_width);

    /// Piecewise-linear density through (x_i, pdf_i). The grid must be
    /// strictly increasing, symmetric around zero, nonincreasing on [0, inf),
    /// and integrate to 1 within 1e-10.
    static SourceDensity tabulated(std::vector<double> grid, std::vector<double> pdf);

    DensityKind kind() const { return kind_; }
    double rate() const { return rate_; }
    double half_width() const { return half_width_; }

    double pdf(double x) const;
    double variance() const { return variance_; }
    double support_lower() const { return support_lower_; }
    double support_upper() const { return support_upper_; }

    /// Smallest x at which the upper tail mass drops below tail_mass
    /// (support_upper when the support is already bounded).
    double upper_tail_cap(double tail_mass = 1e-15) const;

    /// Mass, conditional mean and conditional variance of X given
    /// X in (a, b]. Laplace and uniform use closed forms, tabulated
    /// integrates adaptively to 1e-10. Throws ZeroMassInterval when the
    /// interval carries mass below 1e-300.
    IntervalMoments interval_moments(double a, double b) const;

    /// Same, but an (effectively) empty interval yields nullopt.
    std::optional<IntervalMoments> try_interval_moments(double a, double b) const;

    double sample(RngStream& rng) const;

    bool operator==(const SourceDensity& other) const;

    std::string describe() const;

private:
    SourceDensity() = default;

    IntervalMoments unchecked_moments(double a, double b) const;
    IntervalMoments positive_side_moments(double a, double b) const;

    DensityKind kind_ = DensityKind::laplace;
    double rate_ = 0.0;
    double half_width_ = 0.0;
    double variance_ = 0.0;
    double support_lower_ = 0.0;
    double support_upper_ = 0.0;
    std::vector<double> grid_;
    std::vector<double> pdf_;
    std::vector<double> cdf_; // at grid nodes, tabulated only
};

enum class NoiseShape { gaussian, uniform, laplace };

/// Zero-mean channel noise of a fixed variance. The affine codec's expected
/// cost depends on the variance only; the shape is configurable to exercise
/// exactly that invariance.
struct NoiseModel {
    double variance = 1.0;
    NoiseShape shape = NoiseShape::gaussian;

    double sample(RngStream& rng) const;
};

NoiseShape noise_shape_from_string(const std::string& name);
std::string to_string(NoiseShape shape);

} // namespace remest
