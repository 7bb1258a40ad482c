#pragma once

#include <array>
#include <string>

#include "remest/densities.hpp"
#include "remest/regions.hpp"
#include "remest/stage_solver.hpp"

namespace remest {

/// A region policy together with a mass-preserving rearrangement of its
/// noisy pieces, plus the per-label mass certificate for both.
struct ShiftConstruction {
    PolicyRegions original;
    PolicyRegions shifted;
    std::array<double, 3> original_label_mass{}; // indexed by Action
    std::array<double, 3> shifted_label_mass{};
    SideChannel side_channel = SideChannel::off;
};

/// Uniform-source construction: starting from the symmetric
/// threshold-in-threshold policy with 0 < beta1 < beta2, the negative noisy
/// piece is relocated to (beta2, 2*beta2 - beta1], making the noisy region
/// connected while every label keeps its probability. Requires
/// 2*beta2 - beta1 < half_width (GeometryViolation otherwise). Evaluated
/// without a side channel.
ShiftConstruction build_uniform_counterexample(double half_width, double beta1,
                                               double beta2, double noisy_cost,
                                               double perfect_cost, double snr);

/// Side-channel construction: a symmetric policy whose positive noisy band
/// (band_lower, band_upper] sits away from the hold threshold beta1 is
/// replaced by the band (beta1, beta2'] of equal mass, with beta2' from
/// bisection on the mass-matching equation (tolerance 1e-12).
ShiftConstruction build_inward_shift(double beta1, double band_lower, double band_upper,
                                     const SourceDensity& density);

struct CostComparison {
    double original;
    double shifted;
};

/// One-stage expected costs of both policies under the construction's
/// side-channel mode.
CostComparison compare_costs(const ShiftConstruction& construction,
                             const SourceDensity& density, double noisy_cost,
                             double perfect_cost, double snr);

/// JSON report: regions, label masses, noisy conditional variances, both
/// costs, and the verdict.
std::string report_json(const ShiftConstruction& construction,
                        const SourceDensity& density, double noisy_cost,
                        double perfect_cost, double snr);

} // namespace remest
