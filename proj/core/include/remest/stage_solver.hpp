#pragma once

#include <array>
#include <optional>

#include "remest/affine_codec.hpp"
#include "remest/densities.hpp"
#include "remest/regions.hpp"

namespace remest {

/// Parameters of the one-stage problem: per-use channel prices, channel SNR,
/// and the codec the noisy channel would run with.
struct StageCostParams {
    double noisy_cost = 0.0;   // charged per noisy-channel use
    double perfect_cost = 0.0; // charged per perfect-channel use
    double snr = 1.0;
    double offset = 0.0; // codec offset; 0 without the sign side channel
    double gain = 1.0;   // codec gain
};

/// Per-realization costs of the three actions at a fixed observation x.
struct StageCosts {
    double hold;    // x^2
    double noisy;   // noisy_cost + expected squared error of the affine codec
    double perfect; // perfect_cost
};

StageCosts stage_costs(double x, const StageCostParams& params, double noise_variance);

/// Whether the sign side channel accompanies noisy transmissions. With it on,
/// the noisy-channel distortion uses one-sided conditional variances.
enum class SideChannel { off, on };

/// Expected one-stage cost of an arbitrary region policy:
///   E[X^2; hold] + noisy_cost*P(noisy) + sum Var(X|band)P(band)/(snr+1)
///   + perfect_cost*P(perfect).
/// The hold region must mirror around zero (the silent estimate is 0); with
/// the side channel on the whole policy must be symmetric. Throws
/// AsymmetricPolicy otherwise.
double eval_region_cost(const PolicyRegions& regions, const SourceDensity& density,
                        const StageCostParams& params, SideChannel side_channel);

/// Expected cost of the threshold-in-threshold policy (beta1, beta2) under
/// side-channel semantics (the noisy conditional variance is one-sided).
double eval_threshold_cost(double beta1, double beta2, const SourceDensity& density,
                           double noisy_cost, double perfect_cost, double snr);

/// Solution of the one-stage soft-constraint problem over threshold pairs.
struct SoftSolution {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double cost = 0.0;
    bool used_boundary = false; // a boundary candidate beat the interior roots
    std::optional<CodecParams> codec;     // matched to the noisy band, power 1
    std::array<double, 2> residuals{0.0, 0.0}; // first-order system residuals
};

/// First-order residuals of the threshold system at (beta1, beta2):
///   r1 = beta1^2 - (beta1 - m)^2/(snr+1) - noisy_cost
///   r2 = (beta2 - m)^2/(snr+1) + noisy_cost - perfect_cost
/// with m the conditional mean of the positive noisy band.
std::array<double, 2> first_order_residuals(double beta1, double beta2,
                                            const SourceDensity& density,
                                            double noisy_cost, double perfect_cost,
                                            double snr);

/// Closed-form path for the Laplace source: reduces the first-order system to
/// one strictly increasing scalar equation in the band width, solved by
/// bisection, then compares against the perfect-only boundary sqrt(c2).
SoftSolution solve_laplace_thresholds(double noisy_cost, double perfect_cost, double snr,
                                      double rate);

/// Generic path: damped fixed-point iteration on the band's conditional mean
/// from several restarts, compared against the boundary candidates
/// beta1=beta2=sqrt(c2), beta1=0, and beta2=inf. Throws NonConvergence when
/// no restart reaches residuals below 1e-10.
SoftSolution solve_generic_thresholds(const SourceDensity& density, double noisy_cost,
                                      double perfect_cost, double snr);

/// Classifies x against a threshold pair; ties go to the cheaper action.
Action threshold_action(double x, double beta1, double beta2);

} // namespace remest
