#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "remest/affine_codec.hpp"
#include "remest/densities.hpp"
#include "remest/dp_solver.hpp"

namespace remest {

struct EpisodeConfig {
    int horizon = 100;
    int noisy_budget = 40;
    int perfect_budget = 40;
    SourceDensity density = SourceDensity::laplace(1.0);
    NoiseModel noise{1.0, NoiseShape::gaussian};
    double snr = 1.0;
    double power = 1.0;
    std::uint64_t seed = 0;
    int episodes = 1;
};

/// One step of a closed-loop rollout. Budgets are the opportunities still
/// available when the decision was taken.
struct StepRecord {
    double x = 0.0;
    Action action = Action::hold;
    std::optional<double> received; // channel output; raw x on the perfect channel
    std::optional<Sign> sign;       // side-channel symbol, noisy sends only
    double estimate = 0.0;
    double sq_error = 0.0;
    int noisy_left = 0;
    int perfect_left = 0;
};

struct SamplePath {
    std::vector<StepRecord> steps;
    double total_cost = 0.0;
    int final_noisy_left = 0;
    int final_perfect_left = 0;
};

/// Rolls out one episode under the table's policy. Deterministic given the
/// seed; derive per-episode seeds from a master seed with derive_seed().
/// Throws ConfigMismatch if the table was solved for different parameters.
SamplePath run_episode(const EpisodeConfig& config, const DpTable& table,
                       std::uint64_t seed);

struct MonteCarloEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    int episodes = 0;
};

/// Sample mean and standard error of the episode cost over config.episodes
/// independent seeded episodes. The aggregation order is fixed by episode
/// index, so results do not depend on the worker count.
MonteCarloEstimate monte_carlo_cost(const EpisodeConfig& config, const DpTable& table,
                                    int workers = 1);

/// Per-step export: columns t, x, u, y_tilde, s, xhat, sqerr, En, Ep.
void write_path_csv(const SamplePath& path, std::ostream& out);

} // namespace remest
