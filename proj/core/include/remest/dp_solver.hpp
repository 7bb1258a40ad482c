#pragma once

#include <iosfwd>
#include <vector>

#include "remest/densities.hpp"
#include "remest/stage_solver.hpp"

namespace remest {

/// Per-state stage decision of the hard-constraint dynamic program.
/// Unavailable actions are encoded in the thresholds: beta2 = inf disables
/// the perfect channel, beta1 = beta2 disables the noisy one, and
/// beta1 = beta2 = inf keeps the sensor silent.
struct StagePolicy {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double effective_noisy_cost = 0.0;   // J*(t+1, En-1, Ep) - J*(t+1, En, Ep)
    double effective_perfect_cost = 0.0; // J*(t+1, En, Ep-1) - J*(t+1, En, Ep)
    double band_mean = 0.0;     // noisy band (positive side); NaN when unused
    double band_variance = 0.0; // likewise
};

struct DpOptions {
    int workers = 1; // states within a time layer are independent
};

/// Value table and per-state thresholds of the finite-horizon problem with
/// hard budgets. Time runs 1..horizon, with value(horizon+1, ., .) = 0.
/// Immutable once solved; concurrent reads are safe.
class DpTable {
public:
    int horizon() const { return horizon_; }
    int noisy_budget() const { return noisy_budget_; }
    int perfect_budget() const { return perfect_budget_; }
    const SourceDensity& density() const { return density_; }
    double snr() const { return snr_; }

    /// Optimal cost to go from time t with the given opportunities left.
    double value(int t, int noisy_left, int perfect_left) const;

    /// Stage decision at time t (1..horizon).
    const StagePolicy& stage(int t, int noisy_left, int perfect_left) const;

    /// J*(1, N1, N2): the optimal total cost over the whole horizon.
    double optimal_cost() const { return value(1, noisy_budget_, perfect_budget_); }

private:
    friend DpTable solve_dp(int, int, int, const SourceDensity&, double,
                            const DpOptions&);

    std::size_t state_index(int noisy_left, int perfect_left) const;

    int horizon_ = 0;
    int noisy_budget_ = 0;
    int perfect_budget_ = 0;
    SourceDensity density_ = SourceDensity::laplace(1.0);
    double snr_ = 1.0;
    std::vector<double> values_;        // (horizon+1) layers
    std::vector<StagePolicy> stages_;   // horizon layers
};

/// Backward sweep over remaining-opportunity states. Each stage is the
/// one-stage soft-constraint problem priced at the effective costs; the
/// Laplace source uses the closed-form threshold path.
DpTable solve_dp(int horizon, int noisy_budget, int perfect_budget,
                 const SourceDensity& density, double snr, const DpOptions& options = {});

/// Threshold decision for observation x at a state, availability included.
Action policy_lookup(const DpTable& table, int t, int noisy_left, int perfect_left,
                     double x);

/// Full-table export: columns t, En, Ep, J, beta1, beta2, c1t, c2t.
void write_table_csv(const DpTable& table, std::ostream& out);

} // namespace remest
