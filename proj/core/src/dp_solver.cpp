#include "remest/dp_solver.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "remest/errors.hpp"
#include "remest/format.hpp"
#include "remest/parallel.hpp"

namespace remest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct StageResult {
    double cost = 0.0;
    StagePolicy policy;
};

void attach_band_moments(StageResult& result, const SourceDensity& density) {
    if (result.policy.beta2 > result.policy.beta1) {
        if (auto band = density.try_interval_moments(result.policy.beta1,
                                                     result.policy.beta2)) {
            result.policy.band_mean = band->mean;
            result.policy.band_variance = band->variance;
            return;
        }
    }
    result.policy.band_mean = kNan;
    result.policy.band_variance = kNan;
}

/// Only the perfect channel is available: hold below sqrt(c2), transmit
/// perfectly beyond. c2 = 0 makes the threshold 0 and the stage free.
StageResult solve_perfect_only_stage(const SourceDensity& density, double perfect_cost,
                                     double snr) {
    StageResult result;
    const double beta = std::sqrt(perfect_cost);
    result.policy.beta1 = beta;
    result.policy.beta2 = beta;
    result.cost = eval_threshold_cost(beta, beta, density, 0.0, perfect_cost, snr);
    return result;
}

/// Only the noisy channel is available (beta2 = inf). The Laplace source has
/// the stationary point in closed form; other densities scan-and-refine.
StageResult solve_noisy_only_stage(const SourceDensity& density, double noisy_cost,
                                   double snr) {
    StageResult result;
    double beta1 = 0.0;
    if (density.kind() == DensityKind::laplace) {
        const double rate = density.rate();
        beta1 = std::sqrt(noisy_cost + 1.0 / (rate * rate * (1.0 + snr)));
    } else {
        auto cost_at = [&](double beta) {
            return eval_threshold_cost(beta, kInf, density, noisy_cost, 0.0, snr);
        };
        const double cap = density.upper_tail_cap();
        double best = cap;
        double best_cost = cost_at(cap);
        constexpr int kScan = 256;
        for (int i = 0; i <= kScan; ++i) {
            const double beta = cap * i / kScan;
            const double c = cost_at(beta);
            if (c < best_cost) {
                best_cost = c;
                best = beta;
            }
        }
        double lo = std::max(0.0, best - cap / kScan);
        double hi = std::min(cap, best + cap / kScan);
        for (int iter = 0; iter < 100; ++iter) {
            const double m1 = lo + (hi - lo) / 3.0;
            const double m2 = hi - (hi - lo) / 3.0;
            if (cost_at(m1) < cost_at(m2)) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        beta1 = 0.5 * (lo + hi);
    }
    result.policy.beta1 = beta1;
    result.policy.beta2 = kInf;
    result.cost = eval_threshold_cost(beta1, kInf, density, noisy_cost, 0.0, snr);
    return result;
}

StageResult solve_stage(const SourceDensity& density, double snr, bool noisy_available,
                        bool perfect_available, double noisy_cost, double perfect_cost) {
    StageResult result;
    if (!noisy_available && !perfect_available) {
        result.policy.beta1 = kInf;
        result.policy.beta2 = kInf;
        result.cost = density.variance();
    } else if (!noisy_available) {
        result = solve_perfect_only_stage(density, perfect_cost, snr);
    } else if (!perfect_available) {
        result = solve_noisy_only_stage(density, noisy_cost, snr);
    } else if (noisy_cost >= perfect_cost) {
        // A dominated noisy channel collapses the stage to perfect-only.
        result = solve_perfect_only_stage(density, perfect_cost, snr);
    } else {
        const SoftSolution solution =
            density.kind() == DensityKind::laplace
                ? solve_laplace_thresholds(noisy_cost, perfect_cost, snr, density.rate())
                : solve_generic_thresholds(density, noisy_cost, perfect_cost, snr);
        result.policy.beta1 = solution.beta1;
        result.policy.beta2 = solution.beta2;
        result.cost = solution.cost;
    }
    attach_band_moments(result, density);
    return result;
}

} // namespace

std::size_t DpTable::state_index(int noisy_left, int perfect_left) const {
    return static_cast<std::size_t>(noisy_left) * (perfect_budget_ + 1) + perfect_left;
}

double DpTable::value(int t, int noisy_left, int perfect_left) const {
    if (t < 1 || t > horizon_ + 1 || noisy_left < 0 || noisy_left > noisy_budget_ ||
        perfect_left < 0 || perfect_left > perfect_budget_) {
        throw std::out_of_range("dp state out of range");
    }
    const std::size_t layer = static_cast<std::size_t>(noisy_budget_ + 1) *
                              static_cast<std::size_t>(perfect_budget_ + 1);
    return values_[(t - 1) * layer + state_index(noisy_left, perfect_left)];
}

const StagePolicy& DpTable::stage(int t, int noisy_left, int perfect_left) const {
    if (t < 1 || t > horizon_ || noisy_left < 0 || noisy_left > noisy_budget_ ||
        perfect_left < 0 || perfect_left > perfect_budget_) {
        throw std::out_of_range("dp state out of range");
    }
    const std::size_t layer = static_cast<std::size_t>(noisy_budget_ + 1) *
                              static_cast<std::size_t>(perfect_budget_ + 1);
    return stages_[(t - 1) * layer + state_index(noisy_left, perfect_left)];
}

DpTable solve_dp(int horizon, int noisy_budget, int perfect_budget,
                 const SourceDensity& density, double snr, const DpOptions& options) {
    if (horizon < 1) {
        throw std::invalid_argument("horizon must be at least 1");
    }
    if (noisy_budget < 0 || perfect_budget < 0) {
        throw std::invalid_argument("channel budgets must be nonnegative");
    }
    if (!(snr > 0.0)) {
        throw std::invalid_argument("snr must be positive");
    }

    DpTable table;
    table.horizon_ = horizon;
    table.noisy_budget_ = noisy_budget;
    table.perfect_budget_ = perfect_budget;
    table.density_ = density;
    table.snr_ = snr;

    const std::size_t layer = static_cast<std::size_t>(noisy_budget + 1) *
                              static_cast<std::size_t>(perfect_budget + 1);
    table.values_.assign((horizon + 1) * layer, 0.0);
    table.stages_.assign(horizon * layer, StagePolicy{});

    for (int t = horizon; t >= 1; --t) {
        double* current = table.values_.data() + (t - 1) * layer;
        const double* next = table.values_.data() + t * layer;
        StagePolicy* policies = table.stages_.data() + (t - 1) * layer;

        parallel_for(static_cast<int>(layer), options.workers, [&](int s) {
            const int noisy_left = s / (perfect_budget + 1);
            const int perfect_left = s % (perfect_budget + 1);
            const double continue_value = next[s];

            const bool noisy_available = noisy_left >= 1;
            const bool perfect_available = perfect_left >= 1;
            const double raw_noisy_cost =
                noisy_available ? next[s - (perfect_budget + 1)] - continue_value : 0.0;
            const double raw_perfect_cost =
                perfect_available ? next[s - 1] - continue_value : 0.0;

            StageResult stage = solve_stage(
                density, snr, noisy_available, perfect_available,
                std::max(0.0, raw_noisy_cost), std::max(0.0, raw_perfect_cost));
            stage.policy.effective_noisy_cost = raw_noisy_cost;
            stage.policy.effective_perfect_cost = raw_perfect_cost;

            current[s] = continue_value + stage.cost;
            policies[s] = stage.policy;
        });
    }
    return table;
}

Action policy_lookup(const DpTable& table, int t, int noisy_left, int perfect_left,
                     double x) {
    const StagePolicy& policy = table.stage(t, noisy_left, perfect_left);
    return threshold_action(x, policy.beta1, policy.beta2);
}

void write_table_csv(const DpTable& table, std::ostream& out) {
    out << "t,En,Ep,J,beta1,beta2,c1t,c2t\n";
    for (int t = 1; t <= table.horizon(); ++t) {
        for (int en = 0; en <= table.noisy_budget(); ++en) {
            for (int ep = 0; ep <= table.perfect_budget(); ++ep) {
                const StagePolicy& policy = table.stage(t, en, ep);
                out << t << ',' << en << ',' << ep << ',' << fmt_g12(table.value(t, en, ep))
                    << ',' << fmt_g12(policy.beta1) << ',' << fmt_g12(policy.beta2) << ','
                    << fmt_g12(policy.effective_noisy_cost) << ','
                    << fmt_g12(policy.effective_perfect_cost) << '\n';
            }
        }
    }
}

} // namespace remest
