#pragma once

#include <span>
#include <vector>

namespace remest {

/// Per-step decision: keep silent, use the power-constrained noisy channel,
/// or use the (more expensive) perfect channel.
enum class Action : int { hold = 0, noisy = 1, perfect = 2 };

/// Half-open piece (lower, upper] of the real line with its scheduled action.
struct LabeledInterval {
    double lower;
    double upper;
    Action action;
};

/// A measurable partition of the source support into hold / noisy / perfect
/// pieces. Pieces are kept sorted and contiguous; boundaries are measure
/// zero, the first piece also contains its lower endpoint.
class PolicyRegions {
public:
    PolicyRegions(std::vector<LabeledInterval> pieces, double support_lower,
                  double support_upper);

    Action action_at(double x) const;

    /// action(x) == action(-x) for all x (up to measure zero).
    bool fully_symmetric() const;

    /// Only the hold region is required to mirror (enough for the zero
    /// estimate to be optimal when nothing is transmitted).
    bool hold_region_symmetric() const;

    std::span<const LabeledInterval> pieces() const { return pieces_; }
    double support_lower() const { return support_lower_; }
    double support_upper() const { return support_upper_; }

private:
    std::vector<LabeledInterval> pieces_;
    double support_lower_;
    double support_upper_;
};

/// The threshold-in-threshold policy: hold for |x| <= beta1, noisy for
/// beta1 < |x| <= beta2, perfect beyond. Empty bands are omitted.
PolicyRegions threshold_regions(double beta1, double beta2, double support_lower,
                                double support_upper);

} // namespace remest
