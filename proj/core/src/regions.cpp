#include "remest/regions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace remest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}

PolicyRegions::PolicyRegions(std::vector<LabeledInterval> pieces, double support_lower,
                             double support_upper)
    : pieces_(std::move(pieces)),
      support_lower_(support_lower),
      support_upper_(support_upper) {
    if (pieces_.empty()) {
        throw std::invalid_argument("policy regions must contain at least one piece");
    }
    std::sort(pieces_.begin(), pieces_.end(),
              [](const LabeledInterval& a, const LabeledInterval& b) {
                  return a.lower < b.lower;
              });
    for (const auto& piece : pieces_) {
        if (!(piece.lower < piece.upper)) {
            throw std::invalid_argument("policy region pieces must be nonempty");
        }
    }
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
        if (pieces_[i].upper != pieces_[i + 1].lower) {
            throw std::invalid_argument("policy region pieces must tile the support");
        }
    }
    if (pieces_.front().lower > support_lower_ || pieces_.back().upper < support_upper_) {
        throw std::invalid_argument("policy region pieces must cover the support");
    }
}

Action PolicyRegions::action_at(double x) const {
    for (const auto& piece : pieces_) {
        if (x <= piece.upper) {
            return piece.action;
        }
    }
    return pieces_.back().action;
}

namespace {

/// Breakpoints of the policy together with their mirror images; the action
/// map is constant between consecutive entries, so midpoint checks are exact.
std::vector<double> mirrored_breakpoints(std::span<const LabeledInterval> pieces) {
    std::vector<double> points;
    for (const auto& piece : pieces) {
        for (double v : {piece.lower, piece.upper}) {
            if (std::isfinite(v)) {
                points.push_back(v);
                points.push_back(-v);
            }
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

} // namespace

bool PolicyRegions::fully_symmetric() const {
    const auto points = mirrored_breakpoints(pieces_);
    if (points.empty()) {
        return true;
    }
    auto mirror_ok = [this](double x) { return action_at(x) == action_at(-x); };
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!mirror_ok(0.5 * (points[i] + points[i + 1]))) {
            return false;
        }
    }
    return mirror_ok(points.front() - 1.0) && mirror_ok(points.back() + 1.0);
}

bool PolicyRegions::hold_region_symmetric() const {
    const auto points = mirrored_breakpoints(pieces_);
    if (points.empty()) {
        return true;
    }
    auto mirror_ok = [this](double x) {
        return (action_at(x) == Action::hold) == (action_at(-x) == Action::hold);
    };
    for (std::size_t i = 0; i + 1 < points.size(); ++i) {
        if (!mirror_ok(0.5 * (points[i] + points[i + 1]))) {
            return false;
        }
    }
    return mirror_ok(points.front() - 1.0) && mirror_ok(points.back() + 1.0);
}

PolicyRegions threshold_regions(double beta1, double beta2, double support_lower,
                                double support_upper) {
    if (!(beta1 >= 0.0) || !(beta2 >= beta1)) {
        throw std::invalid_argument("thresholds must satisfy 0 <= beta1 <= beta2");
    }
    std::vector<LabeledInterval> pieces;
    const double b1 = std::min(beta1, support_upper);
    const double b2 = std::min(beta2, support_upper);
    double left = support_lower;
    auto append = [&pieces, &left](double upper, Action action) {
        if (upper > left) {
            pieces.push_back({left, upper, action});
            left = upper;
        }
    };
    append(-b2, Action::perfect);
    append(-b1, Action::noisy);
    append(b1, Action::hold);
    append(b2, Action::noisy);
    append(support_upper, Action::perfect);
    if (pieces.empty()) {
        pieces.push_back({support_lower, support_upper, Action::hold});
    }
    return PolicyRegions(std::move(pieces), support_lower, support_upper);
}

} // namespace remest
