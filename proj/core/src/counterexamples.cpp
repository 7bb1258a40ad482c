#include "remest/counterexamples.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "remest/errors.hpp"
#include "remest/format.hpp"

namespace remest {

namespace {

std::array<double, 3> label_masses(const PolicyRegions& regions,
                                   const SourceDensity& density) {
    std::array<double, 3> masses{0.0, 0.0, 0.0};
    for (const auto& piece : regions.pieces()) {
        if (auto m = density.try_interval_moments(piece.lower, piece.upper)) {
            masses[static_cast<int>(piece.action)] += m->mass;
        }
    }
    return masses;
}

/// Conditional variance of the (pooled) noisy region; one-sided pooling when
/// requested. Returns NaN for an empty region.
double noisy_variance(const PolicyRegions& regions, const SourceDensity& density,
                      SideChannel side_channel) {
    std::vector<IntervalMoments> pieces;
    for (const auto& piece : regions.pieces()) {
        if (piece.action != Action::noisy) {
            continue;
        }
        double lower = piece.lower;
        double upper = piece.upper;
        if (side_channel == SideChannel::on) {
            lower = std::max(lower, 0.0); // symmetric policy: mirror side matches
        }
        if (auto m = density.try_interval_moments(lower, upper)) {
            pieces.push_back(*m);
        }
    }
    if (pieces.empty()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    return combine_moments(pieces).variance;
}

} // namespace

ShiftConstruction build_uniform_counterexample(double half_width, double beta1,
                                               double beta2, double noisy_cost,
                                               double perfect_cost, double snr) {
    if (!(half_width > 0.0)) {
        throw std::invalid_argument("half_width must be positive");
    }
    if (!(0.0 < beta1) || !(beta1 < beta2)) {
        throw std::invalid_argument("construction requires 0 < beta1 < beta2");
    }
    if (!(noisy_cost < perfect_cost)) {
        throw std::invalid_argument("construction requires noisy_cost < perfect_cost");
    }
    if (!(snr > 0.0)) {
        throw std::invalid_argument("snr must be positive");
    }
    const double shifted_upper = 2.0 * beta2 - beta1;
    if (shifted_upper >= half_width) {
        throw GeometryViolation("relocated noisy band must stay inside the support: "
                                "2*beta2 - beta1 must be below half_width");
    }

    PolicyRegions original = threshold_regions(beta1, beta2, -half_width, half_width);
    PolicyRegions shifted(
        {
            {-half_width, -beta1, Action::perfect},
            {-beta1, beta1, Action::hold},
            {beta1, shifted_upper, Action::noisy},
            {shifted_upper, half_width, Action::perfect},
        },
        -half_width, half_width);

    const auto density = SourceDensity::uniform(half_width);
    auto original_mass = label_masses(original, density);
    auto shifted_mass = label_masses(shifted, density);
    return {std::move(original), std::move(shifted), original_mass, shifted_mass,
            SideChannel::off};
}

ShiftConstruction build_inward_shift(double beta1, double band_lower, double band_upper,
                                     const SourceDensity& density) {
    if (!(0.0 <= beta1) || !(beta1 <= band_lower) || !(band_lower < band_upper)) {
        throw std::invalid_argument(
            "inward shift requires 0 <= beta1 <= band_lower < band_upper");
    }

    double shifted_upper;
    if (band_lower == beta1) {
        shifted_upper = band_upper; // nothing to move
    } else if (density.kind() == DensityKind::uniform) {
        shifted_upper = beta1 + (band_upper - band_lower);
    } else {
        const double target = density.interval_moments(band_lower, band_upper).mass;
        double lo = beta1;
        double hi = band_upper;
        for (int iter = 0; iter < 200; ++iter) {
            const double mid = 0.5 * (lo + hi);
            const auto m = density.try_interval_moments(beta1, mid);
            const double mass = m ? m->mass : 0.0;
            if (std::abs(mass - target) < 1e-13) {
                lo = hi = mid;
                break;
            }
            (mass < target ? lo : hi) = mid;
        }
        shifted_upper = 0.5 * (lo + hi);
    }

    const double support_lower = density.support_lower();
    const double support_upper = density.support_upper();

    std::vector<LabeledInterval> original_pieces;
    auto push = [](std::vector<LabeledInterval>& pieces, double lo, double hi, Action a) {
        if (hi > lo) {
            pieces.push_back({lo, hi, a});
        }
    };
    push(original_pieces, support_lower, -band_upper, Action::perfect);
    push(original_pieces, -band_upper, -band_lower, Action::noisy);
    push(original_pieces, -band_lower, -beta1, Action::perfect);
    push(original_pieces, -beta1, beta1, Action::hold);
    push(original_pieces, beta1, band_lower, Action::perfect);
    push(original_pieces, band_lower, band_upper, Action::noisy);
    push(original_pieces, band_upper, support_upper, Action::perfect);

    std::vector<LabeledInterval> shifted_pieces;
    push(shifted_pieces, support_lower, -shifted_upper, Action::perfect);
    push(shifted_pieces, -shifted_upper, -beta1, Action::noisy);
    push(shifted_pieces, -beta1, beta1, Action::hold);
    push(shifted_pieces, beta1, shifted_upper, Action::noisy);
    push(shifted_pieces, shifted_upper, support_upper, Action::perfect);

    PolicyRegions original(std::move(original_pieces), support_lower, support_upper);
    PolicyRegions shifted(std::move(shifted_pieces), support_lower, support_upper);
    auto original_mass = label_masses(original, density);
    auto shifted_mass = label_masses(shifted, density);
    return {std::move(original), std::move(shifted), original_mass, shifted_mass,
            SideChannel::on};
}

CostComparison compare_costs(const ShiftConstruction& construction,
                             const SourceDensity& density, double noisy_cost,
                             double perfect_cost, double snr) {
    const StageCostParams params{noisy_cost, perfect_cost, snr, 0.0, 1.0};
    return {eval_region_cost(construction.original, density, params,
                             construction.side_channel),
            eval_region_cost(construction.shifted, density, params,
                             construction.side_channel)};
}

std::string report_json(const ShiftConstruction& construction,
                        const SourceDensity& density, double noisy_cost,
                        double perfect_cost, double snr) {
    const auto costs = compare_costs(construction, density, noisy_cost, perfect_cost, snr);

    auto bound_json = [](double bound) -> nlohmann::json {
        if (std::isfinite(bound)) {
            return round_g12(bound);
        }
        return bound > 0.0 ? "inf" : "-inf";
    };
    auto regions_json = [&bound_json](const PolicyRegions& regions) {
        nlohmann::json out = nlohmann::json::array();
        for (const auto& piece : regions.pieces()) {
            out.push_back({{"lower", bound_json(piece.lower)},
                           {"upper", bound_json(piece.upper)},
                           {"action", static_cast<int>(piece.action)}});
        }
        return out;
    };
    auto masses_json = [](const std::array<double, 3>& masses) {
        return nlohmann::json{round_g12(masses[0]), round_g12(masses[1]),
                              round_g12(masses[2])};
    };

    const double difference = costs.shifted - costs.original;
    std::string verdict = "inconclusive";
    if (difference < 0.0) {
        verdict = "shifted_strictly_better";
    } else if (difference == 0.0) {
        verdict = "equal";
    }

    nlohmann::json report{
        {"side_channel", construction.side_channel == SideChannel::on},
        {"original",
         {{"regions", regions_json(construction.original)},
          {"label_mass", masses_json(construction.original_label_mass)},
          {"noisy_variance",
           round_g12(noisy_variance(construction.original, density,
                                    construction.side_channel))}}},
        {"shifted",
         {{"regions", regions_json(construction.shifted)},
          {"label_mass", masses_json(construction.shifted_label_mass)},
          {"noisy_variance",
           round_g12(noisy_variance(construction.shifted, density,
                                    construction.side_channel))}}},
        {"J_original", round_g12(costs.original)},
        {"J_shifted", round_g12(costs.shifted)},
        {"difference", round_g12(difference)},
        {"verdict", verdict},
    };
    return report.dump(2);
}

} // namespace remest
