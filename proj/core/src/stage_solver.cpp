#include "remest/stage_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "remest/errors.hpp"

namespace remest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kResidualTol = 1e-10;

void validate_stage_inputs(double noisy_cost, double perfect_cost, double snr) {
    if (!(noisy_cost >= 0.0) || !(perfect_cost >= 0.0)) {
        throw std::invalid_argument("channel costs must be nonnegative");
    }
    if (!(snr > 0.0)) {
        throw std::invalid_argument("snr must be positive");
    }
}

} // namespace

StageCosts stage_costs(double x, const StageCostParams& params, double noise_variance) {
    const CodecParams codec{params.gain, params.offset, params.snr};
    return {x * x, params.noisy_cost + expected_sq_error(x, codec, noise_variance),
            params.perfect_cost};
}

double eval_region_cost(const PolicyRegions& regions, const SourceDensity& density,
                        const StageCostParams& params, SideChannel side_channel) {
    if (!regions.hold_region_symmetric()) {
        throw AsymmetricPolicy("hold region must mirror around zero");
    }
    if (side_channel == SideChannel::on && !regions.fully_symmetric()) {
        throw AsymmetricPolicy("side-channel evaluation requires a symmetric policy");
    }

    double hold_second_moment = 0.0; // E[X^2; hold]
    double perfect_mass = 0.0;
    std::vector<IntervalMoments> noisy_pieces;
    std::vector<IntervalMoments> noisy_negative; // side-channel split at zero

    for (const auto& piece : regions.pieces()) {
        switch (piece.action) {
        case Action::hold:
            if (auto m = density.try_interval_moments(piece.lower, piece.upper)) {
                hold_second_moment += m->mass * m->second_moment();
            }
            break;
        case Action::perfect:
            if (auto m = density.try_interval_moments(piece.lower, piece.upper)) {
                perfect_mass += m->mass;
            }
            break;
        case Action::noisy:
            if (side_channel == SideChannel::on && piece.lower < 0.0 && piece.upper > 0.0) {
                if (auto m = density.try_interval_moments(piece.lower, 0.0)) {
                    noisy_negative.push_back(*m);
                }
                if (auto m = density.try_interval_moments(0.0, piece.upper)) {
                    noisy_pieces.push_back(*m);
                }
            } else if (side_channel == SideChannel::on && piece.upper <= 0.0) {
                if (auto m = density.try_interval_moments(piece.lower, piece.upper)) {
                    noisy_negative.push_back(*m);
                }
            } else {
                if (auto m = density.try_interval_moments(piece.lower, piece.upper)) {
                    noisy_pieces.push_back(*m);
                }
            }
            break;
        }
    }

    double cost = hold_second_moment + params.perfect_cost * perfect_mass;
    auto add_band = [&](std::span<const IntervalMoments> pieces) {
        if (pieces.empty()) {
            return;
        }
        const auto band = combine_moments(pieces);
        cost += params.noisy_cost * band.mass +
                noisy_channel_mse(band.variance, params.snr) * band.mass;
    };
    add_band(noisy_pieces);
    add_band(noisy_negative);
    return cost;
}

double eval_threshold_cost(double beta1, double beta2, const SourceDensity& density,
                           double noisy_cost, double perfect_cost, double snr) {
    if (!(beta1 >= 0.0) || !(beta2 >= beta1)) {
        throw std::invalid_argument("thresholds must satisfy 0 <= beta1 <= beta2");
    }
    double cost = 0.0;
    if (auto head = density.try_interval_moments(0.0, beta1)) {
        cost += 2.0 * head->mass * head->second_moment();
    }
    if (beta2 > beta1) {
        if (auto band = density.try_interval_moments(beta1, beta2)) {
            cost += 2.0 * band->mass *
                    (noisy_cost + noisy_channel_mse(band->variance, snr));
        }
    }
    if (beta2 < density.support_upper()) {
        if (auto tail = density.try_interval_moments(beta2, density.support_upper())) {
            cost += 2.0 * perfect_cost * tail->mass;
        }
    }
    return cost;
}

std::array<double, 2> first_order_residuals(double beta1, double beta2,
                                            const SourceDensity& density,
                                            double noisy_cost, double perfect_cost,
                                            double snr) {
    const auto band = density.try_interval_moments(beta1, beta2);
    const double m = band ? band->mean : beta1;
    const double r1 =
        beta1 * beta1 - (beta1 - m) * (beta1 - m) / (snr + 1.0) - noisy_cost;
    const double r2 = (beta2 - m) * (beta2 - m) / (snr + 1.0) + noisy_cost - perfect_cost;
    return {r1, r2};
}

Action threshold_action(double x, double beta1, double beta2) {
    const double magnitude = std::abs(x);
    if (magnitude <= beta1) {
        return Action::hold;
    }
    if (magnitude <= beta2) {
        return Action::noisy;
    }
    return Action::perfect;
}

namespace {

SoftSolution perfect_only_solution(const SourceDensity& density, double noisy_cost,
                                   double perfect_cost, double snr) {
    const double beta = std::sqrt(perfect_cost);
    SoftSolution solution;
    solution.beta1 = beta;
    solution.beta2 = beta;
    solution.cost = eval_threshold_cost(beta, beta, density, noisy_cost, perfect_cost, snr);
    solution.used_boundary = true;
    solution.residuals =
        first_order_residuals(beta, beta, density, noisy_cost, perfect_cost, snr);
    return solution;
}

std::optional<CodecParams> codec_for_band(const SourceDensity& density, double beta1,
                                          double beta2, double snr) {
    const auto band = density.try_interval_moments(beta1, beta2);
    if (!band || !(band->variance > 0.0)) {
        return std::nullopt;
    }
    return CodecParams::from_band(*band, ChannelParams{1.0, snr});
}

/// Golden-section minimization after a coarse scan; assumes nothing beyond
/// continuity, the scan pins the basin.
double minimize_scan_refine(const std::function<double(double)>& f, double lo, double hi) {
    constexpr int kScanPoints = 256;
    double best_x = lo;
    double best_f = f(lo);
    for (int i = 1; i <= kScanPoints; ++i) {
        const double x = lo + (hi - lo) * i / kScanPoints;
        const double fx = f(x);
        if (fx < best_f) {
            best_f = fx;
            best_x = x;
        }
    }
    const double step = (hi - lo) / kScanPoints;
    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);
    constexpr double kGolden = 0.6180339887498949;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    for (int iter = 0; iter < 200 && (b - a) > 1e-12 * std::max(1.0, std::abs(b)); ++iter) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kGolden * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kGolden * (b - a);
            f2 = f(x2);
        }
    }
    return f1 < f2 ? x1 : x2;
}

struct InteriorCandidate {
    double beta1;
    double beta2;
    double cost;
};

/// One damped fixed-point run on the band's conditional mean. Returns the
/// converged candidate or nullopt if this start diverged or stalled.
std::optional<InteriorCandidate> fixed_point_run(const SourceDensity& density,
                                                 double noisy_cost, double perfect_cost,
                                                 double snr, double initial_mean,
                                                 std::array<double, 2>& last_residuals,
                                                 int max_iterations) {
    const double gap = std::sqrt((perfect_cost - noisy_cost) * (1.0 + snr));
    double m = initial_mean;
    for (int iter = 0; iter < max_iterations; ++iter) {
        const double beta2 = m + gap;
        // beta1 solves beta1^2 - (beta1 - m)^2/(snr+1) = c1 (positive root).
        const double a = snr / (snr + 1.0);
        const double b = 2.0 * m / (snr + 1.0);
        const double c = -(m * m / (snr + 1.0) + noisy_cost);
        const double disc = b * b - 4.0 * a * c;
        if (!(disc >= 0.0)) {
            return std::nullopt;
        }
        const double beta1 = (-b + std::sqrt(disc)) / (2.0 * a);
        if (!(beta1 >= 0.0) || !(beta1 < beta2)) {
            return std::nullopt;
        }
        const auto band = density.try_interval_moments(beta1, beta2);
        if (!band) {
            return std::nullopt;
        }
        last_residuals =
            first_order_residuals(beta1, beta2, density, noisy_cost, perfect_cost, snr);
        if (std::max(std::abs(last_residuals[0]), std::abs(last_residuals[1])) <
            kResidualTol) {
            return InteriorCandidate{
                beta1, beta2,
                eval_threshold_cost(beta1, beta2, density, noisy_cost, perfect_cost, snr)};
        }
        m = 0.5 * m + 0.5 * band->mean;
    }
    return std::nullopt;
}

} // namespace

SoftSolution solve_laplace_thresholds(double noisy_cost, double perfect_cost, double snr,
                                      double rate) {
    validate_stage_inputs(noisy_cost, perfect_cost, snr);
    if (!(rate > 0.0)) {
        throw std::invalid_argument("rate must be positive");
    }
    const auto density = SourceDensity::laplace(rate);
    if (noisy_cost >= perfect_cost) {
        // The noisy channel is dominated; only the perfect channel remains.
        return perfect_only_solution(density, noisy_cost, perfect_cost, snr);
    }

    // width * e^{rate*width} / (e^{rate*width} - 1) is strictly increasing
    // from 1/rate to infinity; bracket and bisect the unique root.
    const double gap = std::sqrt((perfect_cost - noisy_cost) * (1.0 + snr));
    const double target = 1.0 / rate + gap;
    auto lhs = [rate](double width) { return width / (-std::expm1(-rate * width)); };
    double hi = 1.0 / rate;
    int doublings = 0;
    while (lhs(hi) < target) {
        hi *= 2.0;
        if (++doublings > 1000) {
            throw NoBracket("band-width equation failed to bracket");
        }
    }
    double lo = 0.0;
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-16 * std::max(1.0, hi); ++iter) {
        const double mid = 0.5 * (lo + hi);
        (lhs(mid) < target ? lo : hi) = mid;
    }
    const double width = 0.5 * (lo + hi);
    const double beta1 =
        std::sqrt(noisy_cost + (width - gap) * (width - gap) / (1.0 + snr));
    const double beta2 = beta1 + width;

    SoftSolution interior;
    interior.beta1 = beta1;
    interior.beta2 = beta2;
    interior.cost =
        eval_threshold_cost(beta1, beta2, density, noisy_cost, perfect_cost, snr);
    interior.used_boundary = false;
    interior.codec = codec_for_band(density, beta1, beta2, snr);
    interior.residuals =
        first_order_residuals(beta1, beta2, density, noisy_cost, perfect_cost, snr);

    const auto boundary = perfect_only_solution(density, noisy_cost, perfect_cost, snr);
    return interior.cost <= boundary.cost ? interior : boundary;
}

SoftSolution solve_generic_thresholds(const SourceDensity& density, double noisy_cost,
                                      double perfect_cost, double snr) {
    validate_stage_inputs(noisy_cost, perfect_cost, snr);
    if (noisy_cost >= perfect_cost) {
        return perfect_only_solution(density, noisy_cost, perfect_cost, snr);
    }

    const double cap = density.upper_tail_cap();
    const double sigma = std::sqrt(density.variance());

    std::vector<double> starts;
    if (auto positive = density.try_interval_moments(0.0, density.support_upper())) {
        starts.push_back(positive->mean);
    }
    RngStream restart_rng(0x5eedu);
    while (starts.size() < 8) {
        starts.push_back(3.0 * sigma * restart_rng.next_uniform());
    }

    std::vector<InteriorCandidate> interior;
    std::array<double, 2> last_residuals{kInf, kInf};
    for (double start : starts) {
        if (auto candidate = fixed_point_run(density, noisy_cost, perfect_cost, snr, start,
                                             last_residuals, 10000)) {
            interior.push_back(*candidate);
        }
    }
    if (interior.empty()) {
        throw NonConvergence("threshold fixed point did not converge from any restart",
                             last_residuals[0], last_residuals[1]);
    }

    const auto best_interior =
        *std::min_element(interior.begin(), interior.end(),
                          [](const auto& a, const auto& b) { return a.cost < b.cost; });

    // Boundary candidates the interior roots must beat: the perfect-only
    // collapse plus the degenerate edges beta1=0 and beta2=inf, each
    // optimized along its free coordinate.
    const auto collapse = perfect_only_solution(density, noisy_cost, perfect_cost, snr);

    auto no_hold_cost = [&](double beta2) {
        return eval_threshold_cost(0.0, beta2, density, noisy_cost, perfect_cost, snr);
    };
    const double no_hold_beta2 = minimize_scan_refine(no_hold_cost, 0.0, cap);

    auto no_perfect_cost = [&](double beta1) {
        return eval_threshold_cost(beta1, kInf, density, noisy_cost, perfect_cost, snr);
    };
    const double no_perfect_beta1 = minimize_scan_refine(no_perfect_cost, 0.0, cap);

    struct Candidate {
        double beta1;
        double beta2;
        double cost;
        bool boundary;
    };
    const std::array<Candidate, 4> candidates{
        Candidate{best_interior.beta1, best_interior.beta2, best_interior.cost, false},
        Candidate{collapse.beta1, collapse.beta2, collapse.cost, true},
        Candidate{0.0, no_hold_beta2, no_hold_cost(no_hold_beta2), true},
        Candidate{no_perfect_beta1, kInf, no_perfect_cost(no_perfect_beta1), true},
    };
    const auto& best =
        *std::min_element(candidates.begin(), candidates.end(),
                          [](const auto& a, const auto& b) { return a.cost < b.cost; });

    SoftSolution solution;
    solution.beta1 = best.beta1;
    solution.beta2 = best.beta2;
    solution.cost = best.cost;
    solution.used_boundary = best.boundary;
    solution.codec = codec_for_band(density, best.beta1, best.beta2, snr);
    solution.residuals = first_order_residuals(best.beta1, best.beta2, density, noisy_cost,
                                               perfect_cost, snr);
    return solution;
}

} // namespace remest
