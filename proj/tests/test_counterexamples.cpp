#include <doctest.h>

#include <cmath>
#include <vector>

#include <json.hpp>

#include "remest/counterexamples.hpp"
#include "remest/errors.hpp"
#include "remest/rng.hpp"

#include "oracles.hpp"

using namespace remest;

namespace {

SourceDensity truncated_gaussian(double width, int points) {
    std::vector<double> grid(points);
    std::vector<double> pdf(points);
    for (int i = 0; i < points; ++i) {
        grid[i] = width * (2.0 * i - (points - 1)) / (points - 1);
        pdf[i] = std::exp(-0.5 * grid[i] * grid[i]);
    }
    for (int i = 0; i < points / 2; ++i) {
        grid[points - 1 - i] = -grid[i];
        pdf[points - 1 - i] = pdf[i];
    }
    double mass = 0.0;
    for (int i = 0; i + 1 < points; ++i) {
        mass += 0.5 * (pdf[i] + pdf[i + 1]) * (grid[i + 1] - grid[i]);
    }
    for (auto& p : pdf) {
        p /= mass;
    }
    return SourceDensity::tabulated(grid, pdf);
}

double pooled_noisy_variance(const PolicyRegions& regions, const SourceDensity& density,
                             bool positive_side_only) {
    std::vector<IntervalMoments> pieces;
    for (const auto& piece : regions.pieces()) {
        if (piece.action != Action::noisy) {
            continue;
        }
        const double lower = positive_side_only ? std::max(piece.lower, 0.0) : piece.lower;
        if (auto m = density.try_interval_moments(lower, piece.upper)) {
            pieces.push_back(*m);
        }
    }
    return combine_moments(pieces).variance;
}

} // namespace

TEST_CASE("uniform counterexample geometry") {
    const auto construction =
        build_uniform_counterexample(10.0, 0.5, 1.0, 0.5, 2.0, 1.0);

    // relocated noisy band (0.5, 1.5], original +-(0.5, 1]
    CHECK(construction.shifted.action_at(1.2) == Action::noisy);
    CHECK(construction.shifted.action_at(-0.7) == Action::perfect);
    CHECK(construction.original.action_at(-0.7) == Action::noisy);
    CHECK(construction.original.action_at(0.7) == Action::noisy);
    CHECK(construction.shifted.action_at(0.2) == Action::hold);

    for (int label = 0; label < 3; ++label) {
        CHECK(std::abs(construction.original_label_mass[label] -
                       construction.shifted_label_mass[label]) < 1e-12);
    }
    CHECK(construction.original_label_mass[1] == doctest::Approx(0.05).epsilon(1e-12));

    CHECK_THROWS_AS(build_uniform_counterexample(10.0, 0.5, 0.5, 0.5, 2.0, 1.0),
                    std::invalid_argument); // degenerate band
    CHECK_THROWS_AS(build_uniform_counterexample(10.0, 1.0, 6.0, 0.5, 2.0, 1.0),
                    GeometryViolation); // 2*beta2 - beta1 >= half width
}

TEST_CASE("the connected rearrangement strictly beats the threshold policy") {
    const auto density = SourceDensity::uniform(10.0);
    const auto construction =
        build_uniform_counterexample(10.0, 0.5, 1.0, 0.5, 2.0, 1.0);
    const auto costs = compare_costs(construction, density, 0.5, 2.0, 1.0);

    CHECK(costs.shifted - costs.original == doctest::Approx(-0.0125).epsilon(1e-9));

    // quadrature cross-check of the variance gap driving the difference
    auto pdf = [&density](double x) { return density.pdf(x); };
    const auto split_left = oracle::moments(pdf, -1.0, -0.5);
    const auto split_right = oracle::moments(pdf, 0.5, 1.0);
    const double pooled_second =
        (split_left.mass * (split_left.variance + split_left.mean * split_left.mean) +
         split_right.mass *
             (split_right.variance + split_right.mean * split_right.mean)) /
        (split_left.mass + split_right.mass);
    const auto connected = oracle::moments(pdf, 0.5, 1.5);
    const double mass = split_left.mass + split_right.mass;
    const double expected_gap = mass / 2.0 * (connected.variance - pooled_second);
    CHECK(costs.shifted - costs.original == doctest::Approx(expected_gap).epsilon(1e-9));

    // strictness with margin: at least half the variance-gap term
    const double margin = mass / 2.0 * (pooled_second - connected.variance) / 2.0;
    CHECK(costs.shifted < costs.original - margin);
}

TEST_CASE("inward shift construction") {
    const auto density = SourceDensity::laplace(1.0);

    SUBCASE("mass matching by bisection") {
        const auto construction = build_inward_shift(1.0, 2.0, 3.0, density);
        CHECK(std::abs(construction.original_label_mass[1] -
                       construction.shifted_label_mass[1]) < 1e-12);
        // frozen from bisection on exp(-1) - exp(-x) = exp(-2) - exp(-3)
        double shifted_upper = 0.0;
        for (const auto& piece : construction.shifted.pieces()) {
            if (piece.action == Action::noisy && piece.lower > 0.0) {
                shifted_upper = piece.upper;
            }
        }
        CHECK(shifted_upper == doctest::Approx(1.264674335944).epsilon(1e-9));
        CHECK(construction.side_channel == SideChannel::on);

        const double var_original = pooled_noisy_variance(construction.original, density,
                                                          /*positive_side_only=*/true);
        const double var_shifted = pooled_noisy_variance(construction.shifted, density,
                                                         /*positive_side_only=*/true);
        CHECK(var_shifted <= var_original);

        const auto costs = compare_costs(construction, density, 0.3, 2.0, 1.0);
        CHECK(costs.shifted <= costs.original + 1e-10);
    }

    SUBCASE("a band already at the hold threshold shifts to itself") {
        const auto construction = build_inward_shift(1.0, 1.0, 2.5, density);
        const auto costs = compare_costs(construction, density, 0.3, 2.0, 1.0);
        CHECK(costs.shifted == costs.original);
    }

    SUBCASE("uniform sources shift by plain translation") {
        const auto uniform = SourceDensity::uniform(8.0);
        const auto construction = build_inward_shift(0.5, 2.0, 3.25, uniform);
        double shifted_upper = 0.0;
        for (const auto& piece : construction.shifted.pieces()) {
            if (piece.action == Action::noisy && piece.lower > 0.0) {
                shifted_upper = piece.upper;
            }
        }
        CHECK(shifted_upper == 0.5 + (3.25 - 2.0));
    }

    SUBCASE("invalid geometry is rejected") {
        CHECK_THROWS_AS(build_inward_shift(2.0, 1.0, 3.0, density),
                        std::invalid_argument);
        CHECK_THROWS_AS(build_inward_shift(1.0, 3.0, 3.0, density),
                        std::invalid_argument);
    }
}

TEST_CASE("inward shifts never increase the cost across densities") {
    const auto laplace = SourceDensity::laplace(1.0);
    const auto uniform = SourceDensity::uniform(6.0);
    const auto gaussian = truncated_gaussian(5.0, 301);

    RngStream rng(271828);
    for (const auto& density : {laplace, uniform, gaussian}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double beta1 = 0.2 + 1.0 * rng.next_uniform();
            const double band_lower = beta1 + 0.1 + 1.5 * rng.next_uniform();
            const double band_upper = band_lower + 0.2 + 1.5 * rng.next_uniform();
            const auto construction =
                build_inward_shift(beta1, band_lower, band_upper, density);

            CHECK(std::abs(construction.original_label_mass[1] -
                           construction.shifted_label_mass[1]) < 1e-12);
            const double var_original =
                pooled_noisy_variance(construction.original, density, true);
            const double var_shifted =
                pooled_noisy_variance(construction.shifted, density, true);
            CHECK(var_shifted <= var_original + 1e-12);

            const auto costs = compare_costs(construction, density, 0.4, 2.0, 1.0);
            CHECK(costs.shifted <= costs.original + 1e-10);
        }
    }
}

TEST_CASE("json report carries the verdict and certificates") {
    const auto density = SourceDensity::uniform(10.0);
    const auto construction =
        build_uniform_counterexample(10.0, 0.5, 1.0, 0.5, 2.0, 1.0);
    const auto text = report_json(construction, density, 0.5, 2.0, 1.0);
    const auto parsed = nlohmann::json::parse(text);
    CHECK(parsed["verdict"] == "shifted_strictly_better");
    CHECK(parsed["side_channel"] == false);
    CHECK(parsed["J_shifted"].get<double>() < parsed["J_original"].get<double>());
    CHECK(parsed["original"]["label_mass"][1].get<double>() ==
          doctest::Approx(0.05));
    CHECK(parsed["difference"].get<double>() == doctest::Approx(-0.0125).epsilon(1e-9));
}
