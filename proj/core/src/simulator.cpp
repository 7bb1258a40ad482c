#include "remest/simulator.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "remest/errors.hpp"
#include "remest/format.hpp"
#include "remest/parallel.hpp"
#include "remest/rng.hpp"

namespace remest {

namespace {

void check_config(const EpisodeConfig& config, const DpTable& table) {
    if (config.horizon != table.horizon() || config.noisy_budget != table.noisy_budget() ||
        config.perfect_budget != table.perfect_budget()) {
        throw ConfigMismatch("episode dimensions do not match the solved table");
    }
    if (config.snr != table.snr() || !(config.density == table.density())) {
        throw ConfigMismatch("episode source/channel does not match the solved table");
    }
    const double expected_noise = config.power / config.snr;
    if (std::abs(config.noise.variance - expected_noise) >
        1e-12 * std::max(1.0, expected_noise)) {
        throw std::invalid_argument(
            "noise.variance must equal power/snr for the configured channel");
    }
    if (config.episodes < 1) {
        throw std::invalid_argument("episodes must be at least 1");
    }
}

} // namespace

SamplePath run_episode(const EpisodeConfig& config, const DpTable& table,
                       std::uint64_t seed) {
    check_config(config, table);

    RngStream rng(seed);
    SamplePath path;
    path.steps.reserve(config.horizon);

    int noisy_left = config.noisy_budget;
    int perfect_left = config.perfect_budget;

    for (int t = 1; t <= config.horizon; ++t) {
        const double x = config.density.sample(rng);
        const Action action = policy_lookup(table, t, noisy_left, perfect_left, x);

        StepRecord step;
        step.x = x;
        step.action = action;
        step.noisy_left = noisy_left;
        step.perfect_left = perfect_left;

        switch (action) {
        case Action::hold:
            step.estimate = 0.0;
            break;
        case Action::noisy: {
            const StagePolicy& policy = table.stage(t, noisy_left, perfect_left);
            const CodecParams codec{std::sqrt(config.power / policy.band_variance),
                                    policy.band_mean, config.snr};
            const Sign s = sign_of(x);
            const double received = encode(x, s, codec) + config.noise.sample(rng);
            step.received = received;
            step.sign = s;
            step.estimate = decode(received, s, codec);
            --noisy_left;
            break;
        }
        case Action::perfect:
            step.received = x;
            step.estimate = x;
            --perfect_left;
            break;
        }

        step.sq_error = (x - step.estimate) * (x - step.estimate);
        path.total_cost += step.sq_error;
        path.steps.push_back(step);
    }

    path.final_noisy_left = noisy_left;
    path.final_perfect_left = perfect_left;
    return path;
}

MonteCarloEstimate monte_carlo_cost(const EpisodeConfig& config, const DpTable& table,
                                    int workers) {
    check_config(config, table);

    std::vector<double> costs(config.episodes);
    parallel_for(config.episodes, workers, [&](int episode) {
        costs[episode] =
            run_episode(config, table, derive_seed(config.seed, episode)).total_cost;
    });

    double mean = 0.0;
    for (double cost : costs) {
        mean += cost;
    }
    mean /= costs.size();

    double ss = 0.0;
    for (double cost : costs) {
        ss += (cost - mean) * (cost - mean);
    }
    const double std_error =
        costs.size() > 1 ? std::sqrt(ss / (costs.size() - 1.0) / costs.size()) : 0.0;
    return {mean, std_error, static_cast<int>(costs.size())};
}

void write_path_csv(const SamplePath& path, std::ostream& out) {
    out << "t,x,u,y_tilde,s,xhat,sqerr,En,Ep\n";
    for (std::size_t i = 0; i < path.steps.size(); ++i) {
        const StepRecord& step = path.steps[i];
        out << (i + 1) << ',' << fmt_g12(step.x) << ','
            << static_cast<int>(step.action) << ',';
        if (step.received) {
            out << fmt_g12(*step.received);
        }
        out << ',';
        if (step.sign) {
            out << static_cast<int>(*step.sign);
        }
        out << ',' << fmt_g12(step.estimate) << ',' << fmt_g12(step.sq_error) << ','
            << step.noisy_left << ',' << step.perfect_left << '\n';
    }
}

} // namespace remest
