// remest command-line front end: one-stage threshold solves, hard-constraint
// dynamic programs, budget sweeps, closed-loop simulation, and the region
// rearrangement comparisons. Emits plot-ready CSV and JSON with stable
// schemas; every command is a pure function of (config, seed).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "remest/counterexamples.hpp"
#include "remest/densities.hpp"
#include "remest/dp_solver.hpp"
#include "remest/errors.hpp"
#include "remest/format.hpp"
#include "remest/parallel.hpp"
#include "remest/simulator.hpp"
#include "remest/stage_solver.hpp"

namespace {

using nlohmann::json;
using namespace remest;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitInconclusive = 4;

struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    int horizon = 100;
    int noisy_budget = 40;
    int perfect_budget = 40;
    double lambda = 1.0;
    double gamma = 1.0;
    double c1 = 0.5;
    double c2 = 2.0;
    std::uint64_t seed = 0;
    int episodes = 1;
    std::string density = "laplace";
    double half_width = 10.0;
    std::string noise = "gaussian";
    std::string out;
    int workers = 1;
    std::string config_path;

    // sweep
    std::string axis = "N1";
    std::vector<int> fixed{0, 10, 20};

    // counterexample
    std::string construction = "uniform";
    double ce_half_width = 10.0;
    double ce_beta1 = 0.5;
    double ce_beta2 = 1.0;
    double ce_band_lower = 2.0;
    double ce_band_upper = 3.0;

    // tabulated densities come from the config file only
    std::vector<double> grid_x;
    std::vector<double> grid_pdf;
};

/// Remembers which config keys are bound to which CLI options so that
/// config-file values only apply where no flag was given.
struct CommonFlags {
    std::vector<std::pair<std::string, CLI::Option*>> bound;
};

void register_common(CLI::App* cmd, Options& opt, CommonFlags& flags) {
    auto bind = [&flags](const std::string& key, CLI::Option* option) {
        flags.bound.emplace_back(key, option);
    };
    bind("T", cmd->add_option("--T", opt.horizon, "horizon length"));
    bind("N1", cmd->add_option("--N1", opt.noisy_budget, "noisy-channel budget"));
    bind("N2", cmd->add_option("--N2", opt.perfect_budget, "perfect-channel budget"));
    bind("lambda", cmd->add_option("--lambda", opt.lambda, "laplace rate"));
    bind("gamma", cmd->add_option("--gamma", opt.gamma, "channel snr"));
    bind("c1", cmd->add_option("--c1", opt.c1, "noisy-channel cost"));
    bind("c2", cmd->add_option("--c2", opt.c2, "perfect-channel cost"));
    bind("seed", cmd->add_option("--seed", opt.seed, "master seed"));
    bind("episodes", cmd->add_option("--episodes", opt.episodes, "monte carlo episodes"));
    bind("density", cmd->add_option("--density", opt.density, "laplace | uniform"));
    bind("halfwidth",
         cmd->add_option("--halfwidth", opt.half_width, "uniform half width"));
    bind("noise", cmd->add_option("--noise", opt.noise, "gaussian | uniform | laplace"));
    bind("out", cmd->add_option("--out", opt.out, "output file path"));
    bind("workers", cmd->add_option("--workers", opt.workers, "worker thread cap"));
    cmd->add_option("--config", opt.config_path, "JSON config file; flags win");
}

/// Applies config-file values underneath explicit flags.
void merge_config(Options& opt, const CommonFlags& flags) {
    if (opt.config_path.empty()) {
        return;
    }
    std::ifstream in(opt.config_path);
    if (!in) {
        throw ValidationError("config: cannot open " + opt.config_path);
    }
    json config;
    try {
        in >> config;
    } catch (const json::parse_error& err) {
        throw ValidationError(std::string("config: invalid JSON: ") + err.what());
    }

    auto flag_given = [&flags](const std::string& key) {
        for (const auto& [name, option] : flags.bound) {
            if (name == key) {
                return option->count() > 0;
            }
        }
        return false;
    };
    auto load = [&](const char* key, auto& target) {
        if (config.contains(key) && !flag_given(key)) {
            try {
                target = config.at(key).get<std::decay_t<decltype(target)>>();
            } catch (const json::exception&) {
                throw ValidationError(std::string("config: field \"") + key +
                                      "\" has the wrong type");
            }
        }
    };
    load("T", opt.horizon);
    load("N1", opt.noisy_budget);
    load("N2", opt.perfect_budget);
    load("lambda", opt.lambda);
    load("gamma", opt.gamma);
    load("c1", opt.c1);
    load("c2", opt.c2);
    load("seed", opt.seed);
    load("episodes", opt.episodes);
    load("density", opt.density);
    load("halfwidth", opt.half_width);
    load("noise", opt.noise);
    load("out", opt.out);
    load("workers", opt.workers);
    load("axis", opt.axis);
    load("fixed", opt.fixed);
    load("construction", opt.construction);
    load("L", opt.ce_half_width);
    load("beta1", opt.ce_beta1);
    load("beta2", opt.ce_beta2);
    load("beta12l", opt.ce_band_lower);
    load("beta12r", opt.ce_band_upper);
    load("grid_x", opt.grid_x);
    load("grid_pdf", opt.grid_pdf);
}

void validate_common(const Options& opt) {
    if (opt.horizon < 1) {
        throw ValidationError("T must be at least 1");
    }
    if (opt.noisy_budget < 0) {
        throw ValidationError("N1 must be nonnegative");
    }
    if (opt.perfect_budget < 0) {
        throw ValidationError("N2 must be nonnegative");
    }
    if (!(opt.lambda > 0.0)) {
        throw ValidationError("lambda must be positive");
    }
    if (!(opt.gamma > 0.0)) {
        throw ValidationError("gamma must be positive");
    }
    if (!(opt.c1 >= 0.0)) {
        throw ValidationError("c1 must be nonnegative");
    }
    if (!(opt.c2 >= 0.0)) {
        throw ValidationError("c2 must be nonnegative");
    }
    if (opt.episodes < 1) {
        throw ValidationError("episodes must be at least 1");
    }
    if (opt.workers < 1) {
        throw ValidationError("workers must be at least 1");
    }
    if (!(opt.half_width > 0.0)) {
        throw ValidationError("halfwidth must be positive");
    }
}

SourceDensity make_density(const Options& opt) {
    if (opt.density == "laplace") {
        return SourceDensity::laplace(opt.lambda);
    }
    if (opt.density == "uniform") {
        return SourceDensity::uniform(opt.half_width);
    }
    if (opt.density == "tabulated") {
        if (opt.grid_x.empty()) {
            throw ValidationError("density: tabulated requires grid_x/grid_pdf in the config");
        }
        try {
            return SourceDensity::tabulated(opt.grid_x, opt.grid_pdf);
        } catch (const std::invalid_argument& err) {
            throw ValidationError(std::string("density: ") + err.what());
        }
    }
    throw ValidationError("density must be laplace, uniform, or tabulated");
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("out: cannot open " + path + " for writing");
    }
    out << body;
}

void emit(const Options& opt, const std::string& body) {
    std::cout << body;
    if (!opt.out.empty()) {
        write_text(opt.out, body);
    }
}

json solution_json(const SoftSolution& solution) {
    return json{{"beta1", round_g12(solution.beta1)},
                {"beta2", round_g12(solution.beta2)},
                {"J", round_g12(solution.cost)},
                {"used_boundary", solution.used_boundary},
                {"residuals", {round_g12(solution.residuals[0]),
                               round_g12(solution.residuals[1])}}};
}

int cmd_solve_soft(const Options& opt) {
    SoftSolution solution;
    if (opt.density == "laplace") {
        solution = solve_laplace_thresholds(opt.c1, opt.c2, opt.gamma, opt.lambda);
    } else {
        solution = solve_generic_thresholds(make_density(opt), opt.c1, opt.c2, opt.gamma);
    }
    emit(opt, solution_json(solution).dump(2) + "\n");
    return kExitOk;
}

int cmd_solve_dp(const Options& opt) {
    const auto density = make_density(opt);
    const auto table = solve_dp(opt.horizon, opt.noisy_budget, opt.perfect_budget,
                                density, opt.gamma, DpOptions{opt.workers});
    const json summary{{"J", round_g12(table.optimal_cost())},
                       {"T", opt.horizon},
                       {"N1", opt.noisy_budget},
                       {"N2", opt.perfect_budget}};
    std::cout << summary.dump(2) << "\n";
    if (!opt.out.empty()) {
        std::ostringstream csv;
        write_table_csv(table, csv);
        write_text(opt.out, csv.str());
    }
    return kExitOk;
}

int cmd_sweep(const Options& opt) {
    if (opt.axis != "N1" && opt.axis != "N2") {
        throw ValidationError("axis must be N1 or N2");
    }
    const bool sweep_noisy = opt.axis == "N1";
    const auto density = make_density(opt);

    // One table per fixed value: J*(1, En, Ep) already contains every
    // budget below the solved one, so the whole axis reads off one solve.
    std::vector<std::vector<double>> curves(opt.fixed.size());
    parallel_for(static_cast<int>(opt.fixed.size()), opt.workers, [&](int i) {
        const int fixed_value = opt.fixed[i];
        const int noisy = sweep_noisy ? opt.horizon : fixed_value;
        const int perfect = sweep_noisy ? fixed_value : opt.horizon;
        const auto table = solve_dp(opt.horizon, noisy, perfect, density, opt.gamma);
        curves[i].resize(opt.horizon + 1);
        for (int value = 0; value <= opt.horizon; ++value) {
            curves[i][value] = sweep_noisy ? table.value(1, value, fixed_value)
                                           : table.value(1, fixed_value, value);
        }
    });

    std::ostringstream csv;
    csv << "axis_value,fixed_value,J\n";
    for (std::size_t i = 0; i < opt.fixed.size(); ++i) {
        for (int value = 0; value <= opt.horizon; ++value) {
            csv << value << ',' << opt.fixed[i] << ',' << fmt_g12(curves[i][value])
                << '\n';
        }
    }
    emit(opt, csv.str());
    return kExitOk;
}

int cmd_simulate(const Options& opt) {
    EpisodeConfig config;
    config.horizon = opt.horizon;
    config.noisy_budget = opt.noisy_budget;
    config.perfect_budget = opt.perfect_budget;
    config.density = make_density(opt);
    config.snr = opt.gamma;
    config.power = 1.0;
    config.noise = NoiseModel{config.power / config.snr,
                              noise_shape_from_string(opt.noise)};
    config.seed = opt.seed;
    config.episodes = opt.episodes;

    const auto table = solve_dp(opt.horizon, opt.noisy_budget, opt.perfect_budget,
                                config.density, config.snr, DpOptions{opt.workers});
    const auto path = run_episode(config, table, derive_seed(config.seed, 0));

    if (!opt.out.empty()) {
        std::ostringstream csv;
        write_path_csv(path, csv);
        write_text(opt.out, csv.str());
    }

    json summary{{"total_cost", round_g12(path.total_cost)},
                 {"final_En", path.final_noisy_left},
                 {"final_Ep", path.final_perfect_left}};
    if (opt.episodes > 1) {
        const auto estimate = monte_carlo_cost(config, table, opt.workers);
        summary["mc_mean"] = round_g12(estimate.mean);
        summary["mc_std_error"] = round_g12(estimate.std_error);
        summary["episodes"] = estimate.episodes;
        summary["dp_value"] = round_g12(table.optimal_cost());
    }
    std::cout << summary.dump(2) << "\n";
    return kExitOk;
}

int cmd_counterexample(const Options& opt) {
    SourceDensity density = SourceDensity::laplace(opt.lambda);
    std::optional<ShiftConstruction> construction;
    if (opt.construction == "uniform") {
        density = SourceDensity::uniform(opt.ce_half_width);
        construction = build_uniform_counterexample(opt.ce_half_width, opt.ce_beta1,
                                                    opt.ce_beta2, opt.c1, opt.c2,
                                                    opt.gamma);
    } else if (opt.construction == "inward") {
        if (opt.density == "uniform") {
            density = SourceDensity::uniform(opt.half_width);
        }
        construction = build_inward_shift(opt.ce_beta1, opt.ce_band_lower,
                                          opt.ce_band_upper, density);
    } else {
        throw ValidationError("construction must be uniform or inward");
    }

    const auto report = report_json(*construction, density, opt.c1, opt.c2, opt.gamma);
    emit(opt, report + "\n");

    const auto costs = compare_costs(*construction, density, opt.c1, opt.c2, opt.gamma);
    return costs.shifted < costs.original ? kExitOk : kExitInconclusive;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"communication scheduling and remote estimation toolkit"};
    app.require_subcommand(1);

    Options opt;
    CommonFlags flags;

    auto* solve_soft = app.add_subcommand(
        "solve-soft", "solve the one-stage soft-constraint threshold problem");
    register_common(solve_soft, opt, flags);

    auto* solve_dp_cmd =
        app.add_subcommand("solve-dp", "solve the finite-horizon budgeted problem");
    register_common(solve_dp_cmd, opt, flags);

    auto* sweep = app.add_subcommand("sweep", "budget sweep emitting plot-ready CSV");
    register_common(sweep, opt, flags);
    sweep->add_option("--axis", opt.axis, "swept budget: N1 or N2");
    sweep->add_option("--fixed", opt.fixed, "values of the other budget")
        ->delimiter(',');

    auto* simulate =
        app.add_subcommand("simulate", "closed-loop rollout under the solved policy");
    register_common(simulate, opt, flags);

    auto* counterexample = app.add_subcommand(
        "counterexample", "mass-preserving region rearrangement comparisons");
    register_common(counterexample, opt, flags);
    counterexample->add_option("--construction", opt.construction, "uniform | inward");
    counterexample->add_option("--L", opt.ce_half_width, "uniform support half width");
    counterexample->add_option("--beta1", opt.ce_beta1, "hold threshold");
    counterexample->add_option("--beta2", opt.ce_beta2, "noisy threshold (uniform)");
    counterexample->add_option("--beta12l", opt.ce_band_lower,
                               "noisy band lower edge (inward)");
    counterexample->add_option("--beta12r", opt.ce_band_upper,
                               "noisy band upper edge (inward)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return err.get_exit_code() == 0 ? kExitOk : kExitValidation;
    }

    try {
        merge_config(opt, flags);
        validate_common(opt);
        if (solve_soft->parsed()) {
            return cmd_solve_soft(opt);
        }
        if (solve_dp_cmd->parsed()) {
            return cmd_solve_dp(opt);
        }
        if (sweep->parsed()) {
            return cmd_sweep(opt);
        }
        if (simulate->parsed()) {
            return cmd_simulate(opt);
        }
        if (counterexample->parsed()) {
            return cmd_counterexample(opt);
        }
        return kExitValidation;
    } catch (const ValidationError& err) {
        std::cerr << "validation error: " << err.what() << "\n";
        return kExitValidation;
    } catch (const GeometryViolation& err) {
        std::cerr << "validation error: " << err.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& err) {
        std::cerr << "validation error: " << err.what() << "\n";
        return kExitValidation;
    } catch (const NonConvergence& err) {
        std::cerr << "solver did not converge: " << err.what()
                  << " (residuals " << err.residual1 << ", " << err.residual2 << ")\n";
        return kExitNonConvergence;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
