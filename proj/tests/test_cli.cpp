#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef REMEST_CLI_PATH
#error "REMEST_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
    int exit_code;
    std::string stdout_text;
};

/// Runs the CLI with the given arguments, capturing stdout.
RunResult run_cli(const std::string& args) {
    const std::string stdout_path = std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") +
                                    "/remest_cli_stdout.txt";
    const std::string command =
        std::string(REMEST_CLI_PATH) + " " + args + " > " + stdout_path + " 2>/dev/null";
    const int raw = std::system(command.c_str());
    std::ifstream in(stdout_path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return {WEXITSTATUS(raw), buffer.str()};
}

std::string temp_path(const std::string& name) {
    return std::string(std::getenv("TMPDIR") ? std::getenv("TMPDIR") : "/tmp") + "/" + name;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

TEST_CASE("solve-soft reports the threshold pair") {
    const auto result = run_cli("solve-soft --c1 0.5 --c2 2 --gamma 1 --lambda 1");
    REQUIRE(result.exit_code == 0);
    const auto parsed = nlohmann::json::parse(result.stdout_text);
    CHECK(parsed["beta1"].get<double>() == doctest::Approx(0.895893030231).epsilon(1e-9));
    CHECK(parsed["beta2"].get<double>() == doctest::Approx(3.40592111461).epsilon(1e-9));
    CHECK(parsed["used_boundary"].get<bool>() == false);
    CHECK(std::abs(parsed["residuals"][0].get<double>()) < 1e-10);
}

TEST_CASE("solve-soft collapses to the boundary when c1 >= c2") {
    const auto result = run_cli("solve-soft --c1 2 --c2 2 --gamma 1 --lambda 1");
    REQUIRE(result.exit_code == 0);
    const auto parsed = nlohmann::json::parse(result.stdout_text);
    CHECK(parsed["used_boundary"].get<bool>() == true);
    CHECK(parsed["beta1"].get<double>() == doctest::Approx(std::sqrt(2.0)));
    CHECK(parsed["beta1"] == parsed["beta2"]);
}

TEST_CASE("validation failures name the offending field and exit 2") {
    CHECK(run_cli("solve-soft --gamma -1").exit_code == 2);
    CHECK(run_cli("solve-dp --T 0").exit_code == 2);
    CHECK(run_cli("sweep --axis N3").exit_code == 2);
    CHECK(run_cli("simulate --episodes 0").exit_code == 2);
}

TEST_CASE("config file feeds values and flags win") {
    const auto config_path = temp_path("remest_config.json");
    {
        std::ofstream out(config_path);
        out << R"({"c1": 2.0, "c2": 2.0, "gamma": 1.0, "lambda": 1.0})";
    }
    // config alone: boundary solution
    auto from_config = run_cli("solve-soft --config " + config_path);
    REQUIRE(from_config.exit_code == 0);
    CHECK(nlohmann::json::parse(from_config.stdout_text)["used_boundary"] == true);
    // flag overrides c1: interior solution again
    auto with_flag = run_cli("solve-soft --config " + config_path + " --c1 0.5");
    REQUIRE(with_flag.exit_code == 0);
    CHECK(nlohmann::json::parse(with_flag.stdout_text)["used_boundary"] == false);
}

TEST_CASE("malformed config exits 2 with a diagnostic") {
    const auto config_path = temp_path("remest_config_bad.json");
    {
        std::ofstream out(config_path);
        out << R"({"gamma": "fast"})";
    }
    CHECK(run_cli("solve-soft --config " + config_path).exit_code == 2);
    {
        std::ofstream out(config_path);
        out << "{ not json";
    }
    CHECK(run_cli("solve-soft --config " + config_path).exit_code == 2);
}

TEST_CASE("sweep emits a stable, rerunnable CSV") {
    const auto out_path = temp_path("remest_sweep.csv");
    const std::string args =
        "sweep --T 6 --axis N1 --fixed 0,1 --gamma 1 --lambda 1 --out " + out_path;
    REQUIRE(run_cli(args).exit_code == 0);
    const auto first = slurp(out_path);
    REQUIRE(run_cli(args).exit_code == 0);
    CHECK(first == slurp(out_path));

    std::istringstream lines(first);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "axis_value,fixed_value,J");
    int rows = 0;
    double previous = 1e300;
    int previous_fixed = -1;
    for (std::string line; std::getline(lines, line);) {
        ++rows;
        std::istringstream fields(line);
        std::string axis_value, fixed_value, cost;
        std::getline(fields, axis_value, ',');
        std::getline(fields, fixed_value, ',');
        std::getline(fields, cost, ',');
        const int fixed = std::stoi(fixed_value);
        const double j = std::stod(cost);
        if (fixed == previous_fixed) {
            CHECK(j <= previous + 1e-12); // nonincreasing along the axis
        }
        previous = j;
        previous_fixed = fixed;
    }
    CHECK(rows == 2 * 7);
}

TEST_CASE("simulate writes a reproducible path and a summary") {
    const auto out_path = temp_path("remest_path.csv");
    const std::string args =
        "simulate --T 12 --N1 4 --N2 3 --seed 7 --gamma 1 --lambda 1 --out " + out_path;
    const auto first_run = run_cli(args);
    REQUIRE(first_run.exit_code == 0);
    const auto first_csv = slurp(out_path);
    const auto second_run = run_cli(args);
    REQUIRE(second_run.exit_code == 0);
    CHECK(first_csv == slurp(out_path));
    CHECK(first_run.stdout_text == second_run.stdout_text);

    const auto summary = nlohmann::json::parse(first_run.stdout_text);
    CHECK(summary.contains("total_cost"));
    CHECK(summary.contains("final_En"));
    CHECK(summary.contains("final_Ep"));

    std::istringstream lines(first_csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,x,u,y_tilde,s,xhat,sqerr,En,Ep");
}

TEST_CASE("simulate without budgets pays the raw second moment") {
    const auto out_path = temp_path("remest_path0.csv");
    const auto result = run_cli("simulate --T 15 --N1 0 --N2 0 --seed 3 --out " + out_path);
    REQUIRE(result.exit_code == 0);
    const auto summary = nlohmann::json::parse(result.stdout_text);

    double sum_sq = 0.0;
    std::istringstream lines(slurp(out_path));
    std::string header;
    std::getline(lines, header);
    for (std::string line; std::getline(lines, line);) {
        std::istringstream fields(line);
        std::string t, x, u;
        std::getline(fields, t, ',');
        std::getline(fields, x, ',');
        std::getline(fields, u, ',');
        CHECK(u == "0");
        sum_sq += std::stod(x) * std::stod(x);
    }
    CHECK(summary["total_cost"].get<double>() ==
          doctest::Approx(sum_sq).epsilon(1e-9));
}

TEST_CASE("simulate with episodes reports the monte carlo aggregate") {
    const auto result =
        run_cli("simulate --T 10 --N1 3 --N2 2 --seed 5 --episodes 2000");
    REQUIRE(result.exit_code == 0);
    const auto summary = nlohmann::json::parse(result.stdout_text);
    REQUIRE(summary.contains("mc_mean"));
    REQUIRE(summary.contains("mc_std_error"));
    const double mean = summary["mc_mean"].get<double>();
    const double se = summary["mc_std_error"].get<double>();
    const double dp = summary["dp_value"].get<double>();
    CHECK(std::abs(mean - dp) <= 4.0 * se);
}

TEST_CASE("tabulated densities load from the config file") {
    const auto config_path = temp_path("remest_config_tab.json");
    {
        std::ofstream out(config_path);
        // triangular density on [-2, 2]; exact under linear interpolation
        out << R"({"density": "tabulated", "grid_x": [-2.0, 0.0, 2.0],)"
            << R"( "grid_pdf": [0.0, 0.5, 0.0], "c1": 0.2, "c2": 1.0, "gamma": 1.0})";
    }
    const auto result = run_cli("solve-soft --config " + config_path);
    REQUIRE(result.exit_code == 0);
    const auto parsed = nlohmann::json::parse(result.stdout_text);
    CHECK(parsed["beta1"].get<double>() > 0.0);
    CHECK(parsed["J"].get<double>() > 0.0);
    CHECK(parsed["J"].get<double>() < 2.0 / 3.0); // beats never transmitting (= Var)
}

TEST_CASE("counterexample verdicts map to exit codes") {
    // default uniform construction: strict improvement
    const auto strict = run_cli("counterexample");
    CHECK(strict.exit_code == 0);
    const auto parsed = nlohmann::json::parse(strict.stdout_text);
    CHECK(parsed["verdict"] == "shifted_strictly_better");
    CHECK(parsed["difference"].get<double>() == doctest::Approx(-0.0125).epsilon(1e-9));

    // null inward shift: equal costs, inconclusive
    const auto null_shift =
        run_cli("counterexample --construction inward --beta1 1 --beta12l 1 --beta12r 2");
    CHECK(null_shift.exit_code == 4);

    // geometry violation
    CHECK(run_cli("counterexample --L 10 --beta1 1 --beta2 6").exit_code == 2);
}
