#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "slowfast/cli.hpp"
#include "slowfast/slowfast.hpp"

using namespace slowfast;

namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / ("slowfast_harness_" + leaf);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

RunConfig fast_config(const std::string& family, const std::string& out) {
    RunConfig cfg;
    cfg.n = 64;
    cfg.eps_hi = 0.25;
    cfg.eps_lo = 0.015625; // five dyadic scales
    cfg.family = family;
    cfg.out = out;
    return cfg;
}

double dispersion(int n, int j) {
    const double h = 1.0 / n;
    const double c = std::cos(j * M_PI * h);
    return 6.0 / (h * h) * (1.0 - c) / (2.0 + c);
}

} // namespace

TEST_CASE("scale families expose the documented rates") {
    const IntervalMesh mesh = IntervalMesh::uniform(0.0, 1.0, 256);
    const double sin_l1 = 2.0 / M_PI; // integral of |sin(2 pi x)| over (0,1)

    const ScaleFamily f1 = make_family("f1");
    REQUIRE(f1.lambda_limit() == 0.5);
    REQUIRE(f1.p_min(0.0625) == Catch::Approx(16.0).margin(1e-12));
    REQUIRE(f1.tau(0.0625, mesh) == Catch::Approx(0.0625 * sin_l1).epsilon(1e-4));
    REQUIRE(f1.delta(0.0625, mesh) ==
            Catch::Approx(0.0625 * sin_l1 + 0.25).epsilon(1e-4));

    const ScaleFamily f2 = make_family("f2");
    REQUIRE(f2.p_min(0.1) == Catch::Approx(100.0).margin(1e-10));
    REQUIRE(f2.tau(0.1, mesh) ==
            Catch::Approx(0.25 * std::pow(0.1, 0.25) * sin_l1).epsilon(1e-4));

    const ScaleFamily fc = make_family("const");
    REQUIRE(fc.tau(0.1, mesh) == 0.0);
    REQUIRE(fc.delta(0.1, mesh) == Catch::Approx(std::sqrt(0.1)).epsilon(1e-12));

    REQUIRE_THROWS_AS(make_family("f3"), ConfigError);
    REQUIRE_THROWS_AS(f1.check(1.0), DomainError);
    REQUIRE_THROWS_AS(f1.check(0.0), DomainError);

    ScaleFamily weak = family_f1();
    weak.p_amp = 0.1;
    REQUIRE_THROWS_AS(weak.check(0.9), CoefficientFloorError);
}

TEST_CASE("family coefficient sampling matches the closed-form fields") {
    const IntervalMesh mesh = IntervalMesh::uniform(0.0, 1.0, 32);
    const ScaleFamily f1 = make_family("f1");
    const double eps = 0.125;
    const CoefficientField field = f1.coefficients(mesh, eps);
    for (int e = 0; e < mesh.n_elems(); ++e) {
        REQUIRE(field.diffusion[static_cast<std::size_t>(e)] == Catch::Approx(8.0).margin(1e-12));
        const double expected = eps * std::sin(2.0 * M_PI * mesh.midpoint(e));
        REQUIRE(field.potential[static_cast<std::size_t>(e)] ==
                Catch::Approx(expected).margin(1e-15));
    }
    REQUIRE(field.shift == 0.5);
}

TEST_CASE("power-law fit recovers exact synthetic rates") {
    RateSeries series;
    series.quantity = "synthetic";
    for (int i = 0; i < 6; ++i) {
        RateRow row;
        row.eps = std::pow(0.5, i + 2);
        row.delta = std::pow(0.5, i);
        row.error = 3.0 * std::pow(row.delta, 1.5);
        series.rows.push_back(row);
    }
    const FitResult fit = fit_rate(series, 0.9);
    REQUIRE(fit.slope == Catch::Approx(1.5).margin(1e-12));
    REQUIRE(fit.c == Catch::Approx(3.0).epsilon(1e-9));
    REQUIRE(fit.r2 == Catch::Approx(1.0).margin(1e-12));
    REQUIRE(fit.n_used == 6);
    REQUIRE(fit.pass);
    REQUIRE_FALSE(fit_rate(series, 2.0).pass);
}

TEST_CASE("rate fit skips flagged and floored rows") {
    RateSeries series;
    series.quantity = "synthetic";
    for (int i = 0; i < 7; ++i) {
        RateRow row;
        row.eps = std::pow(0.5, i + 2);
        row.delta = std::pow(0.5, i);
        row.error = std::pow(row.delta, 1.0);
        if (i == 1) { row.flag = "noconv"; row.error = 0.0; }
        if (i == 2) row.flag = "clamped";           // stays usable
        if (i == 6) row.error = 1e-14;              // below the noise floor
        series.rows.push_back(row);
    }
    const FitResult fit = fit_rate(series, 0.9);
    REQUIRE(fit.n_used == 5);
    REQUIRE(fit.slope == Catch::Approx(1.0).margin(1e-12));

    // Dropping to three usable rows is not enough signal.
    series.rows.resize(5);
    series.rows[4].flag = "collision";
    REQUIRE_THROWS_AS(fit_rate(series, 0.9), InsufficientDataError);
}

TEST_CASE("rate series validation rejects malformed sweeps") {
    RateSeries series;
    series.quantity = "synthetic";
    RateRow a{0.25, 0.5, 1.0, "ok"};
    RateRow b{0.25, 0.5, 1.0, "ok"}; // eps not strictly decreasing
    series.rows = {a, b};
    REQUIRE_THROWS_AS(series.validate(), NumericalError);

    series.rows = {a};
    series.rows[0].error = -1.0;
    REQUIRE_THROWS_AS(series.validate(), NumericalError);
    series.rows[0].error = std::numeric_limits<double>::quiet_NaN();
    REQUIRE_THROWS_AS(series.validate(), NumericalError);
}

TEST_CASE("dyadic scale grid spans the configured range") {
    RunConfig cfg;
    const std::vector<double> grid = epsilon_grid(cfg);
    REQUIRE(grid.size() == 9);
    REQUIRE(grid.front() == 0.25);
    REQUIRE(grid.back() == Catch::Approx(std::pow(2.0, -10)).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i)
        REQUIRE(grid[i] == Catch::Approx(0.5 * grid[i - 1]).epsilon(1e-14));

    RunConfig shallow;
    shallow.eps_hi = 0.25;
    shallow.eps_lo = 0.125;
    REQUIRE_THROWS_AS(epsilon_grid(shallow), ConfigError);
}

TEST_CASE("run configuration validation catches bad values") {
    RunConfig bad;
    bad.n = 4;
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.family = "unknown";
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.n_quad = 9;
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.dt = 0.1;
    bad.dt_max = 0.05;
    REQUIRE_THROWS_AS(bad.validate(), ConfigError);
    REQUIRE_NOTHROW(RunConfig{}.validate());
}

TEST_CASE("configuration files parse key = value lines with comments") {
    const fs::path dir = fresh_dir("config");
    const fs::path path = dir / "run.cfg";
    {
        std::ofstream out(path);
        out << "# sweep parameters\n"
            << "n = 64\n"
            << "family = const   # control family\n"
            << "eps_lo = 0.015625\n"
            << "out = " << (dir / "results").string() << "\n"
            << "\n"
            << "seed = 99\n";
    }
    const RunConfig cfg = load_config_file(path.string());
    REQUIRE(cfg.n == 64);
    REQUIRE(cfg.family == "const");
    REQUIRE(cfg.eps_lo == 0.015625);
    REQUIRE(cfg.seed == 99);
    REQUIRE(cfg.eps_hi == 0.25); // untouched default

    auto write_and_load = [&](const std::string& text) {
        const fs::path bad_path = dir / "bad.cfg";
        std::ofstream out(bad_path, std::ios::trunc);
        out << text;
        out.close();
        return load_config_file(bad_path.string());
    };
    REQUIRE_THROWS_AS(write_and_load("mystery = 1\n"), ConfigError);
    REQUIRE_THROWS_AS(write_and_load("n 64\n"), ConfigError);
    REQUIRE_THROWS_AS(write_and_load("n =\n"), ConfigError);
    REQUIRE_THROWS_AS(write_and_load("n = twelve\n"), ConfigError);
    REQUIRE_THROWS_AS(write_and_load("eps_hi = 0.25x\n"), ConfigError);
    REQUIRE_THROWS_AS(load_config_file((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("quantity names round-trip through the parser") {
    for (Quantity q : all_quantities()) REQUIRE(parse_quantity(quantity_name(q)) == q);
    REQUIRE_THROWS_AS(parse_quantity("bogus"), ConfigError);
}

TEST_CASE("resolvent sweep over the control family matches the modal closed form") {
    const fs::path dir = fresh_dir("sweep_resolvent");
    SweepContext ctx(fast_config("const", dir.string()));
    const RateSeries series = sweep(ctx, Quantity::resolvent);
    REQUIRE(series.rows.size() == 5);
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        const RateRow& row = series.rows[i];
        REQUIRE(row.flag == "ok");
        REQUIRE(row.delta == Catch::Approx(std::sqrt(row.eps)).epsilon(1e-12));
        const double lambda2 = 0.5 + dispersion(64, 1) / row.eps;
        REQUIRE(row.error == Catch::Approx(1.0 / std::sqrt(lambda2)).epsilon(1e-7));
    }

    const QuantityOutcome outcome = evaluate_quantity(ctx, Quantity::resolvent);
    REQUIRE(outcome.pass);
    REQUIRE(outcome.fit.has_value());
    REQUIRE(outcome.fit->slope == Catch::Approx(1.0).margin(0.05));
    REQUIRE(outcome.fit->r2 > 0.999);
}

TEST_CASE("spectrum and norm-ratio rules pass on the control family") {
    const fs::path dir = fresh_dir("sweep_rules");
    SweepContext ctx(fast_config("const", dir.string()));

    const QuantityOutcome gap = evaluate_quantity(ctx, Quantity::spectrum_gap);
    REQUIRE(gap.pass);
    for (const RateRow& row : gap.series.rows)
        REQUIRE(row.error >= 0.5 * M_PI * M_PI);
    REQUIRE(gap.series.rows.back().error == Catch::Approx(M_PI * M_PI).epsilon(0.02));

    const QuantityOutcome ratio = evaluate_quantity(ctx, Quantity::norm_ratio);
    REQUIRE(ratio.pass);

    // The control family keeps constants as exact steady states, so the
    // equilibrium distances sit at the solver floor and no rate is fittable.
    const QuantityOutcome eq = evaluate_quantity(ctx, Quantity::equilibria);
    REQUIRE_FALSE(eq.pass);
    REQUIRE_FALSE(eq.fit.has_value());
    REQUIRE_FALSE(eq.note.empty());
}

TEST_CASE("report writes deterministic artifacts and aggregates the verdict") {
    const fs::path dir_a = fresh_dir("report_a");
    const fs::path dir_b = fresh_dir("report_b");

    auto produce = [&](const fs::path& dir) {
        RunConfig cfg = fast_config("const", dir.string());
        SweepContext ctx(cfg);
        std::vector<QuantityOutcome> outcomes;
        outcomes.push_back(evaluate_quantity(ctx, Quantity::resolvent));
        outcomes.push_back(evaluate_quantity(ctx, Quantity::spectrum_gap));
        return report(outcomes, cfg);
    };
    REQUIRE(produce(dir_a) == 0);
    REQUIRE(produce(dir_b) == 0);

    const std::string csv_a = slurp(dir_a / "resolvent.csv");
    REQUIRE(csv_a == slurp(dir_b / "resolvent.csv"));
    REQUIRE(slurp(dir_a / "summary.txt") == slurp(dir_b / "summary.txt"));

    std::istringstream lines(csv_a);
    std::string line;
    REQUIRE(std::getline(lines, line));
    REQUIRE(line == "eps,delta,error,flag");
    int data_rows = 0;
    while (std::getline(lines, line)) {
        ++data_rows;
        // Round-trip every eps field through stod: 17 digits are lossless.
        const double eps = std::stod(line.substr(0, line.find(',')));
        REQUIRE(eps == 0.25 * std::pow(0.5, data_rows - 1));
    }
    REQUIRE(data_rows == 5);

    const std::string summary = slurp(dir_a / "summary.txt");
    REQUIRE(summary.find("resolvent alpha=") != std::string::npos);
    REQUIRE(summary.find("spectrum_gap") != std::string::npos);
    REQUIRE(summary.find("pass=yes") != std::string::npos);

    // A failing quantity flips the exit code.
    RunConfig strict = fast_config("const", (fresh_dir("report_c")).string());
    strict.slope_floor = 5.0;
    SweepContext ctx(strict);
    std::vector<QuantityOutcome> outcomes{evaluate_quantity(ctx, Quantity::resolvent)};
    REQUIRE_FALSE(outcomes.front().pass);
    REQUIRE(report(outcomes, strict) == 1);

    REQUIRE_THROWS_AS(report({}, strict), ConfigError);
}

TEST_CASE("command line driver maps subcommands, flags, and exit codes") {
    const fs::path dir = fresh_dir("cli");

    REQUIRE(run_cli({"norm-ratio", "--family", "const", "--n", "64", "--eps-lo", "0.015625",
                     "--out", (dir / "run1").string()}) == 0);
    REQUIRE(fs::exists(dir / "run1" / "norm_ratio.csv"));
    REQUIRE(fs::exists(dir / "run1" / "summary.txt"));

    // Configuration file with a flag override on top.
    const fs::path cfg_path = dir / "run.cfg";
    {
        std::ofstream out(cfg_path);
        out << "family = const\nn = 64\neps_lo = 0.015625\nout = " << (dir / "ignored").string()
            << "\n";
    }
    REQUIRE(run_cli({"resolvent-rate", "--config", cfg_path.string(), "--out",
                     (dir / "run2").string()}) == 0);
    REQUIRE(fs::exists(dir / "run2" / "resolvent.csv"));
    REQUIRE_FALSE(fs::exists(dir / "ignored"));

    REQUIRE(run_cli({"--help"}) == 0);
    REQUIRE(run_cli({}) == 2);
    REQUIRE(run_cli({"no-such-command"}) == 2);
    REQUIRE(run_cli({"spectrum", "--bogus-flag"}) == 2);
    REQUIRE(run_cli({"spectrum", "--family", "nope", "--out", (dir / "run3").string()}) == 2);
    REQUIRE(run_cli({"spectrum", "--config", (dir / "absent.cfg").string()}) == 2);
}
