#pragma once

#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slowfast/config.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/report.hpp"
#include "slowfast/sweep.hpp"

namespace slowfast {

/// Quantities evaluated by each subcommand.
inline std::vector<Quantity> subcommand_quantities(const std::string& name) {
    if (name == "resolvent-rate") return {Quantity::resolvent};
    if (name == "spectrum")
        return {Quantity::spectrum_gap, Quantity::projection, Quantity::eigenspace};
    if (name == "equilibria") return {Quantity::equilibria};
    if (name == "manifold") return {Quantity::manifold};
    if (name == "attractor-rate") return {Quantity::attractor};
    if (name == "norm-ratio") return {Quantity::norm_ratio};
    if (name == "report-all") return all_quantities();
    throw ConfigError("unknown subcommand '" + name + "'");
}

/// Runs the sweep driver for one subcommand with a finished configuration;
/// returns the report exit code.
inline int run_quantities(const RunConfig& cfg, const std::vector<Quantity>& quantities) {
    SweepContext ctx(cfg);
    std::vector<QuantityOutcome> outcomes;
    outcomes.reserve(quantities.size());
    for (Quantity q : quantities) outcomes.push_back(evaluate_quantity(ctx, q));
    const int code = report(outcomes, cfg);
    for (const QuantityOutcome& o : outcomes)
        if (!o.pass)
            std::cerr << "fail: " << quantity_name(o.quantity)
                      << (o.note.empty() ? "" : " (" + o.note + ")") << '\n';
    return code;
}

/// Command-line entry point shared by the binary and the test harness.
/// Exit codes: 0 all criteria pass, 1 a criterion failed, 2 configuration
/// or I/O errors.
inline int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Convergence-rate studies for a singularly perturbed "
                 "reaction-diffusion operator family"};
    app.require_subcommand(1);

    struct Options {
        std::string config_path;
        std::string out;
        double eps_hi = -1.0, eps_lo = -1.0;
        int n = -1;
        std::string family;
        std::string reaction;
        long long seed = -1;
    } opt;

    const std::vector<std::string> names = {"resolvent-rate", "spectrum",      "equilibria",
                                            "manifold",       "attractor-rate", "norm-ratio",
                                            "report-all"};
    const std::vector<std::string> descriptions = {
        "resolvent-vs-limit rate sweep",
        "spectral gap, spectral projection, and eigenspace sweeps",
        "steady-state continuation rate sweep",
        "invariant-graph sup-norm rate sweep",
        "attractor Hausdorff-distance rate sweep",
        "energy/H1 norm-ratio growth probe",
        "all quantities",
    };
    std::string chosen;
    for (std::size_t i = 0; i < names.size(); ++i) {
        CLI::App* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("--config", opt.config_path, "key = value configuration file");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--eps-hi", opt.eps_hi, "largest scale value");
        sub->add_option("--eps-lo", opt.eps_lo, "smallest scale value");
        sub->add_option("--n", opt.n, "mesh element count");
        sub->add_option("--family", opt.family, "scale family {f1|f2|const}");
        sub->add_option("--reaction", opt.reaction, "reaction term {cubic|linear}");
        sub->add_option("--seed", opt.seed, "seed for randomized probes");
        const std::string name = names[i];
        sub->callback([&chosen, name]() { chosen = name; });
    }

    try {
        // CLI11 wants mutable argc/argv-style input in reverse order.
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e); // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        RunConfig cfg;
        if (!opt.config_path.empty()) cfg = load_config_file(opt.config_path);
        if (!opt.out.empty()) cfg.out = opt.out;
        if (opt.eps_hi > 0.0) cfg.eps_hi = opt.eps_hi;
        if (opt.eps_lo > 0.0) cfg.eps_lo = opt.eps_lo;
        if (opt.n > 0) cfg.n = opt.n;
        if (!opt.family.empty()) cfg.family = opt.family;
        if (!opt.reaction.empty()) cfg.reaction = opt.reaction;
        if (opt.seed >= 0) cfg.seed = static_cast<unsigned long>(opt.seed);
        cfg.validate();
        return run_quantities(cfg, subcommand_quantities(chosen));
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace slowfast
