#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "slowfast/config.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/rates.hpp"
#include "slowfast/sweep.hpp"

namespace slowfast {

/// Formats a double with 17 significant digits (lossless round-trip).
inline std::string format_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

/// Human-readable description of what each swept quantity measures.
inline std::string quantity_label(Quantity q) {
    switch (q) {
    case Quantity::resolvent:
        return "operator-norm distance between the resolvent and its averaged limit";
    case Quantity::projection:
        return "operator-norm distance between the spectral and averaging projections";
    case Quantity::eigenspace:
        return "Hausdorff distance between the slow eigenspace and the constants";
    case Quantity::equilibria:
        return "largest energy distance from a steady state to its limit root";
    case Quantity::manifold:
        return "sup norm of the invariant graph over the slow coordinate";
    case Quantity::attractor:
        return "Hausdorff distance between the sampled attractor and its limit interval";
    case Quantity::norm_ratio:
        return "largest energy-to-H1 norm ratio (unbounded as the scale shrinks)";
    case Quantity::spectrum_gap:
        return "second eigenvalue divided by the minimal diffusion";
    }
    return "";
}

/// Sweep outcome of one quantity with its fit (when a fit applies) and the
/// pass verdict under that quantity's acceptance rule.
struct QuantityOutcome {
    Quantity quantity = Quantity::resolvent;
    RateSeries series;
    std::optional<FitResult> fit;
    bool pass = false;
    std::string note;
};

/// Applies the per-quantity pass rule: rate quantities need the fitted slope
/// at or above the floor; the spectrum gap must approach pi^2 within 2% at
/// the smallest scale while staying above half of pi^2; the norm ratio must
/// grow by at least 1.5x per halving once eps <= 2^-4.
inline QuantityOutcome evaluate_quantity(SweepContext& ctx, Quantity quantity) {
    QuantityOutcome outcome;
    outcome.quantity = quantity;
    outcome.series = sweep(ctx, quantity);

    try {
        outcome.fit = fit_rate(outcome.series, ctx.config().slope_floor);
    } catch (const InsufficientDataError& err) {
        outcome.fit.reset();
        outcome.note = err.what();
    }

    switch (quantity) {
    case Quantity::resolvent:
    case Quantity::projection:
    case Quantity::eigenspace:
    case Quantity::equilibria:
    case Quantity::manifold:
    case Quantity::attractor:
        outcome.pass = outcome.fit.has_value() && outcome.fit->pass;
        if (outcome.fit && !outcome.fit->pass)
            outcome.note = "slope below floor " + format_double(ctx.config().slope_floor);
        break;
    case Quantity::spectrum_gap: {
        const double target = M_PI * M_PI;
        bool ok = !outcome.series.rows.empty();
        for (const RateRow& row : outcome.series.rows)
            ok = ok && row.error >= 0.5 * target;
        if (ok) {
            const double last = outcome.series.rows.back().error;
            ok = std::abs(last - target) <= 0.02 * target;
            if (!ok) outcome.note = "limit value off pi^2 by more than 2%";
        } else {
            outcome.note = "gap fell below half of pi^2";
        }
        outcome.pass = ok;
        break;
    }
    case Quantity::norm_ratio: {
        int checked = 0;
        bool ok = true;
        const std::vector<RateRow>& rows = outcome.series.rows;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            if (rows[i].eps > 0.0625 * (1.0 + 1e-9)) continue;
            ++checked;
            if (!(rows[i + 1].error >= 1.5 * rows[i].error)) ok = false;
        }
        outcome.pass = ok && checked > 0;
        if (!checked) outcome.note = "sweep range has no halvings at or below 2^-4";
        else if (!ok) outcome.note = "growth per halving below 1.5x";
        break;
    }
    }
    return outcome;
}

/// Writes `<quantity>.csv` with the documented four columns.
inline void write_csv(const std::filesystem::path& dir, const RateSeries& series) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("report: cannot create output directory '" + dir.string() + "'");
    const std::filesystem::path path = dir / (series.quantity + ".csv");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("report: cannot open '" + path.string() + "' for writing");
    out << "eps,delta,error,flag\n";
    for (const RateRow& row : series.rows)
        out << format_double(row.eps) << ',' << format_double(row.delta) << ','
            << format_double(row.error) << ',' << row.flag << '\n';
    if (!out) throw IoError("report: write failed on '" + path.string() + "'");
}

/// Writes summary.txt: one line per quantity with name, slope, constant,
/// R^2, verdict, and the descriptive label.
inline void write_summary(const std::filesystem::path& dir,
                          const std::vector<QuantityOutcome>& outcomes) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("report: cannot create output directory '" + dir.string() + "'");
    const std::filesystem::path path = dir / "summary.txt";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("report: cannot open '" + path.string() + "' for writing");
    for (const QuantityOutcome& o : outcomes) {
        const std::string name = quantity_name(o.quantity);
        out << name << " alpha=" << (o.fit ? format_double(o.fit->slope) : "n/a")
            << " C=" << (o.fit ? format_double(o.fit->c) : "n/a")
            << " R2=" << (o.fit ? format_double(o.fit->r2) : "n/a")
            << " pass=" << (o.pass ? "yes" : "no");
        if (!o.note.empty()) out << " note=" << o.note;
        out << " # " << quantity_label(o.quantity) << '\n';
    }
    if (!out) throw IoError("report: write failed on '" + path.string() + "'");
}

/// Writes all artifacts and returns the process exit code: 0 when every
/// quantity passes, 1 otherwise.
inline int report(const std::vector<QuantityOutcome>& outcomes, const RunConfig& cfg) {
    if (outcomes.empty()) throw ConfigError("report: no quantities were swept");
    const std::filesystem::path dir(cfg.out);
    for (const QuantityOutcome& o : outcomes) write_csv(dir, o.series);
    write_summary(dir, outcomes);
    for (const QuantityOutcome& o : outcomes)
        if (!o.pass) return 1;
    return 0;
}

/// Dense row-major text dump of the assembled matrices, for debugging.
inline void dump_operator(const std::filesystem::path& path, const DiscreteOperator& op) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("dump_operator: cannot open '" + path.string() + "'");
    out << op.dim() << '\n';
    for (int i = 0; i < op.dim(); ++i)
        for (int j = 0; j < op.dim(); ++j)
            out << format_double(op.gram(i, j)) << (j + 1 == op.dim() ? '\n' : ',');
    if (!out) throw IoError("dump_operator: write failed on '" + path.string() + "'");
}

} // namespace slowfast
