#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "slowfast/errors.hpp"

namespace slowfast {

/// One measurement of a swept quantity at a scale value.
struct RateRow {
    double eps = 0.0;
    double delta = 0.0; ///< composite rate tau(eps) + p(eps)^{-1/2}
    double error = 0.0; ///< measured quantity
    std::string flag = "ok";
};

/// Measurements across an eps sweep, largest scale first.
struct RateSeries {
    std::string quantity;
    std::vector<RateRow> rows;

    /// eps strictly decreasing; every entry finite and nonnegative.
    void validate() const {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const RateRow& r = rows[i];
            if (!(std::isfinite(r.eps) && std::isfinite(r.delta) && std::isfinite(r.error)))
                throw NumericalError("RateSeries: non-finite entry in row " + std::to_string(i));
            if (r.eps <= 0.0 || r.delta < 0.0 || r.error < 0.0)
                throw NumericalError("RateSeries: negative entry in row " + std::to_string(i));
            if (i > 0 && !(r.eps < rows[i - 1].eps))
                throw NumericalError("RateSeries: eps must be strictly decreasing");
        }
    }
};

/// Least-squares power-law fit error ~ C * delta^alpha on log-log data.
struct FitResult {
    double slope = 0.0;     ///< alpha
    double intercept = 0.0; ///< ln C
    double c = 0.0;         ///< exp(intercept)
    double r2 = 1.0;
    bool pass = false;      ///< slope >= configured floor
    int n_used = 0;
};

/// Rows enter the fit when unflagged (or merely clamped) and the measured
/// value sits above the solver-noise floor of 1e-13.
inline bool fit_usable(const RateRow& row) {
    return (row.flag == "ok" || row.flag == "clamped") && row.error > 1e-13;
}

/// Fits the log-log slope of error against delta; requires at least four
/// usable rows.
inline FitResult fit_rate(const RateSeries& series, double slope_floor = 0.9) {
    series.validate();
    std::vector<double> xs, ys;
    for (const RateRow& row : series.rows) {
        if (!fit_usable(row)) continue;
        xs.push_back(std::log(row.delta));
        ys.push_back(std::log(row.error));
    }
    const int n = static_cast<int>(xs.size());
    if (n < 4)
        throw InsufficientDataError("fit_rate: only " + std::to_string(n) +
                                    " usable rows in series '" + series.quantity + "'");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    if (!(denom > 0.0))
        throw InsufficientDataError("fit_rate: degenerate abscissae in series '" +
                                    series.quantity + "'");
    FitResult fit;
    fit.n_used = n;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.c = std::exp(fit.intercept);

    double ss_res = 0.0, ss_tot = 0.0;
    const double mean_y = sy / n;
    for (int i = 0; i < n; ++i) {
        const double pred = fit.intercept + fit.slope * xs[i];
        ss_res += (ys[i] - pred) * (ys[i] - pred);
        ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
    }
    fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    fit.pass = fit.slope >= slope_floor - 1e-12;
    return fit;
}

} // namespace slowfast
