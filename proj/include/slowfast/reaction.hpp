#pragma once

#include <cmath>
#include <functional>
#include <string>

#include <Eigen/Dense>

#include "slowfast/errors.hpp"

namespace slowfast {

/// Scalar reaction term with derivative and a dissipativity margin:
/// f(u)/u <= -margin < 0 for |u| >= radius, which confines trajectories
/// to a bounded ball.
struct Reaction {
    std::string name;
    std::function<double(double)> value;
    std::function<double(double)> slope;
    double dissipative_radius = 0.0;
    double dissipative_margin = 0.0;

    Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
        return u.unaryExpr([this](double x) { return value(x); });
    }

    Eigen::VectorXd apply_slope(const Eigen::VectorXd& u) const {
        return u.unaryExpr([this](double x) { return slope(x); });
    }

    /// Finite-difference consistency of the derivative on u in [-3, 3] and
    /// the sign of f(u)/u at the dissipative radius.
    void validate() const {
        if (!value || !slope) throw DomainError("Reaction: callbacks must be set");
        if (!(dissipative_radius > 0.0) || !(dissipative_margin > 0.0))
            throw DomainError("Reaction: dissipativity parameters must be positive");
        const double h = 1e-5;
        for (int i = 0; i < 21; ++i) {
            const double u = -3.0 + 6.0 * i / 20.0;
            const double fd = (value(u + h) - value(u - h)) / (2.0 * h);
            if (std::abs(fd - slope(u)) > 1e-6)
                throw NumericalError("Reaction: derivative fails the finite-difference check at u = " +
                                     std::to_string(u));
        }
        for (double u : {dissipative_radius, -dissipative_radius}) {
            if (!(value(u) / u <= -dissipative_margin))
                throw NumericalError("Reaction: dissipativity margin violated at u = " +
                                     std::to_string(u));
        }
    }
};

/// Bistable cubic f(u) = u - u^3; with a shifted mass coefficient of 1/2 the
/// steady states are -1/sqrt(2), 0, +1/sqrt(2).
inline Reaction cubic_reaction() {
    Reaction r;
    r.name = "cubic";
    r.value = [](double u) { return u - u * u * u; };
    r.slope = [](double u) { return 1.0 - 3.0 * u * u; };
    r.dissipative_radius = 2.0;
    r.dissipative_margin = 1.0;
    r.validate();
    return r;
}

/// Linear f(u) = c u with c < 0, used as the decoupled control case.
inline Reaction linear_reaction(double c = -0.5) {
    if (!(c < 0.0)) throw DomainError("linear_reaction: coefficient must be negative");
    Reaction r;
    r.name = "linear";
    r.value = [c](double u) { return c * u; };
    r.slope = [c](double) { return c; };
    r.dissipative_radius = 1.0;
    r.dissipative_margin = -c;
    r.validate();
    return r;
}

/// Reaction lookup by configuration name.
inline Reaction make_reaction(const std::string& name) {
    if (name == "cubic") return cubic_reaction();
    if (name == "linear") return linear_reaction();
    throw ConfigError("make_reaction: unknown reaction '" + name + "'");
}

} // namespace slowfast
