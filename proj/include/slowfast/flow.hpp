#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slowfast/assembly.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/reaction.hpp"
#include "slowfast/spectral.hpp"

namespace slowfast {

namespace detail {

/// phi1(x) = (1 - exp(-x)) / x, the first exponential-integrator weight.
/// expm1 avoids the 1 - exp(-x) cancellation, so the quotient is accurate
/// for every nonzero x; the removable singularity at zero has value one.
inline double phi1(double x) {
    if (x == 0.0) return 1.0;
    return -std::expm1(-x) / x;
}

} // namespace detail

/// One step of first-order exponential Euler evaluated in the eigenbasis:
/// u+ = exp(-A dt) u + A^{-1}(I - exp(-A dt)) f(u) with f applied nodewise.
/// The decomposition must span the full space for the step to be exact in
/// the linear part; truncated decompositions propagate only the captured
/// modes and are rejected.
inline Vector exp_euler_step(const DiscreteOperator& op, const SpectralDecomposition& dec,
                             const Reaction& reaction, const Vector& u, double dt,
                             double dt_max = 0.05) {
    if (u.size() != op.dim())
        throw DimensionError("exp_euler_step: state length does not match the operator");
    if (dec.count() != op.dim())
        throw DimensionError("exp_euler_step: decomposition must span the full space");
    if (!(dt > 0.0) || dt > dt_max)
        throw DomainError("exp_euler_step: step size must lie in (0, dt_max]");

    const Vector fu = reaction.apply(u);
    if (!fu.allFinite())
        throw ConvergenceError("exp_euler_step: reaction evaluation blew up");

    const Vector c = dec.eigenvectors.transpose() * (op.mass * u);
    const Vector fc = dec.eigenvectors.transpose() * (op.mass * fu);
    Vector next(dec.count());
    for (int j = 0; j < dec.count(); ++j) {
        const double x = dec.eigenvalues[j] * dt;
        next[j] = std::exp(-x) * c[j] + dt * detail::phi1(x) * fc[j];
    }
    const Vector out = dec.eigenvectors * next;
    if (!out.allFinite())
        throw ConvergenceError("exp_euler_step: state blew up");
    return out;
}

/// Fixed-step trajectory of the semilinear flow; returns states sampled at
/// every accepted step including the initial one.
struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
};

inline Trajectory integrate(const DiscreteOperator& op, const SpectralDecomposition& dec,
                            const Reaction& reaction, const Vector& u0, double dt, double t_end,
                            double dt_max = 0.05) {
    if (!(t_end > 0.0)) throw DomainError("integrate: final time must be positive");
    Trajectory traj;
    const int n_steps = static_cast<int>(std::ceil(t_end / dt - 1e-12));
    traj.times.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(u0);
    Vector u = u0;
    for (int i = 0; i < n_steps; ++i) {
        const double step = std::min(dt, t_end - i * dt);
        u = exp_euler_step(op, dec, reaction, u, step, dt_max);
        traj.times.push_back(std::min(t_end, (i + 1) * dt));
        traj.states.push_back(u);
    }
    return traj;
}

} // namespace slowfast
