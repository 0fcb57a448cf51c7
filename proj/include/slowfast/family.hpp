#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "slowfast/coefficients.hpp"
#include "slowfast/errors.hpp"
#include "slowfast/mesh.hpp"

namespace slowfast {

/// Family of coefficient fields indexed by a scale parameter eps:
/// diffusion p_eps = p_amp * eps^{-p_exp} (constant in x) and potential
/// V_eps = V0 + v_amp * eps^{v_exp} * w(x).
///
/// The composite rate is delta(eps) = tau(eps) + p(eps)^{-1/2}, where
/// tau(eps) = v_amp * eps^{v_exp} * ||w||_{L1} measures the potential's
/// distance to its limit and p(eps) is the minimal diffusion. tau is
/// evaluated with the same element-midpoint quadrature as the assembly.
struct ScaleFamily {
    std::string name;
    double p_amp = 1.0;
    double p_exp = 1.0;
    double v0 = 0.0;
    double v_amp = 0.0;
    double v_exp = 1.0;
    std::function<double(double)> w;
    double lambda = 0.5;
    double m0 = 0.25;

    double lambda_limit() const { return lambda + v0; }
    double p_min(double eps) const { return p_amp * std::pow(eps, -p_exp); }

    /// Element-midpoint quadrature of |V_eps - V0| on the mesh.
    double tau(double eps, const IntervalMesh& mesh) const {
        const double amp = v_amp * std::pow(eps, v_exp);
        double integral = 0.0;
        for (int e = 0; e < mesh.n_elems(); ++e)
            integral += mesh.width(e) * std::abs(w(mesh.midpoint(e)));
        return amp * integral;
    }

    double delta(double eps, const IntervalMesh& mesh) const {
        return tau(eps, mesh) + 1.0 / std::sqrt(p_min(eps));
    }

    /// Coefficient field of the eps-case on a mesh (validated on sampling).
    CoefficientField coefficients(const IntervalMesh& mesh, double eps) const {
        check(eps);
        const double p_val = p_min(eps);
        const double amp = v_amp * std::pow(eps, v_exp);
        return CoefficientField::sample(
            mesh, [p_val](double) { return p_val; },
            [this, amp](double x) { return v0 + amp * w(x); }, lambda, m0);
    }

    /// Structural checks: scales must send tau to zero and p to infinity,
    /// and the diffusion must respect the floor at this eps.
    void check(double eps) const {
        if (!(eps > 0.0) || !(eps < 1.0))
            throw DomainError("ScaleFamily: eps must lie in (0, 1)");
        if (!(p_exp > 0.0) || !(v_exp > 0.0) || v_amp < 0.0 || !(p_amp > 0.0))
            throw DomainError("ScaleFamily: exponents must be positive and amplitudes nonnegative");
        if (!(m0 > 0.0)) throw DomainError("ScaleFamily: floor must be positive");
        if (!(p_min(eps) >= m0))
            throw CoefficientFloorError("ScaleFamily: diffusion drops below the floor at eps = " +
                                        std::to_string(eps));
        if (!w) throw DomainError("ScaleFamily: potential profile not set");
    }
};

/// Diffusion 1/eps with potential eps*sin(2 pi x): both terms of delta are
/// active and the diffusion term sqrt(eps) dominates.
inline ScaleFamily family_f1() {
    ScaleFamily f;
    f.name = "f1";
    f.p_amp = 1.0;
    f.p_exp = 1.0;
    f.v0 = 0.0;
    f.v_amp = 1.0;
    f.v_exp = 1.0;
    f.w = [](double x) { return std::sin(2.0 * M_PI * x); };
    f.lambda = 0.5;
    f.m0 = 0.25;
    return f;
}

/// Diffusion 1/eps^2 with potential 0.25*eps^{1/4}*sin(2 pi x): the slowly
/// vanishing potential term dominates the composite rate.
inline ScaleFamily family_f2() {
    ScaleFamily f;
    f.name = "f2";
    f.p_amp = 1.0;
    f.p_exp = 2.0;
    f.v0 = 0.0;
    f.v_amp = 0.25;
    f.v_exp = 0.25;
    f.w = [](double x) { return std::sin(2.0 * M_PI * x); };
    f.lambda = 0.5;
    f.m0 = 0.25;
    return f;
}

/// Constant-potential control family: V_eps = V0, so delta = p^{-1/2} alone.
inline ScaleFamily family_const() {
    ScaleFamily f;
    f.name = "const";
    f.p_amp = 1.0;
    f.p_exp = 1.0;
    f.v0 = 0.0;
    f.v_amp = 0.0;
    f.v_exp = 1.0;
    f.w = [](double) { return 0.0; };
    f.lambda = 0.5;
    f.m0 = 0.25;
    return f;
}

inline ScaleFamily make_family(const std::string& name) {
    if (name == "f1") return family_f1();
    if (name == "f2") return family_f2();
    if (name == "const") return family_const();
    throw ConfigError("make_family: unknown family '" + name + "'");
}

} // namespace slowfast
