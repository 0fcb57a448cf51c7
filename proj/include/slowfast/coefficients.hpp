#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "slowfast/errors.hpp"
#include "slowfast/mesh.hpp"

namespace slowfast {

/// Diffusion and potential samples at element midpoints, plus the constant
/// zeroth-order shift lambda and the uniform positivity floor m0.
///
/// The operator assembled from a field is -(p u')' + (lambda + V) u with
/// natural boundary conditions; validity requires p >= m0 and
/// lambda + V >= m0 elementwise for some m0 > 0.
struct CoefficientField {
    std::vector<double> diffusion; ///< p at element midpoints
    std::vector<double> potential; ///< V at element midpoints
    double shift = 0.0;            ///< lambda
    double floor = 0.0;            ///< m0

    /// Samples callables at the element midpoints of a mesh and validates.
    static CoefficientField sample(const IntervalMesh& mesh,
                                   const std::function<double(double)>& p,
                                   const std::function<double(double)>& v,
                                   double lambda,
                                   double m0) {
        CoefficientField field;
        field.shift = lambda;
        field.floor = m0;
        const int ne = mesh.n_elems();
        field.diffusion.resize(static_cast<std::size_t>(ne));
        field.potential.resize(static_cast<std::size_t>(ne));
        for (int e = 0; e < ne; ++e) {
            const double x = mesh.midpoint(e);
            field.diffusion[static_cast<std::size_t>(e)] = p(x);
            field.potential[static_cast<std::size_t>(e)] = v(x);
        }
        field.validate(ne);
        return field;
    }

    double min_diffusion() const {
        return *std::min_element(diffusion.begin(), diffusion.end());
    }

    /// Checks sample counts and the uniform floor; throws on violation.
    void validate(int n_elems) const {
        if (static_cast<int>(diffusion.size()) != n_elems ||
            static_cast<int>(potential.size()) != n_elems)
            throw DimensionError("CoefficientField: sample counts must match the element count");
        if (!(floor > 0.0))
            throw CoefficientFloorError("CoefficientField: the floor m0 must be positive");
        for (std::size_t e = 0; e < diffusion.size(); ++e) {
            if (!(diffusion[e] >= floor))
                throw CoefficientFloorError(
                    "CoefficientField: diffusion drops below the floor at element " +
                    std::to_string(e));
            if (!(shift + potential[e] >= floor))
                throw CoefficientFloorError(
                    "CoefficientField: shifted potential drops below the floor at element " +
                    std::to_string(e));
        }
    }
};

} // namespace slowfast
