#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "slowfast/errors.hpp"

namespace slowfast {

/// One-dimensional mesh of an interval (a, b) with strictly increasing nodes.
///
/// Elements are the spans between consecutive nodes; coefficients are sampled
/// at element midpoints throughout the library, so the mesh also provides
/// midpoint and width access per element.
struct IntervalMesh {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> nodes;

    int n_nodes() const { return static_cast<int>(nodes.size()); }
    int n_elems() const { return static_cast<int>(nodes.size()) - 1; }
    double length() const { return b - a; }

    double width(int elem) const { return nodes[elem + 1] - nodes[elem]; }
    double midpoint(int elem) const { return 0.5 * (nodes[elem] + nodes[elem + 1]); }

    /// Uniform mesh with n equal elements.
    static IntervalMesh uniform(double a, double b, int n_elems) {
        if (n_elems < 1)
            throw DomainError("IntervalMesh::uniform: need at least one element, got " +
                              std::to_string(n_elems));
        if (!(a < b)) throw DomainError("IntervalMesh::uniform: requires a < b");
        IntervalMesh mesh;
        mesh.a = a;
        mesh.b = b;
        mesh.nodes.resize(static_cast<std::size_t>(n_elems) + 1);
        const double h = (b - a) / n_elems;
        for (int i = 0; i <= n_elems; ++i) mesh.nodes[static_cast<std::size_t>(i)] = a + i * h;
        mesh.nodes.front() = a;
        mesh.nodes.back() = b;
        mesh.validate();
        return mesh;
    }

    /// Checks monotonicity, endpoint agreement and width consistency.
    void validate() const {
        if (nodes.size() < 2) throw DomainError("IntervalMesh: needs at least two nodes");
        if (nodes.front() != a || nodes.back() != b)
            throw DomainError("IntervalMesh: node endpoints must equal the interval endpoints");
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            const double w = nodes[i + 1] - nodes[i];
            if (!(w > 0.0))
                throw DomainError("IntervalMesh: nodes must be strictly increasing (element " +
                                  std::to_string(i) + ")");
            total += w;
        }
        if (std::abs(total - length()) > 1e-12 * std::max(1.0, std::abs(length())))
            throw DomainError("IntervalMesh: element widths do not sum to the interval length");
    }
};

} // namespace slowfast
