#pragma once

#include <span>
#include <vector>

namespace kcoll {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussLegendre gauss_legendre(int n);

/// Composite Gauss-Legendre rule on (0, 1): `panels` equal subintervals,
/// optionally refined at extra breakpoints, `nodes_per_panel` nodes each.
struct QuadratureRule {
    int panels = 0;
    int nodes_per_panel = 0;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

/// Breakpoints outside (0, 1) and duplicates are ignored.
QuadratureRule composite_rule(int panels, int nodes_per_panel,
                              std::span<const double> breakpoints = {});

}  // namespace kcoll
