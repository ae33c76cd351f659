#include "kcoll/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kcoll/error.hpp"

namespace kcoll {

GaussLegendre gauss_legendre(int n) {
    if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const auto un = static_cast<unsigned>(n);
    for (int i = 0; i < n; ++i) {
        // Chebyshev-like initial guess, then Newton on P_n.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            const double p = std::legendre(un, x);
            const double pm1 = n > 1 ? std::legendre(un - 1, x) : 1.0;
            dp = n * (x * p - pm1) / (x * x - 1.0);
            const double step = p / dp;
            x -= step;
            if (std::abs(step) < 1e-16) break;
        }
        {
            const double p = std::legendre(un, x);
            const double pm1 = n > 1 ? std::legendre(un - 1, x) : 1.0;
            dp = n * (x * p - pm1) / (x * x - 1.0);
        }
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

QuadratureRule composite_rule(int panels, int nodes_per_panel,
                              std::span<const double> breakpoints) {
    if (panels < 1) throw InvalidArgument("quadrature needs at least one panel");
    const GaussLegendre ref = gauss_legendre(nodes_per_panel);

    std::vector<double> edges;
    edges.reserve(panels + 1 + breakpoints.size());
    for (int p = 0; p <= panels; ++p) edges.push_back(static_cast<double>(p) / panels);
    for (double b : breakpoints)
        if (b > 0.0 && b < 1.0) edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    QuadratureRule rule;
    rule.panels = panels;
    rule.nodes_per_panel = nodes_per_panel;
    rule.nodes.reserve((edges.size() - 1) * ref.nodes.size());
    rule.weights.reserve(rule.nodes.capacity());
    for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
        const double a = edges[e];
        const double b = edges[e + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t q = 0; q < ref.nodes.size(); ++q) {
            rule.nodes.push_back(mid + half * ref.nodes[q]);
            rule.weights.push_back(half * ref.weights[q]);
        }
    }
    return rule;
}

}  // namespace kcoll
