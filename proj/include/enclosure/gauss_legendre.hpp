// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

namespace enclosure {

struct GaussRule {
    std::vector<double> nodes;   // ascending, in (-1, 1)
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Rules are cached; the reference
/// stays valid for the lifetime of the program.
const GaussRule& gauss_legendre(int n);

/// Integrates f over [a, b] with the n-point rule.
template <class F>
double integrate_gl(F&& f, double a, double b, int n)
{
    const GaussRule& rule = gauss_legendre(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

} // namespace enclosure
