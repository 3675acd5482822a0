#pragma once

// Finite-difference oracles shared by the unit and acceptance tests.

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

namespace fd {

using Scalar = std::function<double(const std::vector<double>&)>;

// Central stencil (offset multiples, weights) for a derivative of order k, step 1.
inline std::vector<std::pair<int, double>> stencil(int k)
{
    switch (k) {
    case 0: return {{0, 1.0}};
    case 1: return {{1, 0.5}, {-1, -0.5}};
    case 2: return {{1, 1.0}, {0, -2.0}, {-1, 1.0}};
    case 3: return {{2, 0.5}, {1, -1.0}, {-1, 1.0}, {-2, -0.5}};
    default: return {{2, 1.0}, {1, -4.0}, {0, 6.0}, {-1, -4.0}, {-2, 1.0}};
    }
}

inline double tensor_difference(const Scalar& f, std::vector<double> x, const std::vector<int>& alpha,
                                double h, std::size_t var)
{
    if (var == alpha.size()) {
        return f(x);
    }
    const int k = alpha[var];
    if (k == 0) {
        return tensor_difference(f, x, alpha, h, var + 1);
    }
    double acc = 0.0;
    const double base = x[var];
    for (const auto& [off, w] : stencil(k)) {
        x[var] = base + off * h;
        acc += w * tensor_difference(f, x, alpha, h, var + 1);
    }
    return acc / std::pow(h, k);
}

// Richardson-extrapolated mixed partial, fourth order in h.
inline double partial(const Scalar& f, const std::vector<double>& x, const std::vector<int>& alpha,
                      double h)
{
    const double d1 = tensor_difference(f, x, alpha, h, 0);
    const double d2 = tensor_difference(f, x, alpha, 0.5 * h, 0);
    return (4.0 * d2 - d1) / 3.0;
}

} // namespace fd
