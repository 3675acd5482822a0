#pragma once

#include "finsler/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace finsler {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre nodes and weights on [-1, 1]; cached per size.
const Rule& gauss_legendre(int m);

// Unit directions of R^n with weights summing to the Euclidean area of S^{n-1}.
struct SphereRule {
    int n = 2;
    std::vector<Vec> u;
    std::vector<double> w;
};

// N uniform angles on the circle.
SphereRule circle_rule(int N);
// Gauss-Legendre in t = cos(polar angle) times trapezoid in azimuth.
SphereRule sphere_rule(int m_t, int m_phi);

struct SphereOptimum {
    Vec u;
    double value = 0.0;
    bool converged = true;
};

using DirectionFn = std::function<double(const Vec&)>;

// Grid maximum of f over Euclidean-unit directions followed by local refinement.
// For n = 2 the grid has `grid` angles; for n = 3 it is grid/2 x grid.
SphereOptimum maximize_on_sphere(int n, const DirectionFn& f, int grid);
// Local refinement from a starting direction; `reach` bounds the first search step.
SphereOptimum refine_on_sphere(const DirectionFn& f, const Vec& start, double reach);

// Samples f[k] = f(k h), k = 0..N, on a uniform grid.
// Composite Simpson over [0, N h], closing with the 3/8 rule when N is odd.
double simpson(std::span<const double> f, double h);
// I[k] = integral over [0, k h], each panel integrated through a six-point interpolant.
std::vector<double> cumulative_integral(std::span<const double> f, double h);
// Six-point Lagrange interpolation at r in [0, N h].
double interpolate(std::span<const double> f, double h, double r);
// Integral over [0, R] of the panelwise six-point interpolant; agrees with cumulative_integral at nodes.
double integral_to(std::span<const double> f, double h, double R);

// Default search grids: 64 angles for n = 2, 32 x 64 for n = 3.
int default_search_grid(int n);

} // namespace finsler
