#pragma once

#include "finsler/metric.hpp"
#include "finsler/ode.hpp"
#include "finsler/types.hpp"

#include <iosfwd>
#include <vector>

namespace finsler {

// Directions on the Euclidean unit sphere with their angular parametrization:
// n = 2 uses the angle, n = 3 uses (cos of the polar angle, azimuth).
struct DirectionGrid {
    int n = 2;
    std::vector<Vec> u;
    // Columns are du/dtheta^a, a = 0..n-2.
    std::vector<Mat> du;
    std::vector<double> w;

    std::size_t size() const { return u.size(); }

    static DirectionGrid circle(int N);
    static DirectionGrid circle_angles(const std::vector<double>& theta);
    static DirectionGrid sphere(int m_t, int m_phi);
    // 64 angles for n = 2, 16 x 32 for n = 3.
    static DirectionGrid defaults(int n);
};

struct Geodesic {
    std::vector<Dopri5Step> steps;
    double t_end = 0.0;
    int n = 2;
    // Position and velocity at t in [0, t_end] from the dense output.
    std::pair<Vec, Vec> at(double t) const;
};

Geodesic integrate_geodesic(const MetricSpec& m, const Vec& x, const Vec& y, double t_max,
                            double tolerance = 1e-11);

struct PolarOptions {
    double h = 1e-2;
    double r_max = 1.0;
    // Also record the lower weighted Ricci bound at every node.
    bool ricci = false;
    // Coarse direction grid for the Ricci minimization (0 picks 16 angles or 4 x 8).
    int ricci_grid = 0;
    double rtol = 1e-11;
    int jobs = 1;
};

// Per direction, samples at r_k = k h for k = 0..N; k = 0 is the pole where sigma = 0
// and delta_r is not defined.
struct PolarField {
    MetricSpec metric;
    MeasureSpec measure = MeasureSpec::lebesgue();
    Vec base;
    DirectionGrid grid;
    double h = 0.0;
    int N = 0;
    std::vector<std::vector<double>> sigma;
    std::vector<std::vector<double>> delta_r;
    std::vector<std::vector<double>> s_along;
    std::vector<std::vector<double>> ric_lower;
    std::vector<std::vector<Vec>> x;
    std::vector<std::vector<Vec>> v;

    int dim() const { return metric.dim(); }
    double r(int k) const { return k * h; }
    double r_max() const { return N * h; }
    bool has_ricci() const { return !ric_lower.empty(); }
    // Index of r on the radial grid; throws DomainError when r is not a node.
    int node(double r) const;
};

PolarField polar_field(const MetricSpec& m, const MeasureSpec& mu, const Vec& base, const DirectionGrid& grid,
                       const PolarOptions& opt);

double ball_volume(const PolarField& f, double R);

struct SphereMeasures {
    double plus = 0.0;
    double minus = 0.0;
};
SphereMeasures sphere_measures(const PolarField& f, double r);

struct HypothesisReport {
    bool pass = true;
    double worst_margin = 0.0;
    double r = 0.0;
    int theta_index = 0;
};
// S(grad r) >= -theta on every node.
HypothesisReport hypothesis_S(const PolarField& f, double theta, double tol = 1e-9);

void write_csv(const PolarField& f, std::ostream& os);

} // namespace finsler
