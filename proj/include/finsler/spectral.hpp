#pragma once

#include "finsler/comparison.hpp"
#include "finsler/geodesic_polar.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace finsler {

// Concentric-ball isoperimetric ratios. The infimum over the family only bounds the
// Dirichlet isoperimetric constant of B_R from above.
struct IsoProfile {
    int n = 2;
    double R = 0.0;
    std::vector<double> t;
    std::vector<double> volume;
    std::vector<double> nu_plus;
    std::vector<double> nu_minus;
    // min(nu_plus, nu_minus) / m(B_t)^{(n-1)/n}
    std::vector<double> ratio;
    // ratio / m(B_R)^{1/n}
    std::vector<double> normalized;

    std::size_t size() const { return t.size(); }
};

// Rows at every grid radius in (0, R].
IsoProfile iso_profile(const PolarField& f, double R);
void write_csv(const IsoProfile& p, std::ostream& os);

struct IsoConstants {
    int n = 2;
    double Lambda = 1.0;
    double theta = 0.0;
    double Xi = 2.0;
    double a0 = 0.0;
    int k = 2;
    int iterations = 0;
    // False when the k <-> r0 iteration did not settle; r0 is then 0 and the constants infinite.
    bool converged = true;
    double r0 = 0.0;
    double C_iso = 0.0;
    double C_SD = 0.0;
    // Only defined for n >= 3.
    std::optional<double> C_tilde;
};

IsoConstants r0_and_constants(int n, double Lambda, double theta, double Xi);
// (2(n-1)/(n-2))^2 C_SD^2; BadDimension for n <= 2.
double sobolev_constant_tilde(int n, double C_SD);

// Every normalized ratio of a profile over [0, r] must be at least 1/(C_iso r).
// Without a certified curvature threshold the report is informational.
ComparisonReport check_iso_bound(const IsoProfile& profile, const IsoConstants& c, double r, bool threshold_met);

// True when kbar(p, R, theta) vanishes on the field, which certifies every smallness threshold.
bool curvature_threshold_certified(const PolarField& f, double p, double R, double theta);

// Cutoff functions built from distance to the sphere dB_t: the inner layer approximates
// nu_minus, the outer layer nu_plus. Translation-invariant metrics use exact chart geometry
// (Minkowski erosion and dilation of the indicatrix); other metrics use ball volumes for the
// outer layer and the first-order inward distance (t - r) / F*(-dr) for the inner one.
struct CoareaResult {
    double t = 0.0;
    std::vector<double> eps;
    std::vector<double> inner;
    std::vector<double> outer;
    double inner_limit = 0.0;
    double outer_limit = 0.0;
    double nu_minus = 0.0;
    double nu_plus = 0.0;
    bool chart_route = false;
};
CoareaResult coarea_limits(const PolarField& f, double t, std::vector<double> eps = {});
ComparisonReport coarea_consistency(const PolarField& f, double R, std::vector<double> eps = {},
                                    Tolerance tol = {1e-4, 0.0});

struct RadialFunction {
    double h = 0.0;
    std::vector<double> r;
    std::vector<double> u;
    std::vector<double> du;
    bool dirichlet_outer = false;
    // +1 increasing, -1 decreasing on the grid, 0 otherwise.
    int monotone = 0;
};

struct EigenResult {
    double lambda1 = 0.0;
    // Same solve on every other node.
    double lambda1_coarse = 0.0;
    RadialFunction profile;
    ComparisonReport bound_check;
};

// Radial Dirichlet eigenvalue on B_R with piecewise-linear elements and lumped mass.
// GridTooCoarse when the extrapolated value differs from the fine one by more than 0.1%.
EigenResult lambda1_radial(const PolarField& f, double R, const IsoConstants& c, bool threshold_met);

struct HarmonicResult {
    RadialFunction u;
    double flux = 0.0;
    double residual = 0.0;
    // sup over the middle half of the annulus of F^2(grad u) R^2 m(B_R) / ||u||^2.
    double Q = 0.0;
};

// Radially averaged harmonic function on [r_inner, R]: (A u')' = 0, u(r_inner) = 0, u(R) = 1.
HarmonicResult radial_harmonic(const PolarField& f, double r_inner, double R);

void write_csv(const RadialFunction& u, std::ostream& os);

} // namespace finsler
