#pragma once

#include "finsler/geodesic_polar.hpp"

#include <algorithm>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace finsler {

// Comparison quantities of the constant-curvature model with an e^{theta t} weight.
class ModelFunctions {
public:
    ModelFunctions(int n, double K, double theta);

    int n() const { return n_; }
    double K() const { return K_; }
    double theta() const { return theta_; }

    double s(double t) const;
    double ds(double t) const;
    // (n-1) s'/s; PoleError where s vanishes.
    double H(double t) const;
    // |S^{n-1}| * integral_0^t e^{theta s} s_K^{n-1}.
    double v(double t) const;
    // The same integral over [r, R].
    double v(double r, double R) const;
    double sphere_area() const { return area_; }
    // pi / (2 sqrt K) for K > 0, infinity otherwise.
    double radius_cap() const;

private:
    int n_;
    double K_;
    double theta_;
    double area_;
};

ModelFunctions model_functions(int n, double K, double theta);

// Euclidean area of the unit sphere S^{n-1}.
double unit_sphere_area(int n);

struct IntegralNorms {
    double p = 0.0;
    double R = 0.0;
    double theta = 0.0;
    double K = 0.0;
    double ball_volume = 0.0;
    double norm_bar = 0.0;
    double kbar = 0.0;
};

// Needs a field sampled with ricci = true.
IntegralNorms integral_norms(const PolarField& f, double p, double R, double theta, double K);

enum class Status { pass, fail, hypothesis_unmet, threshold_unmet, informational };
std::string status_name(Status s);

struct Tolerance {
    double abs = 1e-8;
    double rel = 1e-6;
    Tolerance scaled(double s) const { return {abs * s, rel * s}; }
};

struct ReportRow {
    double r = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;
    // Direction index for per-ray rows, -1 for aggregated rows.
    int theta_index = -1;
    // Negative margin tolerated for this row.
    double slack = 0.0;
    bool kink = false;
};

struct ComparisonReport {
    std::string theorem;
    bool hypothesis_ok = true;
    std::string note;
    Status status = Status::pass;
    Tolerance tol;
    std::vector<ReportRow> rows;
    // Named scalars in insertion order (constants, thresholds, norms).
    std::vector<std::pair<std::string, double>> values;

    void add_row(double r, double lhs, double rhs, int theta_index = -1, double slack_factor = 1.0,
                 bool kink = false);
    void set(const std::string& key, double value);
    double value(const std::string& key) const;
    double worst_margin() const;
    bool rows_pass() const;
    // pass/fail from the rows unless the status was already set to an unmet state.
    void settle();
};

void write_csv(const ComparisonReport& rep, std::ostream& os);

// phi' + phi^2/(n-1) + 2 phi H_K/(n-1) <= Ric^K_inf along every ray, with
// phi = (Delta r - H_K - theta)_+. Rows past the K > 0 radius cap are skipped.
ComparisonReport riccati_check(const PolarField& f, const ModelFunctions& model, Tolerance tol = {1e-4, 0.0});

// Returns the integrated phi^{2p} bound and the pointwise phi^{2p-1} bound.
std::pair<ComparisonReport, ComparisonReport> check_laplacian_comparison(const PolarField& f, double p, double K,
                                                                         double theta, Tolerance tol = {});

double constant_C_volume(int n, double p, double theta, double K, double R, double mBR);

// Also returns the monotonicity of m(B_r)/v(r), asserted when norm_bar vanishes.
std::pair<ComparisonReport, ComparisonReport> check_volume_comparison(const PolarField& f, double p, double K,
                                                                      double theta, double r, double R,
                                                                      Tolerance tol = {});

struct DoublingThreshold {
    double C = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double eps() const { return std::min(eps1, eps2); }
};
DoublingThreshold doubling_threshold(const ModelFunctions& model, double p, double Xi, double R, double mBR);

ComparisonReport check_doubling(const PolarField& f, double p, double K, double theta, double Xi, double r1,
                                double r2, double R, Tolerance tol = {});

double constant_C_relative(const ModelFunctions& model, double p, double r1, double r2, double R1, double R2,
                           double mBR2);

ComparisonReport check_relative_volume(const PolarField& f, double p, double K, double theta, double r1, double r2,
                                       double R1, double R2, Tolerance tol = {});

// C_5(n, p) of the shell estimate.
double growth_constant(int n, double p);

ComparisonReport check_volume_growth(const PolarField& f, double p, double R, Tolerance tol = {});

ComparisonReport check_norm_relation(const PolarField& f, double p, double K, double theta, double Xi, double r1,
                                     double r2, Tolerance tol = {});

} // namespace finsler
