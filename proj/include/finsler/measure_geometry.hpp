#pragma once

#include "finsler/curvature.hpp"
#include "finsler/jets.hpp"
#include "finsler/metric.hpp"
#include "finsler/types.hpp"

#include <optional>

namespace finsler {

struct WeightedRicci {
    int n = 2;
    double ric = 0.0;
    double s = 0.0;
    double s_dot = 0.0;
    double ric_inf = 0.0;
    // Ric + S' - S^2/(N - n); BadN when N = n.
    double ric_N(double N) const;
};

double distortion(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, const Vec& y);
double s_curvature(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, const Vec& y);
double s_dot(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, const Vec& y);
WeightedRicci weighted_ricci(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, const Vec& y,
                             std::optional<double> N = std::nullopt);

double ric_inf_lower(const MetricSpec& m, const MeasureSpec& mu, const Vec& x);
double ric_excess(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, double K);

// Pointwise Ric_inf helper that reuses an order-2 log-density jet in the n x-variables,
// for sweeps that evaluate many directions at one point.
WeightedRicci weighted_ricci_at(const MetricSpec& m, const Jet& log_sigma, const Vec& x, const Vec& y);
// S from precomputed local jets of order >= 3 and a log-density jet of order >= 1.
double s_from_jets(const LocalJets& lj, const Jet& log_sigma);
// Minimum of Ric_inf(x, u) / F(x, u)^2 over directions, on a grid of the given size.
double ric_inf_lower_at(const MetricSpec& m, const Jet& log_sigma, const Vec& x, int grid);

} // namespace finsler
