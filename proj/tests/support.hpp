#pragma once

#include "finsler/metric.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace support {

using finsler::Mat;
using finsler::MetricSpec;
using finsler::Vec;

inline MetricSpec randers_const(int n, double b)
{
    Vec b0 = Vec::Zero(n);
    b0[0] = b;
    return MetricSpec::randers(Mat::Identity(n, n), b0);
}

inline std::vector<MetricSpec> catalog(int n)
{
    return {MetricSpec::euclidean(n),         MetricSpec::poincare(n, -1.0),
            MetricSpec::sphere(n, 1.0),       MetricSpec::minkowski_quartic(n, 0.1),
            randers_const(n, 0.3),            MetricSpec::funk(n)};
}

class Sampler {
public:
    explicit Sampler(unsigned seed) : rng_(seed) {}

    // Uniform point in the ball of radius 0.7 (scaled to the chart when it is smaller).
    Vec point(const MetricSpec& m)
    {
        const int n = m.dim();
        const double R = std::min(0.7, 0.7 * m.chart_radius());
        Vec x(n);
        do {
            for (int i = 0; i < n; ++i) {
                x[i] = uni_(rng_) * R;
            }
        } while (x.norm() >= R);
        return x;
    }

    Vec direction(int n)
    {
        Vec y(n);
        do {
            for (int i = 0; i < n; ++i) {
                y[i] = uni_(rng_);
            }
        } while (y.norm() < 0.2 || y.norm() > 1.0);
        return y;
    }

    double uniform(double a, double b) { return a + (b - a) * 0.5 * (uni_(rng_) + 1.0); }

private:
    std::mt19937_64 rng_;
    std::uniform_real_distribution<double> uni_{-1.0, 1.0};
};

// Dual of the Randers metric |y| + b.y with constant b.
inline double randers_dual(const Vec& b, const Vec& xi)
{
    const double bb = b.squaredNorm();
    const double bx = b.dot(xi);
    return (std::sqrt((1.0 - bb) * xi.squaredNorm() + bx * bx) - bx) / (1.0 - bb);
}

inline bool rel_close(double a, double b, double tol)
{
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

} // namespace support
