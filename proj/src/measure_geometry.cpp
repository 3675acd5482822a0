#include "finsler/measure_geometry.hpp"

#include "finsler/curvature.hpp"
#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace finsler {

namespace {

// tau = ln sqrt(det g) - ln sigma over the mixed variables.
Jet distortion_jet(const LocalJets& lj, const Jet& log_sigma)
{
    const Jet ls = log_sigma.truncated(lj.det.order()).embedded(2 * lj.n, 0);
    return 0.5 * log(lj.det) - ls;
}

// Derivative along the spray: y^i d/dx^i - 2 G^i d/dy^i.
Jet flow_derivative(const LocalJets& lj, const Jet& f)
{
    const int n = lj.n;
    Jet out = f.derivative(0) * lj.Y[0];
    for (int i = 1; i < n; ++i) {
        out += f.derivative(i) * lj.Y[static_cast<std::size_t>(i)];
    }
    for (int i = 0; i < n; ++i) {
        out -= 2.0 * lj.G[static_cast<std::size_t>(i)] * f.derivative(n + i);
    }
    return out;
}

Jet log_sigma_for(const MeasureSpec& mu, const MetricSpec& m, const Vec& x)
{
    return log_density_jet(mu, m, x, 2);
}

} // namespace

double WeightedRicci::ric_N(double N) const
{
    if (N == static_cast<double>(n)) {
        throw BadN("weighted Ricci curvature needs N != n");
    }
    return ric + s_dot - s * s / (N - n);
}

double distortion(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, const Vec& y)
{
    const FundamentalTensor t = fundamental_tensor(m, x, y);
    return 0.5 * std::log(t.g.determinant()) - std::log(measure_density(mu, m, x));
}

WeightedRicci weighted_ricci_at(const MetricSpec& m, const Jet& log_sigma, const Vec& x, const Vec& y)
{
    const LocalJets lj = local_jets(m, x, y, 4);
    const Jet tau = distortion_jet(lj, log_sigma);
    const Jet S = flow_derivative(lj, tau);
    WeightedRicci w;
    w.n = m.dim();
    w.ric = berwald_curvature(lj).trace();
    w.s = S.value();
    w.s_dot = flow_derivative(lj, S).value();
    w.ric_inf = w.ric + w.s_dot;
    return w;
}

double s_from_jets(const LocalJets& lj, const Jet& log_sigma)
{
    return flow_derivative(lj, distortion_jet(lj, log_sigma)).value();
}

double s_curvature(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, const Vec& y)
{
    return s_from_jets(local_jets(m, x, y, 3), log_density_jet(mu, m, x, 1));
}

double s_dot(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, const Vec& y)
{
    return weighted_ricci_at(m, log_sigma_for(mu, m, x), x, y).s_dot;
}

WeightedRicci weighted_ricci(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, const Vec& y,
                             std::optional<double> N)
{
    if (N && *N == static_cast<double>(m.dim())) {
        throw BadN("weighted Ricci curvature needs N != n");
    }
    return weighted_ricci_at(m, log_sigma_for(mu, m, x), x, y);
}

double ric_inf_lower_at(const MetricSpec& m, const Jet& log_sigma, const Vec& x, int grid)
{
    const int n = m.dim();
    if (m.is_riemannian()) {
        // Ric_inf is a quadratic form in y here; recover it by polarization and take the
        // smallest eigenvalue relative to g.
        Mat Q(n, n);
        Vec diag(n);
        for (int i = 0; i < n; ++i) {
            Vec e = Vec::Zero(n);
            e[i] = 1.0;
            diag[i] = weighted_ricci_at(m, log_sigma, x, e).ric_inf;
            Q(i, i) = diag[i];
        }
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                Vec e = Vec::Zero(n);
                e[i] = 1.0;
                e[j] = 1.0;
                Q(i, j) = Q(j, i) = 0.5 * (weighted_ricci_at(m, log_sigma, x, e).ric_inf - diag[i] - diag[j]);
            }
        }
        Vec e0 = Vec::Zero(n);
        e0[0] = 1.0;
        const Mat g = fundamental_tensor(m, x, e0).g;
        Eigen::GeneralizedSelfAdjointEigenSolver<Mat> es(Q, g, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    const DirectionFn f = [&](const Vec& u) {
        return -weighted_ricci_at(m, log_sigma, x, u).ric_inf / m.F2(x, u);
    };
    return -maximize_on_sphere(m.dim(), f, grid).value;
}

double ric_inf_lower(const MetricSpec& m, const MeasureSpec& mu, const Vec& x)
{
    m.require_chart(as_span(x));
    return ric_inf_lower_at(m, log_sigma_for(mu, m, x), x, default_search_grid(m.dim()));
}

double ric_excess(const MetricSpec& m, const MeasureSpec& mu, const Vec& x, double K)
{
    return std::max((m.dim() - 1) * K - ric_inf_lower(m, mu, x), 0.0);
}

} // namespace finsler
