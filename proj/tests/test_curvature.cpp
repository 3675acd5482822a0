#include "doctest.h"
#include "fd.hpp"
#include "support.hpp"

#include "finsler/curvature.hpp"
#include "finsler/errors.hpp"
#include "finsler/measure_geometry.hpp"

#include <cmath>

using namespace finsler;
using support::catalog;
using support::rel_close;

namespace {

std::vector<double> stacked(const Vec& x, const Vec& y)
{
    std::vector<double> v(static_cast<std::size_t>(x.size() + y.size()));
    for (int i = 0; i < x.size(); ++i) {
        v[static_cast<std::size_t>(i)] = x[i];
        v[static_cast<std::size_t>(x.size() + i)] = y[i];
    }
    return v;
}

fd::Scalar f2_of(const MetricSpec& m)
{
    const int n = m.dim();
    return [&m, n](const std::vector<double>& v) {
        Vec x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x[i] = v[static_cast<std::size_t>(i)];
            y[i] = v[static_cast<std::size_t>(n + i)];
        }
        return m.F2(x, y);
    };
}

std::vector<int> alpha(int nv, std::initializer_list<int> vars)
{
    std::vector<int> a(static_cast<std::size_t>(nv), 0);
    for (int v : vars) {
        ++a[static_cast<std::size_t>(v)];
    }
    return a;
}

// Spray from finite differences of F^2 alone.
Vec fd_spray(const MetricSpec& m, const Vec& x, const Vec& y)
{
    const int n = m.dim();
    const fd::Scalar f = f2_of(m);
    const auto p = stacked(x, y);
    const double h = 1e-3;
    Mat g(n, n);
    Vec w(n);
    for (int l = 0; l < n; ++l) {
        for (int k = 0; k < n; ++k) {
            g(l, k) = 0.5 * fd::partial(f, p, alpha(2 * n, {n + l, n + k}), h);
        }
        w[l] = -fd::partial(f, p, alpha(2 * n, {l}), h);
        for (int k = 0; k < n; ++k) {
            w[l] += fd::partial(f, p, alpha(2 * n, {k, n + l}), h) * y[k];
        }
    }
    return 0.25 * g.inverse() * w;
}

// Spray of the conformal metric e^{2 phi}|y|^2: (dphi.y) y - |y|^2 grad phi / 2.
Vec conformal_spray(const Vec& grad_phi, const Vec& y)
{
    return grad_phi.dot(y) * y - 0.5 * y.squaredNorm() * grad_phi;
}

// Berwald curvature from finite differences of the jet-free spray at order 2.
Mat fd_curvature(const MetricSpec& m, const Vec& x, const Vec& y)
{
    const int n = m.dim();
    const auto p = stacked(x, y);
    const double h = 1e-3;
    auto G = [&](int i) -> fd::Scalar {
        return [&m, n, i](const std::vector<double>& v) {
            Vec xx(n), yy(n);
            for (int a = 0; a < n; ++a) {
                xx[a] = v[static_cast<std::size_t>(a)];
                yy[a] = v[static_cast<std::size_t>(n + a)];
            }
            return spray_coefficients(m, xx, yy)[i];
        };
    };
    const Vec G0 = spray_coefficients(m, x, y);
    Mat R(n, n);
    for (int i = 0; i < n; ++i) {
        const fd::Scalar Gi = G(i);
        for (int k = 0; k < n; ++k) {
            double r = 2.0 * fd::partial(Gi, p, alpha(2 * n, {k}), h);
            for (int j = 0; j < n; ++j) {
                const fd::Scalar Gj = G(j);
                r -= y[j] * fd::partial(Gi, p, alpha(2 * n, {j, n + k}), h);
                r += 2.0 * G0[j] * fd::partial(Gi, p, alpha(2 * n, {n + j, n + k}), h);
                r -= fd::partial(Gi, p, alpha(2 * n, {n + j}), h) * fd::partial(Gj, p, alpha(2 * n, {n + k}), h);
            }
            R(i, k) = r;
        }
    }
    return R;
}

Vec unit(int n, int i)
{
    Vec e = Vec::Zero(n);
    e[i] = 1.0;
    return e;
}

MetricSpec randers_varying()
{
    Vec b0(2);
    b0 << 0.2, -0.1;
    Mat B(2, 2);
    B << 0.3, 0.1, -0.2, 0.25;
    return MetricSpec::randers(Mat::Identity(2, 2), b0, B, 1.0);
}

// Geodesic step for the flow-consistency oracle: classical RK4 on (x, y) with x'' = -2G.
void rk4(const MetricSpec& m, Vec& x, Vec& y, double dt)
{
    auto acc = [&](const Vec& xx, const Vec& yy) { return Vec(-2.0 * spray_coefficients(m, xx, yy)); };
    const Vec k1x = y, k1y = acc(x, y);
    const Vec k2x = y + 0.5 * dt * k1y, k2y = acc(x + 0.5 * dt * k1x, y + 0.5 * dt * k1y);
    const Vec k3x = y + 0.5 * dt * k2y, k3y = acc(x + 0.5 * dt * k2x, y + 0.5 * dt * k2y);
    const Vec k4x = y + dt * k3y, k4y = acc(x + dt * k3x, y + dt * k3y);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
}

double tau_along(const MetricSpec& m, const MeasureSpec& mu, Vec x, Vec y, double t)
{
    const int steps = 20;
    const double dt = t / steps;
    for (int s = 0; s < steps; ++s) {
        rk4(m, x, y, dt);
    }
    return distortion(m, mu, x, y);
}

} // namespace

TEST_CASE("fundamental tensor against finite differences")
{
    support::Sampler s(31);
    for (int n : {2, 3}) {
        auto metrics = catalog(n);
        if (n == 2) {
            metrics.push_back(randers_varying());
        }
        for (const MetricSpec& m : metrics) {
            const fd::Scalar f = f2_of(m);
            for (int k = 0; k < 5; ++k) {
                const Vec x = s.point(m);
                const Vec y = s.direction(n);
                const FundamentalTensor t = fundamental_tensor(m, x, y);
                const auto p = stacked(x, y);
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        const double o = 0.5 * fd::partial(f, p, alpha(2 * n, {n + i, n + j}), 1e-3);
                        CHECK(std::abs(t.g(i, j) - o) < 1e-7 * std::max(1.0, std::abs(o)));
                    }
                }
                CHECK((t.g * t.g_inv - Mat::Identity(n, n)).norm() < 1e-12);
                // Euler: g_y(y, y) = F^2.
                CHECK(rel_close(y.dot(t.g * y), m.F2(x, y), 1e-12));
            }
        }
    }
    // Randers b = 0.5 at y = e1: g11 = (1 + b)^2.
    CHECK(fundamental_tensor(support::randers_const(2, 0.5), Vec::Zero(2), unit(2, 0)).g(0, 0) ==
          doctest::Approx(2.25).epsilon(1e-12));
    CHECK(fundamental_tensor(MetricSpec::poincare(2), Vec::Zero(2), unit(2, 1)).g.isApprox(4.0 * Mat::Identity(2, 2)));
}

TEST_CASE("cartan tensor")
{
    support::Sampler s(37);
    for (int n : {2, 3}) {
        for (const MetricSpec& m : catalog(n)) {
            const fd::Scalar f = f2_of(m);
            const Vec x = s.point(m);
            const Vec y = s.direction(n);
            const Tensor3 c = cartan_tensor(m, x, y);
            const auto p = stacked(x, y);
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j < n; ++j) {
                    double cy = 0.0;
                    for (int k = 0; k < n; ++k) {
                        cy += c(i, j, k) * y[k];
                        const double o = 0.25 * fd::partial(f, p, alpha(2 * n, {n + i, n + j, n + k}), 1e-2);
                        CHECK(std::abs(c(i, j, k) - o) < 1e-5 * std::max(1.0, std::abs(o)));
                        CHECK(c(i, j, k) == doctest::Approx(c(k, i, j)).epsilon(1e-12));
                    }
                    CHECK(std::abs(cy) < 1e-10);
                }
            }
            if (m.is_riemannian()) {
                for (int i = 0; i < n; ++i) {
                    CHECK(std::abs(c(i, i, i)) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("spray coefficients")
{
    support::Sampler s(41);
    for (int n : {2, 3}) {
        auto metrics = catalog(n);
        if (n == 2) {
            metrics.push_back(randers_varying());
        }
        for (const MetricSpec& m : metrics) {
            for (int k = 0; k < 5; ++k) {
                const Vec x = s.point(m);
                const Vec y = s.direction(n);
                const Vec G = spray_coefficients(m, x, y);
                const Vec o = fd_spray(m, x, y);
                CHECK((G - o).norm() < 1e-6 * std::max(1.0, o.norm()));
                // Homogeneity of degree two.
                CHECK((spray_coefficients(m, x, Vec(2.5 * y)) - 6.25 * G).norm() < 1e-10 * std::max(1.0, G.norm()));
                if (m.family() == Family::funk) {
                    CHECK((G - 0.5 * m.F(x, y) * y).norm() < 1e-11);
                }
                if (m.family() == Family::poincare || m.family() == Family::sphere) {
                    const double sgn = m.family() == Family::poincare ? 1.0 : -1.0;
                    const Vec grad = sgn * 2.0 * x / (1.0 - sgn * x.squaredNorm());
                    CHECK((G - conformal_spray(grad, y)).norm() < 1e-12);
                }
            }
        }
    }
    CHECK(spray_coefficients(MetricSpec::poincare(2), Vec::Zero(2), unit(2, 0)).norm() < 1e-15);
}

TEST_CASE("berwald curvature")
{
    support::Sampler s(43);
    for (int n : {2, 3}) {
        for (const MetricSpec& m : catalog(n)) {
            for (int k = 0; k < 4; ++k) {
                const Vec x = s.point(m);
                const Vec y = s.direction(n);
                const CurvatureData d = riemann_endomorphism(m, x, y);
                const double f2 = m.F2(x, y);
                // R(y) = 0 and degree-two homogeneity.
                CHECK((d.R * y).norm() < 1e-9 * std::max(1.0, f2));
                CHECK(rel_close(riemann_endomorphism(m, x, Vec(3.0 * y)).ricci, 9.0 * d.ricci, 1e-8));
                double K = 0.0;
                switch (m.family()) {
                case Family::sphere: K = 1.0; break;
                case Family::poincare: K = -1.0; break;
                case Family::funk: K = -0.25; break;
                default: K = 0.0;
                }
                CHECK(std::abs(d.ricci - (n - 1) * K * f2) < 1e-9 * std::max(1.0, f2));
                Vec w = s.direction(n);
                w -= (w.dot(y) / y.squaredNorm()) * y;
                if (w.norm() > 0.05) {
                    CHECK(std::abs(d.flag(w) - K) < 1e-8);
                }
            }
        }
    }
    const CurvatureData d = riemann_endomorphism(MetricSpec::funk(2), Vec::Zero(2), unit(2, 0));
    CHECK(d.flag(unit(2, 1)) == doctest::Approx(-0.25).epsilon(1e-10));
    CHECK_THROWS_AS(d.flag(unit(2, 0)), DegenerateFlag);

    // Non-constant Randers: jet pipeline against finite differences of the spray.
    const MetricSpec r = randers_varying();
    for (int k = 0; k < 3; ++k) {
        const Vec x = s.point(r);
        const Vec y = s.direction(2);
        const Mat R = riemann_endomorphism(r, x, y).R;
        const Mat o = fd_curvature(r, x, y);
        CHECK((R - o).norm() < 1e-5 * std::max(1.0, o.norm()));
    }
}

TEST_CASE("distortion and S-curvature")
{
    const MetricSpec e = MetricSpec::euclidean(2);
    const MeasureSpec leb = MeasureSpec::lebesgue();
    const MeasureSpec gauss = MeasureSpec::gaussian(2);
    const MeasureSpec bh = MeasureSpec::busemann_hausdorff();
    CHECK(distortion(e, leb, Vec::Constant(2, 0.3), unit(2, 0)) == 0.0);

    const MetricSpec r = support::randers_const(2, 0.5);
    const fd::Scalar f = f2_of(r);
    Mat g(2, 2);
    const auto p = stacked(Vec::Zero(2), unit(2, 0));
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            g(i, j) = 0.5 * fd::partial(f, p, alpha(4, {2 + i, 2 + j}), 1e-3);
        }
    }
    CHECK(distortion(r, leb, Vec::Zero(2), unit(2, 0)) == doctest::Approx(0.5 * std::log(g.determinant())).epsilon(1e-8));

    support::Sampler s(47);
    for (int k = 0; k < 10; ++k) {
        const Vec x = s.point(e) * 2.0;
        const Vec y = s.direction(2);
        // Riemannian metric with e^{-P} Vol: tau = P(x).
        CHECK(distortion(e, gauss, x, y) == doctest::Approx(0.5 * x.squaredNorm()).epsilon(1e-13));
        CHECK(s_curvature(e, gauss, x, y) == doctest::Approx(x.dot(y)).epsilon(1e-12));
        CHECK(s_dot(e, gauss, x, y) == doctest::Approx(y.squaredNorm()).epsilon(1e-12));
        const WeightedRicci w = weighted_ricci(e, gauss, x, y);
        CHECK(w.ric_inf == w.ric + w.s_dot);
        // The gap to Ric_inf is exactly S^2 / (N - n).
        CHECK(std::abs(w.ric_inf - w.ric_N(1e6) - w.s * w.s / (1e6 - 2)) < 1e-15 * std::max(1.0, std::abs(w.ric_inf)));
    }
    CHECK_THROWS_AS(weighted_ricci(e, gauss, unit(2, 0), unit(2, 1), 2.0), BadN);
    CHECK_THROWS_AS(weighted_ricci(e, gauss, unit(2, 0), unit(2, 1)).ric_N(2.0), BadN);

    for (int n : {2, 3}) {
        const MetricSpec funk = MetricSpec::funk(n);
        for (int k = 0; k < 4; ++k) {
            const Vec x = s.point(funk);
            Vec y = s.direction(n);
            y /= funk.F(x, y);
            CHECK(std::abs(s_curvature(funk, bh, x, y) - 0.5 * (n + 1)) < 1e-3);
            CHECK(std::abs(s_dot(funk, bh, x, y)) < 1e-3);
        }
        // Metrics whose busemann-hausdorff measure has vanishing S.
        for (const MetricSpec& m : catalog(n)) {
            if (m.family() == Family::funk) {
                continue;
            }
            const Vec x = s.point(m);
            const Vec y = s.direction(n);
            const WeightedRicci w = weighted_ricci(m, bh, x, y);
            CHECK(std::abs(w.s) < 1e-9);
            CHECK(std::abs(w.s_dot) < 1e-9);
            CHECK(std::abs(s_curvature(m, bh, x, Vec(2.0 * y)) - 2.0 * w.s) < 1e-9);
        }
    }
    const WeightedRicci sw = weighted_ricci(MetricSpec::sphere(2), bh, Vec::Constant(2, 0.2), Vec(unit(2, 0) / MetricSpec::sphere(2).F(Vec::Constant(2, 0.2), unit(2, 0))));
    CHECK(sw.ric_inf == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("S-curvature matches the derivative of distortion along geodesics")
{
    support::Sampler s(53);
    const MeasureSpec leb = MeasureSpec::lebesgue();
    std::vector<std::pair<MetricSpec, MeasureSpec>> cases = {
        {MetricSpec::poincare(2), leb},
        {randers_varying(), leb},
        {randers_varying(), MeasureSpec::busemann_hausdorff()},
        {MetricSpec::funk(2), leb},
        {MetricSpec::minkowski_quartic(3, 0.1), MeasureSpec::gaussian(3)},
    };
    for (const auto& [m, mu] : cases) {
        const Vec x = s.point(m) * 0.5;
        const Vec y = s.direction(m.dim());
        const double h = 1e-3;
        const double o = (tau_along(m, mu, x, y, h) - tau_along(m, mu, x, y, -h)) / (2 * h);
        CHECK(std::abs(s_curvature(m, mu, x, y) - o) < 1e-6);
        const double o2 =
            (tau_along(m, mu, x, y, h) - 2 * distortion(m, mu, x, y) + tau_along(m, mu, x, y, -h)) / (h * h);
        CHECK(std::abs(s_dot(m, mu, x, y) - o2) < 1e-4);
    }
}

TEST_CASE("lower weighted Ricci bound")
{
    const MeasureSpec leb = MeasureSpec::lebesgue();
    CHECK(std::abs(ric_inf_lower(MetricSpec::euclidean(2), leb, Vec::Zero(2))) < 1e-12);
    CHECK(ric_inf_lower(MetricSpec::euclidean(2), MeasureSpec::gaussian(2), Vec::Constant(2, 0.4)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    // Poincare + Lebesgue at the center: Ric = -(n-1) F^2 and S' = 2n |y|^2 with F^2 = 4|y|^2.
    CHECK(std::abs(ric_inf_lower(MetricSpec::poincare(2), leb, Vec::Zero(2))) < 1e-12);
    CHECK(ric_inf_lower(MetricSpec::poincare(3), leb, Vec::Zero(3)) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(ric_excess(MetricSpec::euclidean(3), leb, Vec::Zero(3), 1.0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(ric_excess(MetricSpec::euclidean(2), MeasureSpec::gaussian(2), Vec::Zero(2), 1.0) < 1e-10);
    // Poincare + BH is the hyperbolic volume: Ric_inf = -(n-1) F^2.
    CHECK(ric_inf_lower(MetricSpec::poincare(3), MeasureSpec::busemann_hausdorff(), Vec::Constant(3, 0.1)) ==
          doctest::Approx(-2.0).epsilon(1e-8));

    // The quadratic-form shortcut for Riemannian metrics against a plain direction scan.
    const MetricSpec p = MetricSpec::poincare(2);
    const MeasureSpec gauss = MeasureSpec::gaussian(2);
    Vec x(2);
    x << 0.3, -0.2;
    auto ratio = [&](double t) {
        Vec u(2);
        u << std::cos(t), std::sin(t);
        return weighted_ricci(p, gauss, x, u).ric_inf / p.F2(x, u);
    };
    double scan = 1e300;
    double best = 0.0;
    for (int k = 0; k < 1000; ++k) {
        const double t = k * 2e-3 * M_PI;
        if (ratio(t) < scan) {
            scan = ratio(t);
            best = t;
        }
    }
    for (int k = -500; k <= 500; ++k) {
        scan = std::min(scan, ratio(best + k * 4e-6 * M_PI));
    }
    const double fast = ric_inf_lower(p, gauss, x);
    CHECK(fast <= scan + 1e-12);
    CHECK(fast == doctest::Approx(scan).epsilon(1e-8));
    // Non-Riemannian grid search, Minkowski norm with Gaussian weight: ratio |y|^2 / F^2, smallest on the axes.
    const MetricSpec mq = MetricSpec::minkowski_quartic(2, 0.1);
    CHECK(ric_inf_lower(mq, gauss, Vec::Zero(2)) == doctest::Approx(1.0 / 1.1).epsilon(1e-9));
}
