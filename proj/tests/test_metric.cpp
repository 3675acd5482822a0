#include "doctest.h"
#include "fd.hpp"
#include "support.hpp"

#include "finsler/errors.hpp"
#include "finsler/metric.hpp"

#include <cmath>

using namespace finsler;
using support::catalog;
using support::rel_close;

namespace {

Vec v2(double a, double b)
{
    Vec v(2);
    v << a, b;
    return v;
}

} // namespace

TEST_CASE("catalog F values")
{
    CHECK(MetricSpec::euclidean(2).F(v2(0.3, 0.1), v2(3, 4)) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(support::randers_const(2, 0.5).F(v2(0, 0), v2(1, 0)) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(MetricSpec::funk(2).F(v2(0, 0), v2(1, 0)) == doctest::Approx(1.0).epsilon(1e-15));
    // Funk forward distance along a ray through the origin: F(x, x/|x|) = 1/(1-|x|).
    CHECK(MetricSpec::funk(2).F(v2(0.5, 0), v2(1, 0)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(MetricSpec::funk(2).F(v2(0.5, 0), v2(-1, 0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));

    const Jet j = eval_F(MetricSpec::euclidean(2), v2(0, 0), v2(3, 4), 2, JetVars::fiber);
    CHECK(j.value() == doctest::Approx(5.0));
    CHECK(j.extract({1, 0}) == doctest::Approx(0.6));
}

TEST_CASE("F domain errors")
{
    CHECK_THROWS_AS(eval_F(MetricSpec::poincare(2), v2(1.2, 0), v2(1, 0), 1, JetVars::fiber), DomainError);
    CHECK_THROWS_AS(eval_F(MetricSpec::funk(2), v2(0.1, 0), v2(0, 0), 1, JetVars::fiber), DomainError);
    CHECK_THROWS_AS(support::randers_const(2, 1.2), DomainError);
}

TEST_CASE("homogeneity and positivity on the catalog")
{
    support::Sampler s(11);
    for (int n : {2, 3}) {
        for (const MetricSpec& m : catalog(n)) {
            for (int k = 0; k < 50; ++k) {
                const Vec x = s.point(m);
                const Vec y = s.direction(n);
                const double f = m.F(x, y);
                CHECK(f > 0.0);
                for (double lam : {0.5, 2.0, 10.0}) {
                    CHECK(std::abs(m.F(x, Vec(lam * y)) - lam * f) < 1e-10 * lam * f);
                }
            }
        }
    }
}

TEST_CASE("dual norm")
{
    CHECK(dual_norm(MetricSpec::euclidean(2), v2(0, 0), v2(3, 4)) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(dual_norm(MetricSpec::euclidean(2), v2(0, 0), v2(0, 0)) == 0.0);
    const MetricSpec r = support::randers_const(2, 0.5);
    // Closed-form Randers dual: 2/3 for (1,0) and 2 for (-1,0).
    CHECK(dual_norm(r, v2(0, 0), v2(1, 0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(dual_norm(r, v2(0, 0), v2(-1, 0)) == doctest::Approx(2.0).epsilon(1e-12));

    support::Sampler s(5);
    const Vec b = v2(0.5, 0);
    for (int k = 0; k < 20; ++k) {
        const Vec xi = s.direction(2) * 3.0;
        CHECK(rel_close(dual_norm(r, v2(0.1, 0.2), xi), support::randers_dual(b, xi), 1e-11));
    }
    // n = 3 constant Randers against the closed form.
    const MetricSpec r3 = support::randers_const(3, 0.3);
    Vec b3 = Vec::Zero(3);
    b3[0] = 0.3;
    for (int k = 0; k < 10; ++k) {
        const Vec xi = s.direction(3);
        CHECK(rel_close(dual_norm(r3, Vec::Zero(3), xi), support::randers_dual(b3, xi), 1e-10));
    }
}

TEST_CASE("legendre transform")
{
    const Vec xi = legendre_forward(MetricSpec::euclidean(2), v2(0.2, 0), v2(1, 2));
    CHECK(xi[0] == doctest::Approx(1.0));
    CHECK(xi[1] == doctest::Approx(2.0));

    // Finite-difference oracle for 1/2 dF^2/dy on Randers b = 0.5 at y = (1,0).
    const MetricSpec r = support::randers_const(2, 0.5);
    const fd::Scalar half_f2 = [&](const std::vector<double>& y) {
        return 0.5 * r.F2(v2(0, 0), v2(y[0], y[1]));
    };
    const Vec lr = legendre_forward(r, v2(0, 0), v2(1, 0));
    CHECK(lr[0] == doctest::Approx(2.25).epsilon(1e-12));
    CHECK(lr[0] == doctest::Approx(fd::partial(half_f2, {1.0, 0.0}, {1, 0}, 1e-3)).epsilon(1e-9));
    CHECK(std::abs(lr[1]) < 1e-12);

    CHECK(legendre_inverse(r, v2(0, 0), Vec::Zero(2)).norm() == 0.0);

    support::Sampler s(17);
    for (int n : {2, 3}) {
        for (const MetricSpec& m : catalog(n)) {
            for (int k = 0; k < 100; ++k) {
                const Vec x = s.point(m);
                const Vec y = s.direction(n);
                const Vec back = legendre_inverse(m, x, legendre_forward(m, x, y));
                CHECK((back - y).norm() < 1e-10 * y.norm());
                if (k < 10) {
                    CHECK(rel_close(dual_norm(m, x, legendre_forward(m, x, y)), m.F(x, y), 1e-8));
                }
            }
        }
    }
}

TEST_CASE("reversibility and uniformity constants")
{
    const MetricSpec e = MetricSpec::euclidean(2);
    const auto pe = default_sample_points(e);
    CHECK(reversibility_constant(e, pe) == doctest::Approx(1.0).epsilon(1e-14));
    const MetricSpec r = support::randers_const(2, 0.3);
    CHECK(reversibility_constant(r, default_sample_points(r)) ==
          doctest::Approx(1.3 / 0.7).epsilon(1e-10));
    const MetricSpec p = MetricSpec::poincare(2);
    CHECK(reversibility_constant(p, default_sample_points(p)) == doctest::Approx(1.0).epsilon(1e-14));

    for (const MetricSpec& m : {e, p, MetricSpec::sphere(2)}) {
        const Uniformity u = uniformity_constants(m, default_sample_points(m));
        CHECK(u.kappa == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(u.kappa_star == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (int n : {2, 3}) {
        for (const MetricSpec& m : catalog(n)) {
            const auto pts = default_sample_points(m);
            const Uniformity u = uniformity_constants(m, pts);
            const double lam = reversibility_constant(m, pts);
            CHECK(u.kappa_star > 0.0);
            CHECK(u.kappa_star <= 1.0 + 1e-12);
            CHECK(u.kappa >= 1.0 - 1e-12);
            CHECK(lam <= std::min(std::sqrt(u.kappa), 1.0 / std::sqrt(u.kappa_star)) + 1e-6);
            if (m.is_riemannian() || m.family() == Family::minkowski_quartic) {
                CHECK(lam == doctest::Approx(1.0).epsilon(1e-12));
            } else {
                CHECK(lam > 1.0 + 1e-3);
            }
        }
    }
    const Uniformity ur = uniformity_constants(r, default_sample_points(r));
    CHECK(ur.kappa > 1.0);
    CHECK(ur.kappa_star < 1.0);
}

TEST_CASE("dual uniform ellipticity brackets the co-metric")
{
    // kappa~ = 1/kappa*, kappa~* = 1/kappa bound g*_xi(eta,eta)/F*(eta)^2 with g* = g^{-1} at L^{-1}(xi).
    const MetricSpec r = support::randers_const(2, 0.3);
    const Uniformity u = uniformity_constants(r, default_sample_points(r));
    support::Sampler s(23);
    for (int k = 0; k < 30; ++k) {
        const Vec x = s.point(r);
        const Vec y = s.direction(2);
        const Jet j = eval_F(r, x, y, 2, JetVars::fiber, true);
        Mat g(2, 2);
        g << 0.5 * j.extract({2, 0}), 0.5 * j.extract({1, 1}), 0.5 * j.extract({1, 1}),
            0.5 * j.extract({0, 2});
        const Mat gs = g.inverse();
        const Vec eta = s.direction(2);
        const double q = eta.dot(gs * eta) / std::pow(dual_norm(r, x, eta), 2);
        CHECK(q <= 1.0 / u.kappa_star + 1e-8);
        CHECK(q >= 1.0 / u.kappa - 1e-8);
    }
}

TEST_CASE("reverse metric")
{
    support::Sampler s(3);
    const MetricSpec r = support::randers_const(2, 0.3);
    const MetricSpec rr = reverse_metric(reverse_metric(r));
    const MetricSpec e = MetricSpec::euclidean(2);
    for (int k = 0; k < 20; ++k) {
        const Vec x = s.point(r);
        const Vec y = s.direction(2);
        CHECK(std::abs(rr.F(x, y) - r.F(x, y)) <= 1e-14 * r.F(x, y));
        CHECK(reverse_metric(e).F(x, y) == e.F(x, y));
        CHECK(reverse_metric(r).F(x, y) == doctest::Approx(y.norm() - 0.3 * y[0]).epsilon(1e-14));
    }
}

TEST_CASE("measure densities")
{
    const MetricSpec e = MetricSpec::euclidean(2);
    CHECK(measure_density(MeasureSpec::lebesgue(), e, v2(0.3, 0.3)) == 1.0);
    CHECK(measure_density(MeasureSpec::busemann_hausdorff(), e, v2(0.3, 0.3)) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(measure_density(MeasureSpec::gaussian(2), e, v2(1, 0)) ==
          doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(measure_density(MeasureSpec::busemann_hausdorff(), MetricSpec::funk(2), v2(0.4, -0.3)) ==
          doctest::Approx(1.0).epsilon(1e-10));
    // Randers with constant b: indicatrix is an ellipse of area pi (1-b^2)^{-3/2}.
    CHECK(measure_density(MeasureSpec::busemann_hausdorff(), support::randers_const(2, 0.3), v2(0, 0)) ==
          doctest::Approx(std::pow(1 - 0.09, 1.5)).epsilon(1e-10));
    CHECK(measure_density(MeasureSpec::busemann_hausdorff(), support::randers_const(3, 0.3),
                          Vec::Zero(3)) == doctest::Approx(std::pow(1 - 0.09, 2.0)).epsilon(1e-9));
    // Conformal metrics: the density is the conformal factor to the n-th power.
    const double c = 2.0 / (1.0 - 0.25);
    CHECK(measure_density(MeasureSpec::busemann_hausdorff(), MetricSpec::poincare(2), v2(0.5, 0)) ==
          doctest::Approx(c * c).epsilon(1e-10));
    // Log-density jet of the Gaussian measure: -|x|^2/2.
    const Jet l = log_density_jet(MeasureSpec::gaussian(2), e, v2(1, 2), 2);
    CHECK(l.value() == doctest::Approx(-2.5));
    CHECK(l.extract({0, 1}) == doctest::Approx(-2.0));
    CHECK(l.extract({2, 0}) == doctest::Approx(-1.0));
    // Busemann-Hausdorff log-density jet of the Poincare ball: 2 ln(2/(1-|x|^2)).
    const Jet lb = log_density_jet(MeasureSpec::busemann_hausdorff(), MetricSpec::poincare(2), v2(0.3, 0), 2);
    CHECK(lb.extract({1, 0}) == doctest::Approx(2.0 * 2 * 0.3 / (1 - 0.09)).epsilon(1e-9));
}

TEST_CASE("busemann-hausdorff closed forms match the indicatrix quadrature")
{
    Vec b0(2);
    b0 << 0.2, -0.1;
    Mat B(2, 2);
    B << 0.3, 0.1, -0.2, 0.25;
    Mat a(2, 2);
    a << 1.5, 0.2, 0.2, 0.8;
    support::Sampler s(29);
    for (int n : {2, 3}) {
        auto metrics = catalog(n);
        metrics.push_back(MetricSpec::poincare(n, -2.0));
        metrics.push_back(MetricSpec::sphere(n, 0.5));
        if (n == 2) {
            metrics.push_back(MetricSpec::randers(a, b0, B, 1.0));
            metrics.push_back(reverse_metric(MetricSpec::randers(a, b0, B, 1.0)));
        }
        for (const MetricSpec& m : metrics) {
            for (int k = 0; k < 3; ++k) {
                const Vec x = s.point(m);
                const Jet c = log_density_jet(MeasureSpec::busemann_hausdorff(), m, x, 2);
                const Jet q = busemann_hausdorff_quadrature_jet(m, x, 2);
                for (int i = 0; i < c.layout().size(); ++i) {
                    CHECK(std::abs(c.coeff(i) - q.coeff(i)) < 1e-9 * std::max(1.0, std::abs(q.coeff(i))));
                }
            }
        }
    }
}
