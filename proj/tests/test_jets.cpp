#include "doctest.h"
#include "fd.hpp"

#include "finsler/errors.hpp"
#include "finsler/jets.hpp"

#include <cmath>
#include <vector>

using namespace finsler;

namespace {

template <class T>
T mixed_program(const T& x, const T& y)
{
    using std::cosh;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sinh;
    using std::sqrt;
    return exp(sin(x) * y) / sqrt(1.0 + x * x + y * y * y * y) + cosh(x) * log(2.0 + y) +
           pow(1.0 + x * x, 1.5) * sinh(y) - cos(x * y);
}

} // namespace

TEST_CASE("jet values of polynomials")
{
    const double p[] = {3.0};
    const Jet j = jet_eval([](std::span<const Jet> v) { return v[0] * v[0]; }, p, 2);
    CHECK(j.extract({0}) == 9.0);
    CHECK(j.extract({1}) == 6.0);
    CHECK(j.extract({2}) == 2.0);

    const double q[] = {2.0, 3.0};
    const Jet k = jet_eval([](std::span<const Jet> v) { return v[0] * v[1] * v[1]; }, q, 3);
    CHECK(k.extract({1, 1}) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(k.extract({0, 2}) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(k.extract({1, 2}) == doctest::Approx(2.0).epsilon(1e-15));

    const double one[] = {1.0};
    const Jet y4 = jet_eval([](std::span<const Jet> v) { return pow(v[0], 4.0); }, one, 4);
    CHECK(y4.extract({3}) == doctest::Approx(24.0).epsilon(1e-15));
    CHECK(y4.extract({4}) == doctest::Approx(24.0).epsilon(1e-15));
}

TEST_CASE("elementary function jets")
{
    const double zero[] = {0.0};
    const Jet e = jet_eval([](std::span<const Jet> v) { return exp(v[0]); }, zero, 3);
    for (int k = 0; k <= 3; ++k) {
        CHECK(e.extract({k}) == doctest::Approx(1.0).epsilon(1e-15));
    }
    const double one[] = {1.0};
    const Jet s = jet_eval([](std::span<const Jet> v) { return sinh(v[0]); }, one, 3);
    CHECK(s.extract({1}) == doctest::Approx(1.5430806348152437).epsilon(1e-14));
    CHECK(s.extract({2}) == doctest::Approx(std::sinh(1.0)).epsilon(1e-14));

    const double two[] = {2.0};
    const Jet l = jet_eval([](std::span<const Jet> v) { return log(v[0]); }, two, 4);
    CHECK(l.extract({1}) == doctest::Approx(0.5));
    CHECK(l.extract({2}) == doctest::Approx(-0.25));
    CHECK(l.extract({3}) == doctest::Approx(0.25));
    CHECK(l.extract({4}) == doctest::Approx(-6.0 / 16.0));

    const Jet c = jet_eval([](std::span<const Jet> v) { return cos(v[0]) * sin(v[0]); }, two, 3);
    // sin x cos x = sin(2x)/2
    CHECK(c.extract({3}) == doctest::Approx(-4.0 * std::cos(4.0)).epsilon(1e-13));
}

TEST_CASE("linearity is coefficientwise")
{
    const double p[] = {0.3, -0.7};
    auto f = [](std::span<const Jet> v) { return sin(v[0]) * exp(v[1]); };
    auto g = [](std::span<const Jet> v) { return sqrt(2.0 + v[0] * v[1]); };
    const Jet jf = jet_eval(f, p, 4);
    const Jet jg = jet_eval(g, p, 4);
    const Jet jh = jet_eval([&](std::span<const Jet> v) { return 2.5 * f(v) - 1.5 * g(v); }, p, 4);
    for (int k = 0; k < jh.layout().size(); ++k) {
        const double expect = 2.5 * jf.coeff(k) - 1.5 * jg.coeff(k);
        CHECK(std::abs(jh.coeff(k) - expect) <= 1e-14 * (1.0 + std::abs(expect)));
    }
}

TEST_CASE("chain rule matches expanded polynomial")
{
    const double p[] = {1.0, 1.0};
    // (x + 2y^2)^3 through composition versus repeated products.
    const Jet composed = jet_eval(
        [](std::span<const Jet> v) {
            const Jet g = v[0] + 2.0 * v[1] * v[1];
            const double t = g.value();
            const double d[] = {t * t * t, 3 * t * t, 6 * t, 6.0};
            return compose(g, d);
        },
        p, 3);
    const Jet expanded = jet_eval(
        [](std::span<const Jet> v) {
            const Jet g = v[0] + 2.0 * v[1] * v[1];
            return g * g * g;
        },
        p, 3);
    for (int k = 0; k < composed.layout().size(); ++k) {
        CHECK(composed.coeff(k) == doctest::Approx(expanded.coeff(k)).epsilon(1e-14));
    }
    CHECK(composed.extract({1, 1}) == doctest::Approx(72.0));
}

TEST_CASE("jet partials agree with finite differences")
{
    const std::vector<double> x = {0.4, 0.3};
    const double p[] = {0.4, 0.3};
    const Jet j = jet_eval([](std::span<const Jet> v) { return mixed_program(v[0], v[1]); }, p, 3);
    const fd::Scalar f = [](const std::vector<double>& z) { return mixed_program(z[0], z[1]); };
    for (int k = 1; k < j.layout().size(); ++k) {
        const MultiIndex& m = j.layout().index(k);
        const std::vector<int> alpha = {m[0], m[1]};
        const double h = m.degree() == 1 ? 1e-3 : 2e-2;
        const double ref = fd::partial(f, x, alpha, h);
        const double tol = m.degree() == 1 ? 1e-9 : (m.degree() == 2 ? 1e-6 : 1e-4);
        CHECK(std::abs(j.coeff(k) - ref) <= tol * std::max(1.0, std::abs(ref)));
    }
}

TEST_CASE("derivative, truncation and embedding")
{
    const double p[] = {0.5, 2.0};
    const Jet j = jet_eval([](std::span<const Jet> v) { return v[0] * v[0] * v[1] * v[1] * v[1]; }, p, 4);
    const Jet dy = j.derivative(1);
    CHECK(dy.order() == 3);
    CHECK(dy.value() == doctest::Approx(3 * 0.25 * 4.0));
    CHECK(dy.extract({1, 1}) == doctest::Approx(2 * 0.5 * 6 * 2.0));
    const Jet t = j.truncated(2);
    CHECK(t.layout().size() == 6);
    CHECK(t.extract({1, 1}) == doctest::Approx(j.extract({1, 1})));

    const double q[] = {1.5};
    const Jet s = jet_eval([](std::span<const Jet> v) { return v[0] * v[0] * v[0]; }, q, 3);
    const Jet e = s.embedded(3, 2);
    CHECK(e.extract({0, 0, 2}) == doctest::Approx(9.0));
    CHECK(e.extract({1, 0, 1}) == 0.0);
}

TEST_CASE("jet errors")
{
    const double zero[] = {0.0};
    const double neg[] = {-1.0};
    CHECK_THROWS_AS(jet_eval([](std::span<const Jet> v) { return 1.0 / v[0]; }, zero, 2), DomainError);
    CHECK_THROWS_AS(jet_eval([](std::span<const Jet> v) { return sqrt(v[0]); }, neg, 2), DomainError);
    CHECK_THROWS_AS(jet_eval([](std::span<const Jet> v) { return v[0]; }, zero, kMaxJetOrder + 1),
                    OrderError);
    const Jet j = Jet::variable(1, 2, 0, 1.0);
    CHECK_THROWS_AS(j.extract({3}), IndexError);
}
