#pragma once

#include "finsler/jets.hpp"
#include "finsler/types.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace finsler {

enum class Family { euclidean, poincare, sphere, minkowski_quartic, randers, funk };

std::string family_name(Family f);

struct ReferenceConstants {
    std::optional<double> flag_curvature;
    std::optional<double> reversibility;
    // S = c * F for the catalog measure, when known.
    std::optional<double> s_coefficient;
};

class MetricSpec {
public:
    static MetricSpec euclidean(int n);
    // Poincare ball of curvature K < 0 in the unit-ball chart.
    static MetricSpec poincare(int n, double K = -1.0);
    // Round sphere of curvature K > 0 in the stereographic chart.
    static MetricSpec sphere(int n, double K = 1.0);
    static MetricSpec minkowski_quartic(int n, double eps = 0.1);
    // F = sqrt(y^T a y) + (b0 + B x) . y, restricted to |x| < chart_radius.
    static MetricSpec randers(const Mat& a, const Vec& b0, const Mat& B = Mat(),
                              double chart_radius = std::numeric_limits<double>::infinity());
    static MetricSpec funk(int n);

    Family family() const { return family_; }
    int dim() const { return n_; }
    double curvature() const { return K_; }
    double epsilon() const { return eps_; }
    const Mat& randers_a() const { return a_; }
    const Vec& randers_b0() const { return b0_; }
    const Mat& randers_B() const { return B_; }
    double chart_radius() const { return chart_radius_; }
    double injectivity_cap() const { return cap_; }
    bool reversed() const { return reversed_; }
    bool is_riemannian() const;
    const ReferenceConstants& reference() const { return ref_; }
    std::string name() const;

    MetricSpec with_injectivity_cap(double cap) const;
    MetricSpec reverse() const;

    bool in_chart(std::span<const double> x) const;
    // Throws DomainError when x is outside the chart.
    void require_chart(std::span<const double> x) const;

    template <class T>
    T F(std::span<const T> x, std::span<const T> y) const;
    template <class T>
    T F2(std::span<const T> x, std::span<const T> y) const;

    double F(const Vec& x, const Vec& y) const { return F<double>(as_span(x), as_span(y)); }
    double F2(const Vec& x, const Vec& y) const { return F2<double>(as_span(x), as_span(y)); }

private:
    template <class T>
    T forward_F(std::span<const T> x, std::span<const T> y) const;
    template <class T>
    T forward_F2(std::span<const T> x, std::span<const T> y) const;
    template <class T, class Fn>
    T with_orientation(std::span<const T> y, Fn&& fn) const;

    Family family_ = Family::euclidean;
    int n_ = 2;
    double K_ = 0.0;
    double eps_ = 0.0;
    Mat a_;
    Vec b0_;
    Mat B_;
    double chart_radius_ = std::numeric_limits<double>::infinity();
    double cap_ = std::numeric_limits<double>::infinity();
    bool reversed_ = false;
    ReferenceConstants ref_;
};

MetricSpec reverse_metric(const MetricSpec& m);

enum class MeasureKind { lebesgue, busemann_hausdorff, poly_log_density };

struct PolyTerm {
    std::vector<int> exponents;
    double coef = 0.0;
    friend bool operator==(const PolyTerm&, const PolyTerm&) = default;
};

class MeasureSpec {
public:
    static MeasureSpec lebesgue() { return MeasureSpec(MeasureKind::lebesgue, {}); }
    static MeasureSpec busemann_hausdorff() { return MeasureSpec(MeasureKind::busemann_hausdorff, {}); }
    // Density exp(-P(x)) with P = sum coef * x^exponents.
    static MeasureSpec poly_log_density(std::vector<PolyTerm> terms);
    // P = |x|^2 / 2.
    static MeasureSpec gaussian(int n);

    MeasureKind kind() const { return kind_; }
    const std::vector<PolyTerm>& terms() const { return terms_; }
    std::string tag() const;

private:
    MeasureSpec(MeasureKind k, std::vector<PolyTerm> t) : kind_(k), terms_(std::move(t)) {}
    MeasureKind kind_;
    std::vector<PolyTerm> terms_;
};

// Jet variable sets for eval_F.
enum class JetVars { fiber, position, mixed };

// Jet of F (or F^2) at (x, y). Mixed jets order the variables x first, then y.
Jet eval_F(const MetricSpec& m, const Vec& x, const Vec& y, int order, JetVars vars,
           bool squared = false);

double measure_density(const MeasureSpec& mu, const MetricSpec& m, const Vec& x);
// Jet of ln sigma_m in the n position variables.
Jet log_density_jet(const MeasureSpec& mu, const MetricSpec& m, const Vec& x, int order);
// Busemann-Hausdorff ln density by adaptive quadrature of F^{-n} over the unit sphere; the
// catalog families use closed forms in log_density_jet and this is the general route.
Jet busemann_hausdorff_quadrature_jet(const MetricSpec& m, const Vec& x, int order);

// xi_i = g_ij(x,y) y^j, and its inverse by damped Newton iteration.
Vec legendre_forward(const MetricSpec& m, const Vec& x, const Vec& y);
Vec legendre_inverse(const MetricSpec& m, const Vec& x, const Vec& xi);

// F*(x, xi) by a direction-grid maximum refined by local ascent.
double dual_norm(const MetricSpec& m, const Vec& x, const Vec& xi);
// Local ascent only, started from a direction near the maximizer.
double dual_norm_near(const MetricSpec& m, const Vec& x, const Vec& xi, const Vec& start);

// Chart center plus four points at distance 0.2 along the first two axes.
std::vector<Vec> default_sample_points(const MetricSpec& m);

double reversibility_constant(const MetricSpec& m, std::span<const Vec> points);

struct Uniformity {
    double kappa;
    double kappa_star;
};
Uniformity uniformity_constants(const MetricSpec& m, std::span<const Vec> points);

// ---- formulas ----

namespace detail {

template <class T>
T dot(std::span<const T> a, std::span<const T> b)
{
    T s = a[0] * b[0];
    for (std::size_t i = 1; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

} // namespace detail

template <class T, class Fn>
T MetricSpec::with_orientation(std::span<const T> y, Fn&& fn) const
{
    if (!reversed_) {
        return fn(y);
    }
    std::array<T, kMaxDim> ny;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ny[i] = -y[i];
    }
    return fn(std::span<const T>(ny.data(), y.size()));
}

template <class T>
T MetricSpec::F(std::span<const T> x, std::span<const T> y) const
{
    return with_orientation<T>(y, [&](std::span<const T> yy) { return forward_F<T>(x, yy); });
}

template <class T>
T MetricSpec::F2(std::span<const T> x, std::span<const T> y) const
{
    return with_orientation<T>(y, [&](std::span<const T> yy) { return forward_F2<T>(x, yy); });
}

template <class T>
T MetricSpec::forward_F(std::span<const T> x, std::span<const T> y) const
{
    using std::sqrt;
    switch (family_) {
    case Family::randers: {
        T q = y[0] * y[0] * a_(0, 0);
        for (int i = 0; i < n_; ++i) {
            for (int j = 0; j < n_; ++j) {
                if (i != 0 || j != 0) {
                    q += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)] * a_(i, j);
                }
            }
        }
        T beta = y[0] * 0.0;
        for (int i = 0; i < n_; ++i) {
            T bi = x[0] * 0.0 + b0_[i];
            if (B_.size() > 0) {
                for (int j = 0; j < n_; ++j) {
                    bi += x[static_cast<std::size_t>(j)] * B_(i, j);
                }
            }
            beta += bi * y[static_cast<std::size_t>(i)];
        }
        return sqrt(q) + beta;
    }
    case Family::funk: {
        const T s = 1.0 - detail::dot(x, x);
        const T xy = detail::dot(x, y);
        return (sqrt(s * detail::dot(y, y) + xy * xy) + xy) / s;
    }
    default:
        return sqrt(forward_F2<T>(x, y));
    }
}

template <class T>
T MetricSpec::forward_F2(std::span<const T> x, std::span<const T> y) const
{
    switch (family_) {
    case Family::euclidean:
        return detail::dot(y, y);
    case Family::poincare: {
        const T s = 1.0 - detail::dot(x, x);
        return (4.0 / -K_) * detail::dot(y, y) / (s * s);
    }
    case Family::sphere: {
        const T s = 1.0 + detail::dot(x, x);
        return (4.0 / K_) * detail::dot(y, y) / (s * s);
    }
    case Family::minkowski_quartic: {
        const T q = detail::dot(y, y);
        T quart = y[0] * y[0] * y[0] * y[0];
        for (std::size_t i = 1; i < y.size(); ++i) {
            quart += y[i] * y[i] * y[i] * y[i];
        }
        return q + eps_ * quart / q;
    }
    default: {
        const T f = forward_F<T>(x, y);
        return f * f;
    }
    }
}

} // namespace finsler
