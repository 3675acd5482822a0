#include "finsler/metric.hpp"

#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace finsler {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

double unit_ball_volume(int n)
{
    return n == 2 ? kPi : 4.0 * kPi / 3.0;
}

void check_dim(int n)
{
    if (n < 2 || n > kMaxDim) {
        throw DomainError("dimension must be 2 or 3, got " + std::to_string(n));
    }
}

struct JetArgs {
    std::array<Jet, kMaxDim> x;
    std::array<Jet, kMaxDim> y;
    std::size_t n;
    std::span<const Jet> xs() const { return {x.data(), n}; }
    std::span<const Jet> ys() const { return {y.data(), n}; }
};

JetArgs seed(const Vec& x, const Vec& y, int order, JetVars vars)
{
    const int n = static_cast<int>(x.size());
    JetArgs a;
    a.n = static_cast<std::size_t>(n);
    const int nv = vars == JetVars::mixed ? 2 * n : n;
    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        switch (vars) {
        case JetVars::fiber:
            a.x[k] = Jet::constant(nv, order, x[i]);
            a.y[k] = Jet::variable(nv, order, i, y[i]);
            break;
        case JetVars::position:
            a.x[k] = Jet::variable(nv, order, i, x[i]);
            a.y[k] = Jet::constant(nv, order, y[i]);
            break;
        case JetVars::mixed:
            a.x[k] = Jet::variable(nv, order, i, x[i]);
            a.y[k] = Jet::variable(nv, order, n + i, y[i]);
            break;
        }
    }
    return a;
}

// (1/n) * integral over S^{n-1} of F(x,u)^{-n}: the Euclidean volume of the indicatrix ball.
double indicatrix_volume(const MetricSpec& m, const Vec& x, const SphereRule& rule)
{
    const int n = m.dim();
    double s = 0.0;
    for (std::size_t k = 0; k < rule.u.size(); ++k) {
        s += rule.w[k] * std::pow(m.F(x, rule.u[k]), -n);
    }
    return s / n;
}

SphereRule bh_rule(int n, int level)
{
    return n == 2 ? circle_rule(32 << level) : sphere_rule(8 << level, 16 << level);
}

// Finest rule needed for the indicatrix volume at x to settle to 1e-12 relative.
SphereRule converged_bh_rule(const MetricSpec& m, const Vec& x)
{
    SphereRule coarse = bh_rule(m.dim(), 0);
    double prev = indicatrix_volume(m, x, coarse);
    for (int level = 1; level <= 7; ++level) {
        SphereRule fine = bh_rule(m.dim(), level);
        const double cur = indicatrix_volume(m, x, fine);
        if (std::abs(cur - prev) <= 1e-12 * std::abs(cur)) {
            return fine;
        }
        prev = cur;
    }
    throw QuadratureError("indicatrix volume did not converge at x = (" + std::to_string(x[0]) +
                          ", ...)");
}

} // namespace

Jet busemann_hausdorff_quadrature_jet(const MetricSpec& m, const Vec& x, int order);

namespace {

// ln of the Busemann-Hausdorff density for the catalog families. Conformal metrics give
// the conformal factor to the n-th power, Randers gives (1 - |b|_a^2)^{(n+1)/2} sqrt(det a),
// the Funk indicatrix is a translate of the unit ball, and the Minkowski norm does not
// depend on x.
Jet bh_log_density_closed(const MetricSpec& m, const Vec& x, int order)
{
    const int n = m.dim();
    std::vector<Jet> xs;
    Jet r2 = Jet::constant(n, order, 0.0);
    for (int i = 0; i < n; ++i) {
        xs.push_back(Jet::variable(n, order, i, x[i]));
        r2 += xs.back() * xs.back();
    }
    switch (m.family()) {
    case Family::euclidean:
    case Family::funk:
        return Jet::constant(n, order, 0.0);
    case Family::poincare:
        return static_cast<double>(n) * (std::log(2.0 / std::sqrt(-m.curvature())) - log(1.0 - r2));
    case Family::sphere:
        return static_cast<double>(n) * (std::log(2.0 / std::sqrt(m.curvature())) - log(1.0 + r2));
    case Family::minkowski_quartic: {
        static std::mutex mu;
        static std::map<std::pair<int, double>, double> cache;
        const std::pair<int, double> key{n, m.epsilon()};
        double c = 0.0;
        {
            std::lock_guard<std::mutex> lock(mu);
            const auto it = cache.find(key);
            if (it != cache.end()) {
                c = it->second;
            } else {
                c = busemann_hausdorff_quadrature_jet(m, Vec::Zero(n), 0).value();
                cache.emplace(key, c);
            }
        }
        return Jet::constant(n, order, c);
    }
    case Family::randers: {
        const Mat& a = m.randers_a();
        const Mat ainv = a.inverse();
        std::vector<Jet> b;
        for (int i = 0; i < n; ++i) {
            Jet bi = Jet::constant(n, order, m.randers_b0()[i]);
            if (m.randers_B().size() > 0) {
                for (int j = 0; j < n; ++j) {
                    bi += m.randers_B()(i, j) * xs[static_cast<std::size_t>(j)];
                }
            }
            b.push_back(bi);
        }
        Jet q = Jet::constant(n, order, 0.0);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                q += ainv(i, j) * b[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
            }
        }
        return 0.5 * (n + 1) * log(1.0 - q) + 0.5 * std::log(a.determinant());
    }
    }
    return Jet::constant(n, order, 0.0);
}

} // namespace

std::string family_name(Family f)
{
    switch (f) {
    case Family::euclidean: return "euclidean";
    case Family::poincare: return "poincare";
    case Family::sphere: return "sphere";
    case Family::minkowski_quartic: return "minkowski_quartic";
    case Family::randers: return "randers";
    case Family::funk: return "funk";
    }
    return "unknown";
}

MetricSpec MetricSpec::euclidean(int n)
{
    check_dim(n);
    MetricSpec m;
    m.family_ = Family::euclidean;
    m.n_ = n;
    m.ref_.flag_curvature = 0.0;
    m.ref_.reversibility = 1.0;
    return m;
}

MetricSpec MetricSpec::poincare(int n, double K)
{
    check_dim(n);
    if (!(K < 0.0)) {
        throw DomainError("poincare curvature must be negative");
    }
    MetricSpec m;
    m.family_ = Family::poincare;
    m.n_ = n;
    m.K_ = K;
    m.chart_radius_ = 1.0;
    m.cap_ = 2.0 / std::sqrt(-K) * std::atanh(0.9);
    m.ref_.flag_curvature = K;
    m.ref_.reversibility = 1.0;
    return m;
}

MetricSpec MetricSpec::sphere(int n, double K)
{
    check_dim(n);
    if (!(K > 0.0)) {
        throw DomainError("sphere curvature must be positive");
    }
    MetricSpec m;
    m.family_ = Family::sphere;
    m.n_ = n;
    m.K_ = K;
    m.cap_ = 2.0 / std::sqrt(K);
    m.ref_.flag_curvature = K;
    m.ref_.reversibility = 1.0;
    return m;
}

MetricSpec MetricSpec::minkowski_quartic(int n, double eps)
{
    check_dim(n);
    if (!(eps >= 0.0 && eps < 0.5)) {
        throw DomainError("minkowski_quartic needs 0 <= eps < 0.5 for strong convexity");
    }
    MetricSpec m;
    m.family_ = Family::minkowski_quartic;
    m.n_ = n;
    m.eps_ = eps;
    m.ref_.flag_curvature = 0.0;
    m.ref_.reversibility = 1.0;
    return m;
}

MetricSpec MetricSpec::randers(const Mat& a, const Vec& b0, const Mat& B, double chart_radius)
{
    const int n = static_cast<int>(a.rows());
    check_dim(n);
    if (a.cols() != n || b0.size() != n || (B.size() > 0 && (B.rows() != n || B.cols() != n))) {
        throw DomainError("randers parameter shapes do not match the dimension");
    }
    if ((a - a.transpose()).norm() > 1e-14 * a.norm()) {
        throw DomainError("randers base matrix must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(a);
    const double lmin = eig.eigenvalues().minCoeff();
    if (!(lmin > 0.0)) {
        throw DomainError("randers base matrix must be positive definite");
    }
    const Mat ainv = a.inverse();
    const double b0norm = std::sqrt(b0.dot(ainv * b0));
    double bmax = b0norm;
    const bool varying = B.size() > 0 && B.norm() > 0.0;
    if (varying) {
        if (!std::isfinite(chart_radius)) {
            throw DomainError("randers with a varying one-form needs a finite chart radius");
        }
        // |b(x)|_alpha <= |b0|_alpha + ||a^{-1/2} B|| |x|
        const Mat half = eig.operatorInverseSqrt();
        const double bn = (half * B).operatorNorm();
        bmax = b0norm + bn * chart_radius;
    }
    if (!(bmax < 1.0)) {
        throw DomainError("randers one-form must have alpha-norm below 1 on the chart");
    }
    MetricSpec m;
    m.family_ = Family::randers;
    m.n_ = n;
    m.a_ = a;
    m.b0_ = b0;
    if (varying) {
        m.B_ = B;
        m.chart_radius_ = chart_radius;
        m.cap_ = 0.5 * chart_radius * (1.0 - bmax) * std::sqrt(lmin);
    } else {
        m.ref_.flag_curvature = 0.0;
        m.ref_.reversibility = (1.0 + b0norm) / (1.0 - b0norm);
    }
    return m;
}

MetricSpec MetricSpec::funk(int n)
{
    check_dim(n);
    MetricSpec m;
    m.family_ = Family::funk;
    m.n_ = n;
    m.chart_radius_ = 1.0;
    m.cap_ = std::log(10.0);
    m.ref_.flag_curvature = -0.25;
    m.ref_.s_coefficient = 0.5 * (n + 1);
    return m;
}

bool MetricSpec::is_riemannian() const
{
    return family_ == Family::euclidean || family_ == Family::poincare || family_ == Family::sphere ||
           (family_ == Family::minkowski_quartic && eps_ == 0.0);
}

std::string MetricSpec::name() const
{
    return (reversed_ ? "reverse_" : "") + family_name(family_);
}

MetricSpec MetricSpec::with_injectivity_cap(double cap) const
{
    if (!(cap > 0.0)) {
        throw DomainError("injectivity cap must be positive");
    }
    MetricSpec m = *this;
    m.cap_ = cap;
    return m;
}

MetricSpec MetricSpec::reverse() const
{
    MetricSpec m = *this;
    m.reversed_ = !reversed_;
    if (m.ref_.s_coefficient) {
        m.ref_.s_coefficient = -*m.ref_.s_coefficient;
    }
    return m;
}

MetricSpec reverse_metric(const MetricSpec& m)
{
    return m.reverse();
}

bool MetricSpec::in_chart(std::span<const double> x) const
{
    if (static_cast<int>(x.size()) != n_) {
        return false;
    }
    double r2 = 0.0;
    for (double v : x) {
        if (!std::isfinite(v)) {
            return false;
        }
        r2 += v * v;
    }
    return r2 < chart_radius_ * chart_radius_;
}

void MetricSpec::require_chart(std::span<const double> x) const
{
    if (!in_chart(x)) {
        std::ostringstream os;
        os << "point outside the " << name() << " chart";
        throw DomainError(os.str());
    }
}

MeasureSpec MeasureSpec::poly_log_density(std::vector<PolyTerm> terms)
{
    return MeasureSpec(MeasureKind::poly_log_density, std::move(terms));
}

MeasureSpec MeasureSpec::gaussian(int n)
{
    std::vector<PolyTerm> t;
    for (int i = 0; i < n; ++i) {
        std::vector<int> e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(i)] = 2;
        t.push_back({e, 0.5});
    }
    return poly_log_density(std::move(t));
}

std::string MeasureSpec::tag() const
{
    switch (kind_) {
    case MeasureKind::lebesgue: return "lebesgue";
    case MeasureKind::busemann_hausdorff: return "busemann_hausdorff";
    case MeasureKind::poly_log_density: return "poly_log_density";
    }
    return "unknown";
}

Jet eval_F(const MetricSpec& m, const Vec& x, const Vec& y, int order, JetVars vars, bool squared)
{
    if (x.size() != m.dim() || y.size() != m.dim()) {
        throw DomainError("point or vector has the wrong dimension");
    }
    m.require_chart(as_span(x));
    if (y.squaredNorm() == 0.0) {
        throw DomainError("F is not differentiable at y = 0");
    }
    const JetArgs a = seed(x, y, order, vars);
    return squared ? m.F2<Jet>(a.xs(), a.ys()) : m.F<Jet>(a.xs(), a.ys());
}

double measure_density(const MeasureSpec& mu, const MetricSpec& m, const Vec& x)
{
    m.require_chart(as_span(x));
    switch (mu.kind()) {
    case MeasureKind::lebesgue:
        return 1.0;
    case MeasureKind::poly_log_density:
        return std::exp(log_density_jet(mu, m, x, 0).value());
    case MeasureKind::busemann_hausdorff:
        return std::exp(log_density_jet(mu, m, x, 0).value());
    }
    return 1.0;
}

Jet log_density_jet(const MeasureSpec& mu, const MetricSpec& m, const Vec& x, int order)
{
    const int n = m.dim();
    m.require_chart(as_span(x));
    switch (mu.kind()) {
    case MeasureKind::lebesgue:
        return Jet::constant(n, order, 0.0);
    case MeasureKind::poly_log_density: {
        Jet P = Jet::constant(n, order, 0.0);
        for (const PolyTerm& t : mu.terms()) {
            Jet term = Jet::constant(n, order, t.coef);
            for (int i = 0; i < n; ++i) {
                const int e = t.exponents[static_cast<std::size_t>(i)];
                if (e > 0) {
                    term *= pow(Jet::variable(n, order, i, x[i]), static_cast<double>(e));
                }
            }
            P += term;
        }
        return -P;
    }
    case MeasureKind::busemann_hausdorff:
        return bh_log_density_closed(m, x, order);
    }
    return Jet::constant(n, order, 0.0);
}

Jet busemann_hausdorff_quadrature_jet(const MetricSpec& m, const Vec& x, int order)
{
    const int n = m.dim();
    m.require_chart(as_span(x));
    const SphereRule rule = converged_bh_rule(m, x);
    std::array<Jet, kMaxDim> xs;
    std::array<Jet, kMaxDim> us;
    for (int i = 0; i < n; ++i) {
        xs[static_cast<std::size_t>(i)] = Jet::variable(n, order, i, x[i]);
    }
    const auto nn = static_cast<std::size_t>(n);
    Jet vol = Jet::constant(n, order, 0.0);
    for (std::size_t k = 0; k < rule.u.size(); ++k) {
        for (int i = 0; i < n; ++i) {
            us[static_cast<std::size_t>(i)] = Jet::constant(n, order, rule.u[k][i]);
        }
        const Jet f = m.F<Jet>({xs.data(), nn}, {us.data(), nn});
        vol += rule.w[k] * pow(f, -static_cast<double>(n));
    }
    return std::log(unit_ball_volume(n) * n) - log(vol);
}

Vec legendre_forward(const MetricSpec& m, const Vec& x, const Vec& y)
{
    const int n = m.dim();
    if (y.squaredNorm() == 0.0) {
        return Vec::Zero(n);
    }
    const Jet j = eval_F(m, x, y, 1, JetVars::fiber, true);
    Vec xi(n);
    for (int i = 0; i < n; ++i) {
        xi[i] = 0.5 * j.coeff(1 + i);
    }
    return xi;
}

Vec legendre_inverse(const MetricSpec& m, const Vec& x, const Vec& xi)
{
    const int n = m.dim();
    if (xi.squaredNorm() == 0.0) {
        return Vec::Zero(n);
    }
    const double target = 1e-12 * std::max(1.0, xi.norm());
    auto residual_and_jacobian = [&](const Vec& y, Vec& r, Mat* g) {
        const Jet j = eval_F(m, x, y, g ? 2 : 1, JetVars::fiber, true);
        const JetLayout& l = j.layout();
        r.resize(n);
        for (int i = 0; i < n; ++i) {
            r[i] = 0.5 * j.coeff(1 + i) - xi[i];
        }
        if (g) {
            g->resize(n, n);
            for (int i = 0; i < n; ++i) {
                for (int k = 0; k < n; ++k) {
                    MultiIndex idx = MultiIndex::unit(n, i).plus(k);
                    (*g)(i, k) = 0.5 * j.coeff(l.position(idx));
                }
            }
        }
    };
    Vec y = xi;
    Vec r;
    Mat g;
    residual_and_jacobian(y, r, &g);
    double rn = r.norm();
    for (int it = 0; it < 100 && rn > target; ++it) {
        const Vec step = -g.ldlt().solve(r);
        double alpha = 1.0;
        bool accepted = false;
        for (int back = 0; back < 40; ++back) {
            const Vec trial = y + alpha * step;
            if (trial.squaredNorm() > 0.0) {
                Vec rt;
                residual_and_jacobian(trial, rt, nullptr);
                if (rt.norm() < rn) {
                    y = trial;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            break;
        }
        residual_and_jacobian(y, r, &g);
        rn = r.norm();
    }
    if (!(rn <= target)) {
        std::ostringstream os;
        os << "inverse Legendre map stalled with residual " << rn;
        throw ConvergenceError(os.str());
    }
    return y;
}

namespace {

DirectionFn dual_objective(const MetricSpec& m, const Vec& x, const Vec& xi)
{
    return [&m, x, xi](const Vec& u) { return xi.dot(u) / m.F(x, u); };
}

} // namespace

double dual_norm(const MetricSpec& m, const Vec& x, const Vec& xi)
{
    m.require_chart(as_span(x));
    if (xi.squaredNorm() == 0.0) {
        return 0.0;
    }
    const SphereOptimum opt = maximize_on_sphere(m.dim(), dual_objective(m, x, xi),
                                                 default_search_grid(m.dim()));
    if (!opt.converged) {
        throw ConvergenceError("dual norm ascent did not settle");
    }
    return opt.value;
}

double dual_norm_near(const MetricSpec& m, const Vec& x, const Vec& xi, const Vec& start)
{
    if (xi.squaredNorm() == 0.0) {
        return 0.0;
    }
    constexpr double reach = 0.35;
    const SphereOptimum opt = refine_on_sphere(dual_objective(m, x, xi), start, reach);
    const double moved = std::acos(std::clamp(opt.u.dot(start.normalized()), -1.0, 1.0));
    if (!opt.converged || moved > 0.95 * reach) {
        return dual_norm(m, x, xi);
    }
    return opt.value;
}

std::vector<Vec> default_sample_points(const MetricSpec& m)
{
    const int n = m.dim();
    std::vector<Vec> pts;
    pts.push_back(Vec::Zero(n));
    for (int axis = 0; axis < 2; ++axis) {
        for (double s : {0.2, -0.2}) {
            Vec p = Vec::Zero(n);
            p[axis] = s;
            pts.push_back(p);
        }
    }
    return pts;
}

double reversibility_constant(const MetricSpec& m, std::span<const Vec> points)
{
    double lam = 1.0;
    for (const Vec& x : points) {
        m.require_chart(as_span(x));
        const SphereOptimum opt = maximize_on_sphere(
            m.dim(), [&](const Vec& u) { return m.F(x, Vec(-u)) / m.F(x, u); },
            default_search_grid(m.dim()));
        lam = std::max(lam, opt.value);
    }
    return lam;
}

namespace {

Mat fiber_hessian(const MetricSpec& m, const Vec& x, const Vec& v)
{
    const int n = m.dim();
    const Jet j = eval_F(m, x, v, 2, JetVars::fiber, true);
    Mat g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            g(i, k) = 0.5 * j.coeff(j.layout().position(MultiIndex::unit(n, i).plus(k)));
        }
    }
    return g;
}

// Sup and inf of g_V(W,W)/F^2(W) at one point: grid pass, then alternating refinement.
Uniformity uniformity_at(const MetricSpec& m, const Vec& x)
{
    const int n = m.dim();
    const int grid = default_search_grid(n);
    const SphereRule rule = n == 2 ? circle_rule(grid) : sphere_rule(grid / 2, grid);
    const std::size_t nw = rule.u.size();
    // Rows: products w_i w_j / F^2(w) for i <= j.
    std::vector<std::array<double, 6>> wq(nw);
    for (std::size_t k = 0; k < nw; ++k) {
        const Vec& w = rule.u[k];
        const double f2 = m.F2(x, w);
        int c = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                wq[k][static_cast<std::size_t>(c++)] = (i == j ? 1.0 : 2.0) * w[i] * w[j] / f2;
            }
        }
    }
    const int nc = n * (n + 1) / 2;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    std::size_t hiV = 0, hiW = 0, loV = 0, loW = 0;
    for (std::size_t v = 0; v < nw; ++v) {
        const Mat g = fiber_hessian(m, x, rule.u[v]);
        std::array<double, 6> gc{};
        int c = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                gc[static_cast<std::size_t>(c++)] = g(i, j);
            }
        }
        for (std::size_t k = 0; k < nw; ++k) {
            double q = 0.0;
            for (int t = 0; t < nc; ++t) {
                q += gc[static_cast<std::size_t>(t)] * wq[k][static_cast<std::size_t>(t)];
            }
            if (q > hi) {
                hi = q;
                hiV = v;
                hiW = k;
            }
            if (q < lo) {
                lo = q;
                loV = v;
                loW = k;
            }
        }
    }
    const double reach = n == 2 ? 2.0 * boost::math::constants::pi<double>() / grid : 0.15;
    auto refine = [&](double sign, Vec V, Vec W, double best) {
        for (int round = 0; round < 3; ++round) {
            const Mat g = fiber_hessian(m, x, V);
            const SphereOptimum w = refine_on_sphere(
                [&](const Vec& u) { return sign * u.dot(g * u) / m.F2(x, u); }, W, reach);
            W = w.u;
            const SphereOptimum v = refine_on_sphere(
                [&](const Vec& u) { return sign * W.dot(fiber_hessian(m, x, u) * W) / m.F2(x, W); },
                V, reach);
            V = v.u;
            best = std::max(best, std::max(w.value, v.value));
        }
        return sign * best;
    };
    return {refine(1.0, rule.u[hiV], rule.u[hiW], hi), refine(-1.0, rule.u[loV], rule.u[loW], -lo)};
}

} // namespace

Uniformity uniformity_constants(const MetricSpec& m, std::span<const Vec> points)
{
    Uniformity u{1.0, 1.0};
    for (const Vec& x : points) {
        m.require_chart(as_span(x));
        const Uniformity here = uniformity_at(m, x);
        u.kappa = std::max(u.kappa, here.kappa);
        u.kappa_star = std::min(u.kappa_star, here.kappa_star);
    }
    return u;
}

} // namespace finsler
