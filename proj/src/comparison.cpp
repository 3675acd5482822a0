#include "finsler/comparison.hpp"

#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace finsler {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kQuadTol = 1e-10;

template <class Fn>
double adaptive(Fn&& fn, double a, double b)
{
    if (b <= a) {
        return 0.0;
    }
    return gauss_kronrod<double, 31>::integrate(fn, a, b, 20, kQuadTol);
}

std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

void require_p(int n, double p)
{
    if (!(p > 0.5 * n)) {
        throw DomainError("p must exceed n/2, got " + fmt(p));
    }
}

void require_radius(const PolarField& f, const ModelFunctions& model, double R)
{
    if (R > f.r_max() * (1.0 + 1e-12)) {
        throw DomainError("radius " + fmt(R) + " exceeds the polar field range " + fmt(f.r_max()));
    }
    if (R > model.radius_cap() * (1.0 + 1e-12)) {
        throw DomainError("radius " + fmt(R) + " exceeds pi/(2 sqrt K)");
    }
}

// S(grad r) >= -theta on all nodes with r <= R; marks the report when it fails.
bool check_s_bound(const PolarField& f, double theta, double R, ComparisonReport& rep)
{
    double worst = std::numeric_limits<double>::infinity();
    double at_r = 0.0;
    int at_d = 0;
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        for (int k = 0; k <= f.N && f.r(k) <= R * (1.0 + 1e-12); ++k) {
            const double mg = f.s_along[d][static_cast<std::size_t>(k)] + theta;
            if (mg < worst) {
                worst = mg;
                at_r = f.r(k);
                at_d = static_cast<int>(d);
            }
        }
    }
    rep.set("s_bound_margin", worst);
    if (worst < -1e-9) {
        rep.hypothesis_ok = false;
        rep.status = Status::hypothesis_unmet;
        rep.note = "S(grad r) >= -theta fails at r = " + fmt(at_r) + ", direction " + std::to_string(at_d);
        return false;
    }
    return true;
}

double ric_excess_at(const PolarField& f, std::size_t d, int k, double K)
{
    return std::max((f.dim() - 1) * K - f.ric_lower[d][static_cast<std::size_t>(k)], 0.0);
}

void require_ricci(const PolarField& f)
{
    if (!f.has_ricci()) {
        throw DomainError("polar field was sampled without the Ricci lower bound");
    }
}

double laplacian_factor(int n, double p)
{
    return (n - 1) * (2 * p - 1) / (2 * p - n);
}

} // namespace

ModelFunctions::ModelFunctions(int n, double K, double theta)
    : n_(n), K_(K), theta_(theta), area_(unit_sphere_area(n))
{
    if (theta < 0.0) {
        throw DomainError("theta must be nonnegative");
    }
}

ModelFunctions model_functions(int n, double K, double theta)
{
    return ModelFunctions(n, K, theta);
}

double unit_sphere_area(int n)
{
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ModelFunctions::s(double t) const
{
    if (K_ > 0.0) {
        const double k = std::sqrt(K_);
        return std::sin(k * t) / k;
    }
    if (K_ < 0.0) {
        const double k = std::sqrt(-K_);
        return std::sinh(k * t) / k;
    }
    return t;
}

double ModelFunctions::ds(double t) const
{
    if (K_ > 0.0) {
        return std::cos(std::sqrt(K_) * t);
    }
    if (K_ < 0.0) {
        return std::cosh(std::sqrt(-K_) * t);
    }
    return 1.0;
}

double ModelFunctions::H(double t) const
{
    const double sv = s(t);
    if (std::abs(sv) <= 1e-300 || (K_ > 0.0 && std::abs(sv) < 1e-14 * std::abs(t))) {
        throw PoleError("H_K has a pole at t = " + fmt(t));
    }
    return (n_ - 1) * ds(t) / sv;
}

double ModelFunctions::v(double t) const
{
    return v(0.0, t);
}

double ModelFunctions::v(double r, double R) const
{
    // The integrand is entire, so 20-point Gauss-Legendre panels of length <= 1/4 are
    // exact to rounding; adaptive schemes stall on very short intervals near the pole.
    if (R <= r) {
        return 0.0;
    }
    const Rule& rule = gauss_legendre(20);
    const int panels = std::max(1, static_cast<int>(std::ceil(4.0 * (R - r))));
    const double half = 0.5 * (R - r) / panels;
    double acc = 0.0;
    for (int j = 0; j < panels; ++j) {
        const double mid = r + (2 * j + 1) * half;
        for (std::size_t i = 0; i < rule.x.size(); ++i) {
            const double t = mid + half * rule.x[i];
            acc += rule.w[i] * std::exp(theta_ * t) * std::pow(s(t), n_ - 1);
        }
    }
    return area_ * half * acc;
}

double ModelFunctions::radius_cap() const
{
    return K_ > 0.0 ? 0.5 * kPi / std::sqrt(K_) : std::numeric_limits<double>::infinity();
}

IntegralNorms integral_norms(const PolarField& f, double p, double R, double theta, double K)
{
    require_ricci(f);
    require_p(f.dim(), p);
    if (R <= 0.0 || R > f.r_max() * (1.0 + 1e-12)) {
        throw DomainError("radius " + fmt(R) + " outside the polar field");
    }
    IntegralNorms out{p, R, theta, K, ball_volume(f, R), 0.0, 0.0};
    std::vector<double> a(static_cast<std::size_t>(f.N + 1));
    std::vector<double> b(a.size());
    double ia = 0.0;
    double ib = 0.0;
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        for (int k = 0; k <= f.N; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double weight = std::exp(-theta * f.r(k)) * f.sigma[d][kk];
            a[kk] = std::pow(ric_excess_at(f, d, k, K), p) * weight;
            b[kk] = std::pow(ric_excess_at(f, d, k, 0.0), p) * weight;
        }
        ia += f.grid.w[d] * integral_to(a, f.h, R);
        ib += f.grid.w[d] * integral_to(b, f.h, R);
    }
    // Quadrature noise on an identically zero integrand must not produce a NaN root.
    out.norm_bar = std::pow(std::max(ia, 0.0) / out.ball_volume, 1.0 / p);
    out.kbar = R * R * std::pow(std::max(ib, 0.0) / out.ball_volume, 1.0 / p);
    return out;
}

std::string status_name(Status s)
{
    switch (s) {
    case Status::pass:
        return "pass";
    case Status::fail:
        return "fail";
    case Status::hypothesis_unmet:
        return "hypothesis_unmet";
    case Status::threshold_unmet:
        return "threshold_unmet";
    case Status::informational:
        return "informational";
    }
    return "unknown";
}

void ComparisonReport::add_row(double r, double lhs, double rhs, int theta_index, double slack_factor, bool kink)
{
    const double slack = slack_factor * (tol.abs + tol.rel * std::max(std::abs(lhs), std::abs(rhs)));
    rows.push_back({r, lhs, rhs, rhs - lhs, theta_index, slack, kink});
}

void ComparisonReport::set(const std::string& key, double value)
{
    for (auto& kv : values) {
        if (kv.first == key) {
            kv.second = value;
            return;
        }
    }
    values.emplace_back(key, value);
}

double ComparisonReport::value(const std::string& key) const
{
    for (const auto& kv : values) {
        if (kv.first == key) {
            return kv.second;
        }
    }
    throw IndexError("report " + theorem + " has no value " + key);
}

double ComparisonReport::worst_margin() const
{
    double w = std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
        w = std::min(w, row.margin);
    }
    return w;
}

bool ComparisonReport::rows_pass() const
{
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.margin >= -r.slack; });
}

void ComparisonReport::settle()
{
    if (status == Status::pass || status == Status::fail) {
        status = rows_pass() ? Status::pass : Status::fail;
    }
}

void write_csv(const ComparisonReport& rep, std::ostream& os)
{
    os << "r,lhs,rhs,margin,theta_index,kink\n";
    char buf[160];
    for (const auto& row : rep.rows) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e,%d,%d\n", row.r, row.lhs, row.rhs, row.margin,
                      row.theta_index, row.kink ? 1 : 0);
        os << buf;
    }
}

ComparisonReport riccati_check(const PolarField& f, const ModelFunctions& model, Tolerance tol)
{
    require_ricci(f);
    ComparisonReport rep;
    rep.theorem = "riccati";
    rep.tol = tol;
    const int n = f.dim();
    const double K = model.K();
    const double theta = model.theta();
    int last = f.N;
    while (last > 0 && f.r(last) > model.radius_cap() * (1.0 + 1e-12)) {
        --last;
    }
    if (last < 2) {
        throw DomainError("too few radial nodes below the radius cap");
    }
    check_s_bound(f, theta, f.r(last), rep);

    std::vector<double> psi(static_cast<std::size_t>(last + 1));
    std::vector<double> phi(psi.size());
    std::vector<double> H(psi.size());
    const double h = f.h;
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        // At the pole Delta r - H_K tends to -S.
        psi[0] = -f.s_along[d][0] - theta;
        for (int k = 1; k <= last; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            H[kk] = model.H(f.r(k));
            psi[kk] = f.delta_r[d][kk] - H[kk] - theta;
        }
        for (std::size_t k = 0; k < psi.size(); ++k) {
            phi[k] = std::max(psi[k], 0.0);
        }
        auto side = [&](int k) { return psi[static_cast<std::size_t>(k)] > 0.0; };
        auto same = [&](int a, int b) {
            for (int j = a + 1; j <= b; ++j) {
                if (side(j) != side(a)) {
                    return false;
                }
            }
            return true;
        };
        auto ph = [&](int k) { return phi[static_cast<std::size_t>(k)]; };
        auto forward = [&](int k) { return (-3 * ph(k) + 4 * ph(k + 1) - ph(k + 2)) / (2 * h); };
        auto backward = [&](int k) { return (3 * ph(k) - 4 * ph(k - 1) + ph(k - 2)) / (2 * h); };
        for (int k = 1; k <= last; ++k) {
            const bool kink = k < last && !same(k - 1, k + 1);
            double dphi = 0.0;
            if (k == last) {
                dphi = backward(k);
            } else if (!kink) {
                dphi = (ph(k + 1) - ph(k - 1)) / (2 * h);
            } else if (k + 2 <= last && same(k, k + 2)) {
                dphi = forward(k);
            } else if (k >= 2 && same(k - 2, k)) {
                dphi = backward(k);
            } else {
                dphi = (ph(k + 1) - ph(k - 1)) / (2 * h);
            }
            const auto kk = static_cast<std::size_t>(k);
            const double lhs = dphi + (ph(k) * ph(k) + 2 * ph(k) * H[kk]) / (n - 1);
            rep.add_row(f.r(k), lhs, ric_excess_at(f, d, k, K), static_cast<int>(d), kink ? 10.0 : 1.0, kink);
        }
    }
    rep.settle();
    return rep;
}

std::pair<ComparisonReport, ComparisonReport> check_laplacian_comparison(const PolarField& f, double p, double K,
                                                                         double theta, Tolerance tol)
{
    require_ricci(f);
    const int n = f.dim();
    require_p(n, p);
    const ModelFunctions model(n, K, theta);
    ComparisonReport integrated;
    integrated.theorem = "laplacian-integrated";
    integrated.tol = tol;
    ComparisonReport pointwise;
    pointwise.theorem = "laplacian-pointwise";
    pointwise.tol = tol;

    int last = f.N;
    while (last > 0 && f.r(last) > model.radius_cap() * (1.0 + 1e-12)) {
        --last;
    }
    const double R = f.r(last);
    const bool ok = check_s_bound(f, theta, R, integrated);
    check_s_bound(f, theta, R, pointwise);
    if (!ok) {
        return {integrated, pointwise};
    }
    const double c1 = std::pow(laplacian_factor(n, p), p);
    const double c2 = std::pow(2 * p - 1, p) * std::pow((n - 1) / (2 * p - n), p - 1);
    integrated.set("factor", c1);
    pointwise.set("factor", c2);

    std::vector<double> a(static_cast<std::size_t>(last + 1));
    std::vector<double> b(a.size());
    std::vector<double> phi(a.size());
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        phi[0] = 0.0;
        a[0] = 0.0;
        b[0] = 0.0;
        for (int k = 1; k <= last; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double weight = std::exp(-theta * f.r(k)) * f.sigma[d][kk];
            phi[kk] = std::max(f.delta_r[d][kk] - model.H(f.r(k)) - theta, 0.0);
            a[kk] = std::pow(phi[kk], 2 * p) * weight;
            b[kk] = std::pow(ric_excess_at(f, d, k, K), p) * weight;
        }
        const auto ia = cumulative_integral(a, f.h);
        const auto ib = cumulative_integral(b, f.h);
        for (int k = 1; k <= last; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double weight = std::exp(-theta * f.r(k)) * f.sigma[d][kk];
            integrated.add_row(f.r(k), ia[kk], c1 * ib[kk], static_cast<int>(d));
            pointwise.add_row(f.r(k), std::pow(phi[kk], 2 * p - 1) * weight, c2 * ib[kk], static_cast<int>(d));
        }
    }
    integrated.settle();
    pointwise.settle();
    return {integrated, pointwise};
}

namespace {

// integral_0^R t e^{(1+1/2p) theta t} s_K^{n-1}(t) v(t)^{-(2p+1)/2p} dt. The integrand
// behaves like t^{-n/2p} at 0; t = R u^q with q = 2p/(2p-n) makes it bounded.
double volume_kernel_integral(const ModelFunctions& model, double p, double R)
{
    const int n = model.n();
    const double q = 2 * p / (2 * p - n);
    const double a = (2 * p + 1) / (2 * p);
    const double growth = (1 + 1 / (2 * p)) * model.theta();
    auto g = [&](double u) {
        if (u <= 0.0) {
            // Limit of the substituted integrand: v ~ |S| t^n / n near the pole.
            return q * std::pow(R, 1.0 - 0.5 * n / p) * std::pow(model.sphere_area() / n, -a);
        }
        const double t = R * std::pow(u, q);
        const double dt = q * R * std::pow(u, q - 1);
        return t * std::exp(growth * t) * std::pow(model.s(t), n - 1) * std::pow(model.v(t), -a) * dt;
    };
    return adaptive(g, 0.0, 1.0);
}

double volume_prefactor(int n, double p, double area, double mBR)
{
    return std::sqrt(laplacian_factor(n, p)) / (2 * p) * std::pow(mBR, 1 / (2 * p)) * area;
}

} // namespace

double constant_C_volume(int n, double p, double theta, double K, double R, double mBR)
{
    require_p(n, p);
    const ModelFunctions model(n, K, theta);
    if (R > model.radius_cap() * (1.0 + 1e-12)) {
        throw PoleError("radius exceeds pi/(2 sqrt K)");
    }
    return volume_prefactor(n, p, model.sphere_area(), mBR) * volume_kernel_integral(model, p, R);
}

std::pair<ComparisonReport, ComparisonReport> check_volume_comparison(const PolarField& f, double p, double K,
                                                                      double theta, double r, double R,
                                                                      Tolerance tol)
{
    require_ricci(f);
    const int n = f.dim();
    require_p(n, p);
    const ModelFunctions model(n, K, theta);
    require_radius(f, model, R);
    if (!(r > 0.0 && r <= R)) {
        throw DomainError("radii must satisfy 0 < r <= R");
    }
    ComparisonReport vol;
    vol.theorem = "volume-comparison";
    vol.tol = tol;
    ComparisonReport mono;
    mono.theorem = "bishop-gromov";
    mono.tol = tol;
    const bool ok = check_s_bound(f, theta, R, vol);
    check_s_bound(f, theta, R, mono);
    if (!ok) {
        return {vol, mono};
    }

    const IntegralNorms norms = integral_norms(f, p, R, theta, K);
    const double C = constant_C_volume(n, p, theta, K, R, norms.ball_volume);
    const double rhs = C * std::sqrt(norms.norm_bar);
    vol.set("norm_bar", norms.norm_bar);
    vol.set("C", C);
    vol.set("ball_volume", norms.ball_volume);
    const double top = std::pow(norms.ball_volume / model.v(R), 1 / (2 * p));
    auto row_at = [&](double rho) {
        vol.add_row(rho, top - std::pow(ball_volume(f, rho) / model.v(rho), 1 / (2 * p)), rhs);
    };
    row_at(r);
    for (int k = 1; k <= f.N && f.r(k) <= R * (1.0 + 1e-12); ++k) {
        if (f.r(k) > r * (1.0 + 1e-12)) {
            row_at(f.r(k));
        }
    }
    vol.settle();

    // Monotonicity of m(B_r)/v(r) over the nodes, asserted when Ric_inf >= (n-1)K is
    // certified on the sampled directions.
    double min_excess = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        for (int k = 0; k <= f.N && f.r(k) <= R * (1.0 + 1e-12); ++k) {
            min_excess = std::min(min_excess, f.ric_lower[d][static_cast<std::size_t>(k)] - (n - 1) * K);
        }
    }
    mono.set("min_ric_excess", min_excess);
    mono.set("norm_bar", norms.norm_bar);
    std::vector<double> mb(static_cast<std::size_t>(f.N + 1), 0.0);
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        const auto cum = cumulative_integral(f.sigma[d], f.h);
        for (std::size_t k = 0; k < mb.size(); ++k) {
            mb[k] += f.grid.w[d] * cum[k];
        }
    }
    double prev = 0.0;
    for (int k = 1; k <= f.N && f.r(k) <= R * (1.0 + 1e-12); ++k) {
        const double ratio = mb[static_cast<std::size_t>(k)] / model.v(f.r(k));
        if (k > 1) {
            mono.add_row(f.r(k), ratio, prev);
        }
        prev = ratio;
    }
    if (min_excess < -1e-8) {
        mono.status = Status::informational;
        mono.note = "Ric_inf >= (n-1)K is not certified on the grid";
    }
    mono.settle();
    return {vol, mono};
}

DoublingThreshold doubling_threshold(const ModelFunctions& model, double p, double Xi, double R, double mBR)
{
    if (!(Xi > 1.0)) {
        throw DomainError("Xi must exceed 1");
    }
    DoublingThreshold t;
    t.C = constant_C_volume(model.n(), p, model.theta(), model.K(), R, mBR);
    const double ratio = model.v(R) / mBR;
    t.eps1 = std::pow(2 * t.C, -2.0) * std::pow(ratio, -1 / p);
    const double root = (1 - std::pow(Xi, -1 / (2 * p))) / (2 * t.C) * std::pow(ratio, -1 / (2 * p));
    t.eps2 = root * root;
    return t;
}

ComparisonReport check_doubling(const PolarField& f, double p, double K, double theta, double Xi, double r1,
                                double r2, double R, Tolerance tol)
{
    require_ricci(f);
    const int n = f.dim();
    require_p(n, p);
    const ModelFunctions model(n, K, theta);
    require_radius(f, model, R);
    if (!(r1 > 0.0 && r1 <= r2 && r2 <= R)) {
        throw DomainError("radii must satisfy 0 < r1 <= r2 <= R");
    }
    ComparisonReport rep;
    rep.theorem = "doubling";
    rep.tol = tol;
    if (!check_s_bound(f, theta, R, rep)) {
        return rep;
    }
    const IntegralNorms norms = integral_norms(f, p, R, theta, K);
    const DoublingThreshold th = doubling_threshold(model, p, Xi, R, norms.ball_volume);
    rep.set("norm_bar", norms.norm_bar);
    rep.set("C", th.C);
    rep.set("eps1", th.eps1);
    rep.set("eps2", th.eps2);
    rep.set("eps", th.eps());

    const double m1 = ball_volume(f, r1);
    const double m2 = ball_volume(f, r2);
    const double model_ratio = model.v(r2) / model.v(r1);
    const double crude = Xi * std::exp((theta + (n - 1) * std::sqrt(std::abs(K))) * r2) * std::pow(r2 / r1, n);
    rep.add_row(r2, m2 / m1, Xi * model_ratio);
    rep.add_row(r2, Xi * model_ratio, crude);
    if (norms.norm_bar >= th.eps()) {
        rep.status = Status::threshold_unmet;
        rep.note = "norm_bar " + fmt(norms.norm_bar) + " >= eps " + fmt(th.eps());
    }
    rep.settle();
    return rep;
}

double constant_C_relative(const ModelFunctions& model, double p, double r1, double r2, double R1, double R2,
                           double mBR2)
{
    const int n = model.n();
    require_p(n, p);
    const double a = (2 * p + 1) / (2 * p);
    const double growth = (1 + 1 / (2 * p)) * model.theta();
    const double inner = adaptive([&](double t) { return std::pow(model.v(t, R1), -a); }, r1, r2);
    const double outer = adaptive(
        [&](double t) {
            return std::pow(model.s(t), n - 1) * t * std::exp(growth * t) * std::pow(model.v(r2, t), -a);
        },
        R1, R2);
    const double bracket = R1 * std::exp(growth * R1) * std::pow(model.s(R1), n - 1) * inner + outer;
    return volume_prefactor(n, p, model.sphere_area(), mBR2) * bracket;
}

ComparisonReport check_relative_volume(const PolarField& f, double p, double K, double theta, double r1, double r2,
                                       double R1, double R2, Tolerance tol)
{
    require_ricci(f);
    const int n = f.dim();
    require_p(n, p);
    const ModelFunctions model(n, K, theta);
    require_radius(f, model, R2);
    if (!(0.0 <= r1 && r1 <= r2 && r2 < R1 && R1 <= R2)) {
        throw DomainError("radii must satisfy 0 <= r1 <= r2 < R1 <= R2");
    }
    ComparisonReport rep;
    rep.theorem = "relative-volume";
    rep.tol = tol;
    if (!check_s_bound(f, theta, R2, rep)) {
        return rep;
    }
    const IntegralNorms norms = integral_norms(f, p, R2, theta, K);
    const double Ct = constant_C_relative(model, p, r1, r2, R1, R2, norms.ball_volume);
    rep.set("norm_bar", norms.norm_bar);
    rep.set("C", Ct);
    const double outer = (ball_volume(f, R2) - ball_volume(f, r2)) / model.v(r2, R2);
    const double inner = (ball_volume(f, R1) - ball_volume(f, r1)) / model.v(r1, R1);
    rep.add_row(R2, std::pow(outer, 1 / (2 * p)) - std::pow(inner, 1 / (2 * p)), Ct * std::sqrt(norms.norm_bar));
    rep.settle();
    return rep;
}

double growth_constant(int n, double p)
{
    require_p(n, p);
    const double Cnp = n / p * std::sqrt(laplacian_factor(n, p));
    return std::pow(2.0, 2 * p - 1) * (std::pow(2.0, n) + std::pow(Cnp, 2 * p));
}

ComparisonReport check_volume_growth(const PolarField& f, double p, double R, Tolerance tol)
{
    require_ricci(f);
    const int n = f.dim();
    require_p(n, p);
    if (R < 1.0) {
        throw DomainError("the shell estimate needs R >= 1");
    }
    if (R + 1.0 > f.r_max() * (1.0 + 1e-12)) {
        throw DomainError("the shell estimate needs the field up to R + 1");
    }
    ComparisonReport rep;
    rep.theorem = "volume-growth";
    rep.tol = tol;
    if (!check_s_bound(f, 0.0, R + 1.0, rep)) {
        return rep;
    }
    const double kbar = integral_norms(f, p, R + 1.0, 0.0, 0.0).kbar;
    // The admissible threshold is only bounded above; the bound itself is used.
    const double eps = std::pow(R * std::pow(R + 1.0, (2 * p + 1) * n), -1 / p);
    const double C5 = growth_constant(n, p);
    const double outer = ball_volume(f, R + 1.0);
    const double shell = (outer - ball_volume(f, R - 1.0)) / outer;
    rep.set("kbar", kbar);
    rep.set("eps", eps);
    rep.set("C5", C5);
    rep.set("linear_growth_witness", ball_volume(f, R) / R);
    rep.add_row(R, shell, C5 / R);
    if (kbar >= eps) {
        rep.status = Status::threshold_unmet;
        rep.note = "kbar " + fmt(kbar) + " >= eps " + fmt(eps);
    }
    rep.settle();
    return rep;
}

ComparisonReport check_norm_relation(const PolarField& f, double p, double K, double theta, double Xi, double r1,
                                     double r2, Tolerance tol)
{
    require_ricci(f);
    const int n = f.dim();
    require_p(n, p);
    const ModelFunctions model(n, K, theta);
    require_radius(f, model, r2);
    if (!(r1 > 0.0 && r1 <= r2)) {
        throw DomainError("radii must satisfy 0 < r1 <= r2");
    }
    ComparisonReport rep;
    rep.theorem = "norm-relation";
    rep.tol = tol;
    if (!check_s_bound(f, theta, r2, rep)) {
        return rep;
    }
    const IntegralNorms n1 = integral_norms(f, p, r1, theta, K);
    const IntegralNorms n2 = integral_norms(f, p, r2, theta, K);
    const DoublingThreshold th = doubling_threshold(model, p, Xi, r2, n2.ball_volume);
    rep.set("norm_bar_r1", n1.norm_bar);
    rep.set("norm_bar_r2", n2.norm_bar);
    rep.set("eps", th.eps());
    const double base = std::pow(Xi, 1 / p) * std::exp((theta + (n - 1) * std::sqrt(std::abs(K))) * r2 / p) * r2 *
                        r2 * n2.norm_bar;
    const double middle = std::pow(r1 / r2, 2 - n / p) * base;
    rep.add_row(r1, r1 * r1 * n1.norm_bar, middle);
    rep.add_row(r1, middle, base);
    if (n2.norm_bar >= th.eps()) {
        rep.status = Status::threshold_unmet;
        rep.note = "norm_bar " + fmt(n2.norm_bar) + " >= eps " + fmt(th.eps());
    }
    rep.settle();
    return rep;
}

} // namespace finsler
