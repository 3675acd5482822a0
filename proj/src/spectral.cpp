#include "finsler/spectral.hpp"

#include "finsler/errors.hpp"
#include "finsler/quadrature.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace finsler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void require_radius(const PolarField& f, double R)
{
    if (!(R > 0.0) || R > f.r_max() * (1.0 + 1e-12)) {
        throw DomainError("radius " + fmt(R) + " outside the polar field");
    }
}

// F*(-dr) along every ray up to node K; 0 at the pole.
std::vector<std::vector<double>> inward_dual(const PolarField& f, int K)
{
    std::vector<std::vector<double>> c(f.grid.size(), std::vector<double>(static_cast<std::size_t>(K + 1), 0.0));
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        for (int k = 1; k <= K; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const Vec& x = f.x[d][kk];
            const Vec& v = f.v[d][kk];
            const Vec dr = legendre_forward(f.metric, x, v);
            c[d][kk] = dual_norm_near(f.metric, x, Vec(-dr), Vec(-v));
        }
    }
    return c;
}

// Sphere weights: A = sum w sigma, Am = sum w F*(-dr) sigma, W = sum w F*(-dr)^2 sigma.
struct Shells {
    std::vector<double> A, Am, W;
};

Shells shells(const PolarField& f, int K)
{
    const auto c = inward_dual(f, K);
    Shells s{std::vector<double>(static_cast<std::size_t>(K + 1), 0.0), {}, {}};
    s.Am = s.A;
    s.W = s.A;
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        for (int k = 1; k <= K; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            const double ws = f.grid.w[d] * f.sigma[d][kk];
            s.A[kk] += ws;
            s.Am[kk] += ws * c[d][kk];
            s.W[kk] += ws * c[d][kk] * c[d][kk];
        }
    }
    return s;
}

// Polynomial extrapolation of samples a(eps_i) to eps = 0.
double extrapolate(const std::vector<double>& eps, const std::vector<double>& a)
{
    double out = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        double l = 1.0;
        for (std::size_t j = 0; j < eps.size(); ++j) {
            if (j != i) {
                l *= eps[j] / (eps[j] - eps[i]);
            }
        }
        out += l * a[i];
    }
    return out;
}

bool translation_invariant(const MetricSpec& m)
{
    switch (m.family()) {
    case Family::euclidean:
    case Family::minkowski_quartic:
        return true;
    case Family::randers:
        return m.randers_B().size() == 0 || m.randers_B().norm() == 0.0;
    default:
        return false;
    }
}

double root(const std::function<double(double)>& g, double lo, double hi)
{
    std::uintmax_t it = 200;
    const auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(std::abs(a), 1.0); };
    const auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, tol, it);
    return 0.5 * (a + b);
}

// Inner and outer layer measures of K = {F(x - x0) <= t} divided by eps, from the Euclidean
// radial extent of K eroded by -eps B and dilated by eps B (B the unit indicatrix).
std::pair<double, double> chart_layers(const PolarField& f, double t, double eps)
{
    const MetricSpec& m = f.metric;
    const int n = f.dim();
    const Vec& x0 = f.base;
    const SphereRule dirs = n == 2 ? circle_rule(128) : sphere_rule(12, 24);
    const Rule& gl = gauss_legendre(8);
    const int search = default_search_grid(n);
    const auto F = [&](const Vec& y) { return m.F(x0, y); };
    const auto mass = [&](const Vec& u, double a, double b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < gl.x.size(); ++i) {
            const double s = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
            acc += gl.w[i] * measure_density(f.measure, m, Vec(x0 + s * u)) * std::pow(s, n - 1);
        }
        return 0.5 * (b - a) * acc;
    };
    double inner = 0.0;
    double outer = 0.0;
    for (std::size_t d = 0; d < dirs.u.size(); ++d) {
        const Vec& u = dirs.u[d];
        const double Fu = F(u);
        const double s0 = t / Fu;
        // sup / inf over unit vectors w of F(s u - eps w), minus t.
        const auto worst = [&](double s) {
            return maximize_on_sphere(n, [&](const Vec& e) { return F(Vec(s * u - eps * e / F(e))); }, search).value - t;
        };
        const auto best = [&](double s) {
            return -maximize_on_sphere(n, [&](const Vec& e) { return -F(Vec(s * u - eps * e / F(e))); }, search).value - t;
        };
        const double s_in = root(worst, 0.0, s0);
        const double s_out = root(best, s0, (t + 2.0 * eps) / Fu);
        inner += dirs.w[d] * mass(u, s_in, s0);
        outer += dirs.w[d] * mass(u, s0, s_out);
    }
    return {inner / eps, outer / eps};
}

// Polar-field layers: the outer one from ball volumes, the inner one from the first-order
// inward distance (t - r) / F*(-dr) evaluated on dB_t.
std::pair<double, double> polar_layers(const PolarField& f, double t, double eps)
{
    if (t + eps > f.r_max() * (1.0 + 1e-12) || eps >= t) {
        throw DomainError("layer [" + fmt(t - eps) + ", " + fmt(t + eps) + "] outside the polar field");
    }
    const double outer = (ball_volume(f, t + eps) - ball_volume(f, t)) / eps;
    const int k = std::clamp(static_cast<int>(std::floor(t / f.h)), 0, f.N - 1);
    const int m = std::min(6, f.N + 1);
    const int s = std::clamp(k - 2, 0, f.N + 1 - m);
    double inner = 0.0;
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        std::vector<double> c(static_cast<std::size_t>(f.N + 1), 0.0);
        for (int j = std::max(s, 1); j < s + m; ++j) {
            const auto jj = static_cast<std::size_t>(j);
            const Vec& x = f.x[d][jj];
            const Vec& v = f.v[d][jj];
            c[jj] = dual_norm_near(f.metric, x, Vec(-legendre_forward(f.metric, x, v)), Vec(-v));
        }
        if (s == 0) {
            // Extend to the pole linearly; only the stencil shape matters here.
            c[0] = 2.0 * c[1] - c[2];
        }
        const double depth = eps * interpolate(c, f.h, t);
        inner += f.grid.w[d] * (integral_to(f.sigma[d], f.h, t) - integral_to(f.sigma[d], f.h, t - depth));
    }
    return {inner / eps, outer};
}

struct Tridiagonal {
    std::vector<double> d;
    std::vector<double> e;
};

// Number of eigenvalues below x.
int sturm_count(const Tridiagonal& T, double x)
{
    int count = 0;
    double q = 1.0;
    for (std::size_t i = 0; i < T.d.size(); ++i) {
        q = T.d[i] - x - (i > 0 ? T.e[i - 1] * T.e[i - 1] / q : 0.0);
        if (q == 0.0) {
            q = -1e-300;
        }
        count += q < 0.0;
    }
    return count;
}

std::vector<double> solve_shifted(const Tridiagonal& T, double x, std::vector<double> b)
{
    const std::size_t n = T.d.size();
    std::vector<double> c(n, 0.0);
    double piv = T.d[0] - x;
    for (std::size_t i = 0;; ++i) {
        if (piv == 0.0) {
            piv = 1e-300;
        }
        if (i + 1 == n) {
            b[i] /= piv;
            break;
        }
        c[i] = T.e[i] / piv;
        b[i] /= piv;
        piv = T.d[i + 1] - x - T.e[i] * c[i];
        b[i + 1] -= T.e[i] * b[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        b[i] -= c[i] * b[i + 1];
    }
    return b;
}

struct Eigenpair {
    double lambda = 0.0;
    // Nodal values on the node list, including the Dirichlet node.
    std::vector<double> u;
};

// Smallest eigenpair of the P1 discretization on nodes idx (the last one carries u = 0).
Eigenpair radial_eigen(const std::vector<double>& r, const std::vector<double>& A, const std::vector<double>& W,
                       const std::vector<int>& idx)
{
    const std::size_t m = idx.size() - 1;
    std::vector<double> diag(m, 0.0);
    std::vector<double> off(m, 0.0);
    std::vector<double> mass(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const auto a = static_cast<std::size_t>(idx[j]);
        const auto b = static_cast<std::size_t>(idx[j + 1]);
        const double len = r[b] - r[a];
        const double k = 0.5 * (W[a] + W[b]) / len;
        diag[j] += k;
        mass[j] += len * (2.0 * A[a] + A[b]) / 6.0;
        if (j + 1 < m) {
            diag[j + 1] += k;
            off[j] = -k;
            mass[j + 1] += len * (A[a] + 2.0 * A[b]) / 6.0;
        }
    }
    Tridiagonal T;
    T.d.resize(m);
    T.e.resize(m > 0 ? m - 1 : 0);
    double upper = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        T.d[j] = diag[j] / mass[j];
        if (j + 1 < m) {
            T.e[j] = off[j] / std::sqrt(mass[j] * mass[j + 1]);
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        upper = std::max(upper, T.d[j] + (j > 0 ? std::abs(T.e[j - 1]) : 0.0) + (j + 1 < m ? std::abs(T.e[j]) : 0.0));
    }
    double lo = 0.0;
    double hi = upper;
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (sturm_count(T, mid) >= 1 ? hi : lo) = mid;
    }
    const double lambda = 0.5 * (lo + hi);
    std::vector<double> y(m, 1.0);
    for (int it = 0; it < 4; ++it) {
        y = solve_shifted(T, lo, y);
        double nrm = 0.0;
        for (double v : y) {
            nrm = std::max(nrm, std::abs(v));
        }
        for (double& v : y) {
            v /= nrm;
        }
    }
    Eigenpair out{lambda, std::vector<double>(m + 1, 0.0)};
    double top = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        out.u[j] = y[j] / std::sqrt(mass[j]);
        if (std::abs(out.u[j]) > std::abs(top)) {
            top = out.u[j];
        }
    }
    for (double& v : out.u) {
        v /= top;
    }
    return out;
}

int monotone_flag(const std::vector<double>& du)
{
    const bool inc = std::all_of(du.begin(), du.end(), [](double v) { return v >= 0.0; });
    const bool dec = std::all_of(du.begin(), du.end(), [](double v) { return v <= 0.0; });
    return inc ? 1 : dec ? -1 : 0;
}

} // namespace

IsoProfile iso_profile(const PolarField& f, double R)
{
    require_radius(f, R);
    const int K = f.node(R);
    const int n = f.dim();
    const Shells s = shells(f, K);
    const auto vol = cumulative_integral(s.A, f.h);
    IsoProfile p;
    p.n = n;
    p.R = R;
    const double scale = std::pow(vol.back(), 1.0 / n);
    for (int k = 1; k <= K; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        p.t.push_back(f.r(k));
        p.volume.push_back(vol[kk]);
        p.nu_plus.push_back(s.A[kk]);
        p.nu_minus.push_back(s.Am[kk]);
        const double ratio = std::min(s.A[kk], s.Am[kk]) / std::pow(vol[kk], (n - 1.0) / n);
        p.ratio.push_back(ratio);
        p.normalized.push_back(ratio / scale);
    }
    return p;
}

void write_csv(const IsoProfile& p, std::ostream& os)
{
    os << "t,volume,nu_plus,nu_minus,ratio,normalized\n";
    char buf[160];
    for (std::size_t i = 0; i < p.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e,%.16e,%.16e\n", p.t[i], p.volume[i], p.nu_plus[i],
                      p.nu_minus[i], p.ratio[i], p.normalized[i]);
        os << buf;
    }
}

double sobolev_constant_tilde(int n, double C_SD)
{
    if (n <= 2) {
        throw BadDimension("the L^2 Sobolev constant needs n > 2, got n = " + std::to_string(n));
    }
    const double c = 2.0 * (n - 1.0) / (n - 2.0);
    return c * c * C_SD * C_SD;
}

IsoConstants r0_and_constants(int n, double Lambda, double theta, double Xi)
{
    if (n < 2) {
        throw BadDimension("dimension must be at least 2");
    }
    if (!(Lambda >= 1.0) || !(theta >= 0.0) || !(Xi > 1.0)) {
        throw DomainError("need Lambda >= 1, theta >= 0, Xi > 1");
    }
    IsoConstants c;
    c.n = n;
    c.Lambda = Lambda;
    c.theta = theta;
    c.Xi = Xi;
    const double q = std::pow(0.75, 1.0 / n);
    c.a0 = (1.0 - q) / (1.0 + q);
    const double L = Lambda * (Lambda + 2.0);
    const auto r0_of = [&](int k) { return std::pow(c.a0 / L, k - 1) / (5.0 * L * (Lambda + 1.0)); };
    // k and r0 depend on each other through r1 = 1/r0; iterate from k = 2.
    int k = 2;
    c.converged = false;
    for (c.iterations = 1; c.iterations <= 50; ++c.iterations) {
        const double r1 = 1.0 / r0_of(k);
        const double base = std::log1p(-0.5 * std::exp(-theta * r1));
        const double need = 1.0 + std::ceil(std::log(0.5) / base - 1e-12);
        if (!std::isfinite(need) || need > 1e6) {
            break;
        }
        const int next = std::max(2, static_cast<int>(need));
        if (next == k) {
            c.converged = true;
            break;
        }
        k = next;
    }
    c.iterations = std::min(c.iterations, 50);
    c.k = k;
    if (!c.converged) {
        c.r0 = 0.0;
        c.C_iso = kInf;
        c.C_SD = kInf;
        if (n > 2) {
            c.C_tilde = kInf;
        }
        return c;
    }
    c.r0 = r0_of(k);
    c.C_iso = std::pow(10.0, n + 1) * std::pow(1.0 + Lambda * Lambda, n - 1) * std::pow(Lambda + 2.0, 2 * n + 1) *
              Xi * std::exp(theta / c.r0 * (2.0 * Lambda * Lambda + 1.0 / n)) / c.r0;
    c.C_SD = c.C_iso;
    if (n > 2) {
        c.C_tilde = sobolev_constant_tilde(n, c.C_SD);
    }
    return c;
}

bool curvature_threshold_certified(const PolarField& f, double p, double R, double theta)
{
    if (!f.has_ricci()) {
        return false;
    }
    return integral_norms(f, p, std::min(R, f.r_max()), theta, 0.0).kbar <= 1e-12;
}

ComparisonReport check_iso_bound(const IsoProfile& profile, const IsoConstants& c, double r, bool threshold_met)
{
    if (!(r > 0.0) || r > 1.0 || std::abs(profile.R - r) > 1e-12 * r) {
        throw DomainError("iso bound needs 0 < r <= 1 and a profile over [0, r]");
    }
    ComparisonReport rep;
    rep.theorem = "isoperimetric-bound";
    rep.tol = {0.0, 0.0};
    rep.note = "radial family only: a necessary condition";
    rep.set("C_iso", c.C_iso);
    rep.set("r0", c.r0);
    rep.set("k", c.k);
    const double bound = 1.0 / (c.C_iso * r);
    double inf = kInf;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        rep.add_row(profile.t[i], bound, profile.normalized[i]);
        inf = std::min(inf, profile.normalized[i]);
    }
    rep.set("family_infimum", inf);
    if (!c.converged) {
        rep.status = Status::informational;
        rep.note += "; r0 iteration did not converge";
    } else if (!threshold_met) {
        rep.status = Status::informational;
        rep.note += "; curvature threshold not certified";
    }
    rep.settle();
    return rep;
}

CoareaResult coarea_limits(const PolarField& f, double t, std::vector<double> eps)
{
    if (eps.empty()) {
        eps = {0.04 * t, 0.02 * t, 0.01 * t};
    }
    CoareaResult out;
    out.t = t;
    out.eps = eps;
    out.chart_route = translation_invariant(f.metric);
    for (double e : eps) {
        const auto [in, ou] = out.chart_route ? chart_layers(f, t, e) : polar_layers(f, t, e);
        out.inner.push_back(in);
        out.outer.push_back(ou);
    }
    out.inner_limit = extrapolate(eps, out.inner);
    out.outer_limit = extrapolate(eps, out.outer);
    const SphereMeasures nu = sphere_measures(f, t);
    out.nu_minus = nu.minus;
    out.nu_plus = nu.plus;
    return out;
}

ComparisonReport coarea_consistency(const PolarField& f, double R, std::vector<double> eps, Tolerance tol)
{
    require_radius(f, R);
    ComparisonReport rep;
    rep.theorem = "coarea-consistency";
    rep.tol = tol;
    // Rows compare relative deviations; the polar route needs room for the outer layer.
    for (double t : {0.5 * R, R}) {
        std::vector<double> e = eps;
        if (e.empty()) {
            e = {0.04 * t, 0.02 * t, 0.01 * t};
        }
        if (!translation_invariant(f.metric) && t + *std::max_element(e.begin(), e.end()) > f.r_max()) {
            continue;
        }
        const CoareaResult c = coarea_limits(f, t, e);
        rep.add_row(t, std::abs(c.inner_limit - c.nu_minus) / c.nu_minus, 0.0);
        rep.add_row(t, std::abs(c.outer_limit - c.nu_plus) / c.nu_plus, 0.0);
        rep.note = c.chart_route ? "chart geometry" : "polar layers";
    }
    if (rep.rows.empty()) {
        throw DomainError("no radius leaves room for the outer layer");
    }
    rep.settle();
    return rep;
}

EigenResult lambda1_radial(const PolarField& f, double R, const IsoConstants& c, bool threshold_met)
{
    require_radius(f, R);
    const int K = f.node(R);
    if (K < 4) {
        throw GridTooCoarse("at least 4 radial elements are needed, got " + std::to_string(K));
    }
    const Shells s = shells(f, K);
    std::vector<double> r(static_cast<std::size_t>(K + 1));
    for (int k = 0; k <= K; ++k) {
        r[static_cast<std::size_t>(k)] = f.r(k);
    }
    std::vector<int> fine(static_cast<std::size_t>(K + 1));
    for (int k = 0; k <= K; ++k) {
        fine[static_cast<std::size_t>(k)] = k;
    }
    // Every other node counted back from R; an odd count keeps node 1 next to the pole.
    std::vector<int> coarse;
    for (int k = K; k > 1; k -= 2) {
        coarse.push_back(k);
    }
    if (K % 2 == 1) {
        coarse.push_back(1);
    }
    coarse.push_back(0);
    std::reverse(coarse.begin(), coarse.end());

    const Eigenpair ef = radial_eigen(r, s.A, s.W, fine);
    const Eigenpair ec = radial_eigen(r, s.A, s.W, coarse);
    EigenResult out;
    out.lambda1 = ef.lambda;
    out.lambda1_coarse = ec.lambda;
    // Second-order convergence: the next halving moves the value by about a quarter of this one.
    const double next = std::abs(ec.lambda - ef.lambda) / 4.0;
    if (next > 1e-3 * ef.lambda) {
        throw GridTooCoarse("radial eigenvalue moves by " + fmt(next / ef.lambda) + " relative under refinement");
    }

    RadialFunction& u = out.profile;
    u.h = f.h;
    u.r = r;
    u.u = ef.u;
    u.dirichlet_outer = true;
    u.du.resize(u.u.size());
    for (std::size_t k = 0; k < u.u.size(); ++k) {
        // Element slopes averaged at interior nodes.
        const double left = k > 0 ? (u.u[k] - u.u[k - 1]) / f.h : 0.0;
        const double right = k + 1 < u.u.size() ? (u.u[k + 1] - u.u[k]) / f.h : left;
        u.du[k] = k == 0 ? right : 0.5 * (left + right);
    }
    u.monotone = monotone_flag(u.du);

    ComparisonReport& rep = out.bound_check;
    rep.theorem = "eigenvalue-bound";
    rep.tol = {0.0, 0.0};
    rep.note = "radial decreasing profiles: an upper bound for the first eigenvalue";
    rep.set("lambda1", ef.lambda);
    rep.set("lambda1_coarse", ec.lambda);
    if (!c.C_tilde) {
        rep.status = Status::informational;
        rep.note += "; the L^2 Sobolev constant needs n > 2";
        rep.settle();
        return out;
    }
    const double Ct = *c.C_tilde;
    rep.set("C_tilde", Ct);
    rep.add_row(R, 1.0 / (Ct * R * R), ef.lambda);

    // Sobolev inequality evaluated on the eigenprofile.
    const int n = f.dim();
    const double q = 2.0 * n / (n - 2.0);
    std::vector<double> lp(r.size());
    std::vector<double> grad(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        lp[k] = std::pow(std::abs(u.u[k]), q) * s.A[k];
    }
    double energy = 0.0;
    for (std::size_t k = 0; k + 1 < r.size(); ++k) {
        const double slope = (u.u[k + 1] - u.u[k]) / f.h;
        // du = slope dr with slope < 0, so F*(du) = |slope| F*(-dr).
        energy += slope * slope * 0.5 * (s.W[k] + s.W[k + 1]) * f.h;
    }
    const double lhs = std::pow(simpson(lp, f.h), (n - 2.0) / n);
    const double mB = cumulative_integral(s.A, f.h).back();
    rep.add_row(R, lhs, Ct * std::pow(mB, -2.0 / n) * R * R * energy);
    if (!c.converged) {
        rep.status = Status::informational;
        rep.note += "; r0 iteration did not converge";
    } else if (!threshold_met) {
        rep.status = Status::informational;
        rep.note += "; curvature threshold not certified";
    }
    rep.settle();
    return out;
}

HarmonicResult radial_harmonic(const PolarField& f, double r_inner, double R)
{
    require_radius(f, R);
    if (!(r_inner > 0.0) || r_inner >= R) {
        throw DomainError("annulus needs 0 < r_inner < R");
    }
    const int i0 = f.node(r_inner);
    const int K = f.node(R);
    const Shells s = shells(f, K);
    std::vector<double> g;
    std::vector<double> A;
    for (int k = i0; k <= K; ++k) {
        A.push_back(s.A[static_cast<std::size_t>(k)]);
        g.push_back(1.0 / A.back());
    }
    const auto I = cumulative_integral(g, f.h);
    HarmonicResult out;
    out.flux = 1.0 / I.back();
    RadialFunction& u = out.u;
    u.h = f.h;
    for (std::size_t j = 0; j < A.size(); ++j) {
        u.r.push_back(f.r(i0 + static_cast<int>(j)));
        u.u.push_back(I[j] * out.flux);
        u.du.push_back(out.flux / A[j]);
    }
    u.monotone = monotone_flag(u.du);
    for (std::size_t j = 0; j + 1 < A.size(); ++j) {
        out.residual = std::max(out.residual, std::abs(A[j + 1] * u.du[j + 1] - A[j] * u.du[j]) / (f.h * out.flux));
    }
    // For increasing radial u, grad u = u' grad r and F(grad r) = 1.
    const double lo = r_inner + 0.25 * (R - r_inner);
    const double hi = R - 0.25 * (R - r_inner);
    double sup = 0.0;
    for (std::size_t j = 0; j < u.r.size(); ++j) {
        if (u.r[j] >= lo - 1e-12 && u.r[j] <= hi + 1e-12) {
            sup = std::max(sup, u.du[j] * u.du[j]);
        }
    }
    std::vector<double> l2(A.size());
    for (std::size_t j = 0; j < A.size(); ++j) {
        l2[j] = u.u[j] * u.u[j] * A[j];
    }
    const double norm2 = cumulative_integral(l2, f.h).back();
    out.Q = sup * R * R * cumulative_integral(s.A, f.h).back() / norm2;
    return out;
}

void write_csv(const RadialFunction& u, std::ostream& os)
{
    os << "r,u,du\n";
    char buf[96];
    for (std::size_t k = 0; k < u.r.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e\n", u.r[k], u.u[k], u.du[k]);
        os << buf;
    }
}

} // namespace finsler
