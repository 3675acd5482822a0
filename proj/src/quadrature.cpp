#include "finsler/quadrature.hpp"

#include "finsler/errors.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace finsler {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

Rule compute_gauss_legendre(int m)
{
    Rule r;
    r.x.resize(static_cast<std::size_t>(m));
    r.w.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = z;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        const auto lo = static_cast<std::size_t>(i);
        const auto hi = static_cast<std::size_t>(m - 1 - i);
        r.x[lo] = -z;
        r.x[hi] = z;
        r.w[lo] = w;
        r.w[hi] = w;
    }
    return r;
}

double brent_max(const std::function<double(double)>& g, double a, double b, double& arg)
{
    std::uintmax_t iters = 200;
    const auto res = boost::math::tools::brent_find_minima([&](double s) { return -g(s); }, a, b,
                                                           std::numeric_limits<double>::digits / 2,
                                                           iters);
    arg = res.first;
    return -res.second;
}

Vec tangent_rotate(const Vec& u, const Vec& e, double s)
{
    return std::cos(s) * u + std::sin(s) * e;
}

// Orthonormal tangent pair at a unit vector of R^3.
std::pair<Vec, Vec> tangent_frame(const Vec& u)
{
    Eigen::Vector3d a(u[0], u[1], u[2]);
    Eigen::Vector3d seed = std::abs(a[0]) < 0.6 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
    Eigen::Vector3d e1 = (seed - seed.dot(a) * a).normalized();
    Eigen::Vector3d e2 = a.cross(e1);
    Vec v1(3), v2(3);
    v1 << e1[0], e1[1], e1[2];
    v2 << e2[0], e2[1], e2[2];
    return {v1, v2};
}

} // namespace

const Rule& gauss_legendre(int m)
{
    static std::mutex mu;
    static std::map<int, std::unique_ptr<Rule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[m];
    if (!slot) {
        slot = std::make_unique<Rule>(compute_gauss_legendre(m));
    }
    return *slot;
}

SphereRule circle_rule(int N)
{
    SphereRule r;
    r.n = 2;
    for (int k = 0; k < N; ++k) {
        const double th = 2.0 * kPi * k / N;
        Vec u(2);
        u << std::cos(th), std::sin(th);
        r.u.push_back(u);
        r.w.push_back(2.0 * kPi / N);
    }
    return r;
}

SphereRule sphere_rule(int m_t, int m_phi)
{
    SphereRule r;
    r.n = 3;
    const Rule& gl = gauss_legendre(m_t);
    for (int i = 0; i < m_t; ++i) {
        const double t = gl.x[static_cast<std::size_t>(i)];
        const double s = std::sqrt(1.0 - t * t);
        for (int k = 0; k < m_phi; ++k) {
            const double ph = 2.0 * kPi * k / m_phi;
            Vec u(3);
            u << s * std::cos(ph), s * std::sin(ph), t;
            r.u.push_back(u);
            r.w.push_back(gl.w[static_cast<std::size_t>(i)] * 2.0 * kPi / m_phi);
        }
    }
    return r;
}

int default_search_grid(int)
{
    return 64;
}

SphereOptimum refine_on_sphere(const DirectionFn& f, const Vec& start, double reach)
{
    SphereOptimum best{start.normalized(), 0.0, true};
    best.value = f(best.u);
    if (start.size() == 2) {
        const double th0 = std::atan2(best.u[1], best.u[0]);
        double th = th0;
        const double v = brent_max(
            [&](double t) {
                Vec u(2);
                u << std::cos(t), std::sin(t);
                return f(u);
            },
            th0 - reach, th0 + reach, th);
        if (v > best.value) {
            best.value = v;
            best.u << std::cos(th), std::sin(th);
        }
        return best;
    }
    // Cyclic line searches along great circles through the current point.
    double delta = reach;
    for (int cycle = 0; cycle < 80; ++cycle) {
        const double before = best.value;
        double moved = 0.0;
        auto [e1, e2] = tangent_frame(best.u);
        const Vec dirs[4] = {e1, e2, (e1 + e2).normalized(), (e1 - e2).normalized()};
        for (const Vec& e : dirs) {
            const Vec u0 = best.u;
            double s = 0.0;
            const double v =
                brent_max([&](double t) { return f(tangent_rotate(u0, e, t)); }, -delta, delta, s);
            if (v > best.value) {
                best.value = v;
                best.u = tangent_rotate(u0, e, s).normalized();
                moved = std::max(moved, std::abs(s));
            }
        }
        const double gain = best.value - before;
        if (gain <= 1e-15 * (1.0 + std::abs(best.value))) {
            return best;
        }
        delta = std::max(4.0 * moved, 1e-6);
    }
    best.converged = false;
    return best;
}

SphereOptimum maximize_on_sphere(int n, const DirectionFn& f, int grid)
{
    SphereRule rule = n == 2 ? circle_rule(grid) : sphere_rule(grid / 2, grid);
    std::size_t arg = 0;
    double val = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rule.u.size(); ++k) {
        const double v = f(rule.u[k]);
        if (v > val) {
            val = v;
            arg = k;
        }
    }
    const double reach = n == 2 ? 2.0 * kPi / grid : 2.0 * kPi / grid * 1.5;
    SphereOptimum out = refine_on_sphere(f, rule.u[arg], reach);
    if (out.value < val) {
        out.value = val;
        out.u = rule.u[arg];
    }
    return out;
}

namespace {

// Lagrange interpolant through nodes s..s+m-1 evaluated at grid coordinate u (in units of h).
double lagrange(std::span<const double> f, int s, int m, double u)
{
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        double l = 1.0;
        for (int j = 0; j < m; ++j) {
            if (j != i) {
                l *= (u - (s + j)) / static_cast<double>(i - j);
            }
        }
        acc += l * f[static_cast<std::size_t>(s + i)];
    }
    return acc;
}

// Stencil around panel [k, k+1] clamped to the available nodes.
std::pair<int, int> stencil(int k, int N)
{
    const int m = std::min(6, N + 1);
    const int s = std::clamp(k - 2, 0, N + 1 - m);
    return {s, m};
}

double panel(std::span<const double> f, int k, double a, double b)
{
    const int N = static_cast<int>(f.size()) - 1;
    const auto [s, m] = stencil(k, N);
    // Three-point Gauss-Legendre is exact for the quintic interpolant.
    static const double xg[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        acc += wg[i] * lagrange(f, s, m, 0.5 * (a + b) + 0.5 * (b - a) * xg[i]);
    }
    return 0.5 * (b - a) * acc;
}

} // namespace

double simpson(std::span<const double> f, double h)
{
    const int N = static_cast<int>(f.size()) - 1;
    if (N <= 0) {
        return 0.0;
    }
    if (N == 1) {
        return 0.5 * h * (f[0] + f[1]);
    }
    auto at = [&](int i) { return f[static_cast<std::size_t>(i)]; };
    const int even = N % 2 == 0 ? N : N - 3;
    double acc = 0.0;
    for (int i = 0; i + 2 <= even; i += 2) {
        acc += h / 3.0 * (at(i) + 4.0 * at(i + 1) + at(i + 2));
    }
    if (even != N) {
        acc += 3.0 * h / 8.0 * (at(N - 3) + 3.0 * at(N - 2) + 3.0 * at(N - 1) + at(N));
    }
    return acc;
}

std::vector<double> cumulative_integral(std::span<const double> f, double h)
{
    const int N = static_cast<int>(f.size()) - 1;
    std::vector<double> I(f.size(), 0.0);
    for (int k = 0; k < N; ++k) {
        I[static_cast<std::size_t>(k + 1)] = I[static_cast<std::size_t>(k)] + h * panel(f, k, k, k + 1);
    }
    return I;
}

double interpolate(std::span<const double> f, double h, double r)
{
    const int N = static_cast<int>(f.size()) - 1;
    const double u = r / h;
    const int k = std::clamp(static_cast<int>(std::floor(u)), 0, std::max(N - 1, 0));
    if (N == 0) {
        return f[0];
    }
    const auto [s, m] = stencil(k, N);
    return lagrange(f, s, m, u);
}

double integral_to(std::span<const double> f, double h, double R)
{
    const int N = static_cast<int>(f.size()) - 1;
    const double u = R / h;
    int k = static_cast<int>(std::floor(u + 1e-9));
    k = std::clamp(k, 0, N);
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
        acc += h * panel(f, j, j, j + 1);
    }
    const double rest = u - k;
    if (rest > 1e-9 && k < N) {
        acc += h * panel(f, k, k, u);
    }
    return acc;
}

} // namespace finsler
