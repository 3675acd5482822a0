#include "finsler/geodesic_polar.hpp"

#include "finsler/curvature.hpp"
#include "finsler/errors.hpp"
#include "finsler/measure_geometry.hpp"
#include "finsler/parallel.hpp"
#include "finsler/quadrature.hpp"

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>

namespace finsler {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

struct SprayDerivs {
    Vec G;
    Mat Gx;
    Mat Gy;
};

SprayDerivs spray_derivs(const LocalJets& lj)
{
    const int n = lj.n;
    SprayDerivs d{Vec(n), Mat(n, n), Mat(n, n)};
    for (int i = 0; i < n; ++i) {
        const Jet& Gi = lj.G[static_cast<std::size_t>(i)];
        d.G[i] = Gi.value();
        for (int k = 0; k < n; ++k) {
            d.Gx(i, k) = partial(Gi, k);
            d.Gy(i, k) = partial(Gi, n + k);
        }
    }
    return d;
}

Vec head(const State& s, int off, int n)
{
    return s.segment(off, n);
}

// Variational state layout: x, v, J_0..J_{n-2}, J'_0..J'_{n-2}.
Rhs variational_rhs(const MetricSpec& m)
{
    const int n = m.dim();
    return [&m, n](const State& s, State& ds) {
        const Vec x = head(s, 0, n);
        const Vec v = head(s, n, n);
        const SprayDerivs d = spray_derivs(local_jets(m, x, v, 3));
        ds.resize(s.size());
        ds.segment(0, n) = v;
        ds.segment(n, n) = -2.0 * d.G;
        for (int a = 0; a < n - 1; ++a) {
            const int jo = 2 * n + a * n;
            const int jdo = 2 * n + (n - 1) * n + a * n;
            const Vec J = head(s, jo, n);
            const Vec Jd = head(s, jdo, n);
            ds.segment(jo, n) = Jd;
            ds.segment(jdo, n) = -2.0 * (d.Gx * J + d.Gy * Jd);
        }
    };
}

struct DirectionResult {
    std::vector<double> sigma, delta_r, s_along, ric_lower;
    std::vector<Vec> x, v;
};

int ricci_grid(const PolarOptions& opt, int n)
{
    if (opt.ricci_grid > 0) {
        return opt.ricci_grid;
    }
    return n == 2 ? 16 : 8;
}

} // namespace

DirectionGrid DirectionGrid::circle(int N)
{
    std::vector<double> t(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) {
        t[static_cast<std::size_t>(k)] = 2.0 * kPi * k / N;
    }
    return circle_angles(t);
}

DirectionGrid DirectionGrid::circle_angles(const std::vector<double>& theta)
{
    DirectionGrid g;
    g.n = 2;
    const double w = 2.0 * kPi / static_cast<double>(theta.size());
    for (double t : theta) {
        Vec u(2);
        u << std::cos(t), std::sin(t);
        Mat du(2, 1);
        du << -std::sin(t), std::cos(t);
        g.u.push_back(u);
        g.du.push_back(du);
        g.w.push_back(w);
    }
    return g;
}

DirectionGrid DirectionGrid::sphere(int m_t, int m_phi)
{
    DirectionGrid g;
    g.n = 3;
    const Rule& gl = gauss_legendre(m_t);
    for (int i = 0; i < m_t; ++i) {
        const double t = gl.x[static_cast<std::size_t>(i)];
        const double s = std::sqrt(1.0 - t * t);
        for (int j = 0; j < m_phi; ++j) {
            const double p = 2.0 * kPi * j / m_phi;
            Vec u(3);
            u << s * std::cos(p), s * std::sin(p), t;
            Mat du(3, 2);
            du << -t / s * std::cos(p), -s * std::sin(p), -t / s * std::sin(p), s * std::cos(p), 1.0, 0.0;
            g.u.push_back(u);
            g.du.push_back(du);
            g.w.push_back(gl.w[static_cast<std::size_t>(i)] * 2.0 * kPi / m_phi);
        }
    }
    return g;
}

DirectionGrid DirectionGrid::defaults(int n)
{
    return n == 2 ? circle(64) : sphere(16, 32);
}

std::pair<Vec, Vec> Geodesic::at(double t) const
{
    if (t < 0.0 || t > t_end * (1.0 + 1e-12)) {
        throw DomainError("time outside the integrated span");
    }
    for (const Dopri5Step& s : steps) {
        if (t <= s.t0 + s.h || &s == &steps.back()) {
            const State y = s.at(t);
            return {head(y, 0, n), head(y, n, n)};
        }
    }
    throw DomainError("empty geodesic");
}

Geodesic integrate_geodesic(const MetricSpec& m, const Vec& x, const Vec& y, double t_max, double tolerance)
{
    const int n = m.dim();
    if (y.squaredNorm() == 0.0) {
        throw DomainError("geodesic needs a nonzero initial velocity");
    }
    if (t_max * m.F(x, y) > m.injectivity_cap() * (1.0 + 1e-12)) {
        throw DomainError("geodesic length exceeds the injectivity cap");
    }
    Rhs f = [&m, n](const State& s, State& ds) {
        const Vec xx = head(s, 0, n);
        const Vec vv = head(s, n, n);
        ds.resize(2 * n);
        ds.segment(0, n) = vv;
        ds.segment(n, n) = -2.0 * spray_coefficients(m, xx, vv);
    };
    Dopri5 ode(f, tolerance, tolerance * 1e-2);
    State s(2 * n);
    s.segment(0, n) = x;
    s.segment(n, n) = y;
    Geodesic g;
    g.n = n;
    g.t_end = t_max;
    double t = 0.0;
    ode.integrate(t, s, t_max, [&](const Dopri5Step& st) {
        if (!m.in_chart(as_span(Vec(head(st.r1 + st.r2, 0, n))))) {
            throw ChartExit("geodesic left the chart");
        }
        g.steps.push_back(st);
    });
    return g;
}

int PolarField::node(double rr) const
{
    const double u = rr / h;
    const long k = std::lround(u);
    if (std::abs(u - static_cast<double>(k)) > 1e-9 || k < 0 || k > N) {
        throw DomainError("radius " + std::to_string(rr) + " is not on the radial grid");
    }
    return static_cast<int>(k);
}

PolarField polar_field(const MetricSpec& m, const MeasureSpec& mu, const Vec& base, const DirectionGrid& grid,
                       const PolarOptions& opt)
{
    const int n = m.dim();
    if (grid.n != n) {
        throw DomainError("direction grid dimension does not match the metric");
    }
    if (opt.r_max > m.injectivity_cap() * (1.0 + 1e-12)) {
        throw DomainError("r_max exceeds the injectivity cap");
    }
    if (!(opt.h > 0.0) || opt.r_max < opt.h) {
        throw DomainError("radial step must be positive and not exceed r_max");
    }
    m.require_chart(as_span(base));
    PolarField f;
    f.metric = m;
    f.measure = mu;
    f.base = base;
    f.grid = grid;
    f.h = opt.h;
    f.N = static_cast<int>(std::lround(opt.r_max / opt.h));
    if (std::abs(f.N * opt.h - opt.r_max) > 1e-9 * opt.r_max) {
        throw DomainError("r_max must be a multiple of the radial step");
    }
    const int N = f.N;
    const int sig_order = opt.ricci ? 2 : 1;
    const int rgrid = ricci_grid(opt, n);
    const double pole_ric =
        opt.ricci ? ric_inf_lower_at(m, log_density_jet(mu, m, base, 2), base, rgrid) : 0.0;
    const std::size_t dirs = grid.size();
    std::vector<DirectionResult> out(dirs);

    parallel_for(static_cast<int>(dirs), opt.jobs, [&](int di) {
        const auto d = static_cast<std::size_t>(di);
        const Vec& u = grid.u[d];
        const Jet Fj = eval_F(m, base, u, 1, JetVars::fiber);
        const double F0 = Fj.value();
        Vec gradF(n);
        for (int i = 0; i < n; ++i) {
            gradF[i] = Fj.coeff(1 + i);
        }
        State s = State::Zero(2 * n * n);
        s.segment(0, n) = base;
        s.segment(n, n) = u / F0;
        for (int a = 0; a < n - 1; ++a) {
            const Vec du = grid.du[d].col(a);
            s.segment(2 * n + (n - 1) * n + a * n, n) = du / F0 - u * (gradF.dot(du) / (F0 * F0));
        }
        Mat A0(n, n);
        A0.col(0) = s.segment(n, n);
        for (int a = 0; a < n - 1; ++a) {
            A0.col(a + 1) = s.segment(2 * n + (n - 1) * n + a * n, n);
        }
        const double orient = A0.determinant() > 0.0 ? 1.0 : -1.0;

        DirectionResult& res = out[d];
        const auto len = static_cast<std::size_t>(N + 1);
        res.sigma.assign(len, 0.0);
        res.delta_r.assign(len, std::numeric_limits<double>::quiet_NaN());
        res.s_along.assign(len, 0.0);
        if (opt.ricci) {
            res.ric_lower.assign(len, pole_ric);
        }
        res.x.assign(len, base);
        res.v.assign(len, Vec(s.segment(n, n)));
        res.s_along[0] = s_from_jets(local_jets(m, base, res.v[0], 3), log_density_jet(mu, m, base, 1));

        Dopri5 ode(variational_rhs(m), opt.rtol, opt.rtol * 1e-2);
        double t = 0.0;
        double prev_det = 0.0;
        for (int k = 1; k <= N; ++k) {
            const double rk = k * opt.h;
            ode.integrate(t, s, rk);
            const Vec x = s.segment(0, n);
            const Vec v = s.segment(n, n);
            const LocalJets lj = local_jets(m, x, v, 3);
            Mat A(n, n), Ad(n, n);
            A.col(0) = v;
            for (int i = 0; i < n; ++i) {
                Ad(i, 0) = -2.0 * lj.G[static_cast<std::size_t>(i)].value();
            }
            for (int a = 0; a < n - 1; ++a) {
                A.col(a + 1) = s.segment(2 * n + a * n, n);
                Ad.col(a + 1) = s.segment(2 * n + (n - 1) * n + a * n, n);
            }
            const double det = orient * A.determinant();
            if (!(det > 0.0)) {
                const double r0 = (k - 1) * opt.h;
                const double rc = prev_det > 0.0 ? r0 + opt.h * prev_det / (prev_det - det) : r0;
                throw DegenerateJacobian(rc, "polar coordinates degenerate near r = " + std::to_string(rc));
            }
            prev_det = det;
            const Jet ls = log_density_jet(mu, m, x, sig_order);
            double dls = 0.0;
            for (int i = 0; i < n; ++i) {
                dls += ls.coeff(1 + i) * v[i];
            }
            const auto kk = static_cast<std::size_t>(k);
            res.sigma[kk] = std::exp(ls.value()) * det;
            res.delta_r[kk] = dls + A.partialPivLu().solve(Ad).trace();
            res.s_along[kk] = s_from_jets(lj, ls);
            if (opt.ricci) {
                res.ric_lower[kk] = ric_inf_lower_at(m, ls, x, rgrid);
            }
            res.x[kk] = x;
            res.v[kk] = v;
        }
    });

    for (auto& r : out) {
        f.sigma.push_back(std::move(r.sigma));
        f.delta_r.push_back(std::move(r.delta_r));
        f.s_along.push_back(std::move(r.s_along));
        if (opt.ricci) {
            f.ric_lower.push_back(std::move(r.ric_lower));
        }
        f.x.push_back(std::move(r.x));
        f.v.push_back(std::move(r.v));
    }
    return f;
}

double ball_volume(const PolarField& f, double R)
{
    if (R < 0.0 || R > f.r_max() * (1.0 + 1e-12)) {
        throw DomainError("radius outside the polar field");
    }
    double acc = 0.0;
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        acc += f.grid.w[d] * integral_to(f.sigma[d], f.h, std::min(R, f.r_max()));
    }
    return acc;
}

SphereMeasures sphere_measures(const PolarField& f, double r)
{
    if (r < 0.0 || r > f.r_max() * (1.0 + 1e-12)) {
        throw DomainError("radius outside the polar field");
    }
    // Both densities are interpolated from the nodes of the six-point stencil around r.
    const int N = f.N;
    const double u = r / f.h;
    const int k = std::clamp(static_cast<int>(std::floor(u)), 0, std::max(N - 1, 0));
    const int m = std::min(6, N + 1);
    const int s = std::clamp(k - 2, 0, N + 1 - m);
    std::vector<double> plus(static_cast<std::size_t>(N + 1), 0.0);
    std::vector<double> minus(static_cast<std::size_t>(N + 1), 0.0);
    for (int j = s; j < s + m; ++j) {
        const auto jj = static_cast<std::size_t>(j);
        for (std::size_t d = 0; d < f.grid.size(); ++d) {
            const double sg = f.sigma[d][jj];
            if (sg == 0.0) {
                continue;
            }
            const Vec& x = f.x[d][jj];
            const Vec& v = f.v[d][jj];
            const Vec dr = legendre_forward(f.metric, x, v);
            plus[jj] += f.grid.w[d] * sg;
            minus[jj] += f.grid.w[d] * dual_norm_near(f.metric, x, Vec(-dr), Vec(-v)) * sg;
        }
    }
    return {interpolate(plus, f.h, r), interpolate(minus, f.h, r)};
}

HypothesisReport hypothesis_S(const PolarField& f, double theta, double tol)
{
    HypothesisReport rep;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        for (int k = 0; k <= f.N; ++k) {
            const double mg = f.s_along[d][static_cast<std::size_t>(k)] + theta;
            if (mg < rep.worst_margin) {
                rep.worst_margin = mg;
                rep.r = f.r(k);
                rep.theta_index = static_cast<int>(d);
            }
        }
    }
    rep.pass = rep.worst_margin >= -tol;
    return rep;
}

void write_csv(const PolarField& f, std::ostream& os)
{
    os << "theta_index,r,sigma,delta_r,s_along\n";
    char buf[160];
    for (std::size_t d = 0; d < f.grid.size(); ++d) {
        for (int k = 1; k <= f.N; ++k) {
            const auto kk = static_cast<std::size_t>(k);
            std::snprintf(buf, sizeof buf, "%zu,%.16e,%.16e,%.16e,%.16e\n", d, f.r(k), f.sigma[d][kk],
                          f.delta_r[d][kk], f.s_along[d][kk]);
            os << buf;
        }
    }
}

} // namespace finsler
