#include "finsler/curvature.hpp"

#include "finsler/errors.hpp"

#include <cmath>

namespace finsler {

double partial(const Jet& j, int a, int b, int c)
{
    MultiIndex idx = MultiIndex::zero(j.num_vars());
    for (int v : {a, b, c}) {
        if (v >= 0) {
            idx = idx.plus(v);
        }
    }
    const int pos = j.layout().position(idx);
    if (pos < 0) {
        throw IndexError("partial derivative beyond jet order");
    }
    return j.coeff(pos);
}

namespace {

// Gauss-Jordan inverse of a symmetric positive definite jet matrix, with its determinant.
void jet_inverse(const std::vector<Jet>& A, int n, std::vector<Jet>& inv, Jet& det)
{
    std::vector<Jet> a = A;
    const int nv = A[0].num_vars();
    const int ord = A[0].order();
    inv.assign(static_cast<std::size_t>(n * n), Jet::constant(nv, ord, 0.0));
    for (int i = 0; i < n; ++i) {
        inv[static_cast<std::size_t>(i * n + i)] = Jet::constant(nv, ord, 1.0);
    }
    det = Jet::constant(nv, ord, 1.0);
    auto at = [n](std::vector<Jet>& v, int r, int c) -> Jet& { return v[static_cast<std::size_t>(r * n + c)]; };
    for (int k = 0; k < n; ++k) {
        const Jet p = at(a, k, k);
        if (!(p.value() > 1e-300)) {
            throw SingularMatrix("fundamental tensor is not positive definite");
        }
        det *= p;
        const Jet ip = reciprocal(p);
        for (int c = 0; c < n; ++c) {
            at(a, k, c) *= ip;
            at(inv, k, c) *= ip;
        }
        for (int r = 0; r < n; ++r) {
            if (r == k) {
                continue;
            }
            const Jet f = at(a, r, k);
            for (int c = 0; c < n; ++c) {
                at(a, r, c) -= f * at(a, k, c);
                at(inv, r, c) -= f * at(inv, k, c);
            }
        }
    }
}

Mat hessian_from_fiber_jet(const Jet& j, int n)
{
    Mat g(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            g(i, k) = 0.5 * partial(j, i, k);
        }
    }
    return g;
}

} // namespace

FundamentalTensor fundamental_tensor(const MetricSpec& m, const Vec& x, const Vec& y)
{
    const int n = m.dim();
    const Jet j = eval_F(m, x, y, 2, JetVars::fiber, true);
    FundamentalTensor t;
    t.g = hessian_from_fiber_jet(j, n);
    Eigen::LLT<Mat> llt(t.g);
    if (llt.info() != Eigen::Success) {
        throw SingularMatrix("fundamental tensor is not positive definite");
    }
    t.g_inv = llt.solve(Mat::Identity(n, n));
    return t;
}

Tensor3 cartan_tensor(const MetricSpec& m, const Vec& x, const Vec& y)
{
    const int n = m.dim();
    const Jet j = eval_F(m, x, y, 3, JetVars::fiber, true);
    Tensor3 c(n);
    for (int i = 0; i < n; ++i) {
        for (int a = 0; a < n; ++a) {
            for (int b = 0; b < n; ++b) {
                c(i, a, b) = 0.25 * partial(j, i, a, b);
            }
        }
    }
    return c;
}

LocalJets local_jets(const MetricSpec& m, const Vec& x, const Vec& y, int order)
{
    if (order < 2) {
        throw OrderError("local jets need F^2 to order 2 at least");
    }
    const int n = m.dim();
    const int nv = 2 * n;
    const int d2 = order - 2;
    LocalJets lj;
    lj.n = n;
    lj.order = order;
    lj.F2 = eval_F(m, x, y, order, JetVars::mixed, true);

    std::vector<Jet> dy(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        dy[static_cast<std::size_t>(l)] = lj.F2.derivative(n + l);
    }
    lj.g.resize(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            lj.g[static_cast<std::size_t>(i * n + k)] = 0.5 * dy[static_cast<std::size_t>(i)].derivative(n + k);
        }
    }
    jet_inverse(lj.g, n, lj.g_inv, lj.det);

    lj.Y.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        lj.Y[static_cast<std::size_t>(k)] = Jet::variable(nv, d2, n + k, y[k]);
    }
    // w_l = (F^2)_{x^k y^l} y^k - (F^2)_{x^l};  G^i = g^{il} w_l / 4
    std::vector<Jet> w(static_cast<std::size_t>(n));
    for (int l = 0; l < n; ++l) {
        Jet wl = -lj.F2.derivative(l).truncated(d2);
        for (int k = 0; k < n; ++k) {
            wl += dy[static_cast<std::size_t>(l)].derivative(k) * lj.Y[static_cast<std::size_t>(k)];
        }
        w[static_cast<std::size_t>(l)] = wl;
    }
    lj.G.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Jet gi = lj.g_inv[static_cast<std::size_t>(i * n)] * w[0];
        for (int l = 1; l < n; ++l) {
            gi += lj.g_inv[static_cast<std::size_t>(i * n + l)] * w[static_cast<std::size_t>(l)];
        }
        lj.G[static_cast<std::size_t>(i)] = 0.25 * gi;
    }
    return lj;
}

Vec spray_coefficients(const MetricSpec& m, const Vec& x, const Vec& y)
{
    const LocalJets lj = local_jets(m, x, y, 2);
    Vec G(m.dim());
    for (int i = 0; i < m.dim(); ++i) {
        G[i] = lj.G[static_cast<std::size_t>(i)].value();
    }
    return G;
}

Mat berwald_curvature(const LocalJets& lj)
{
    const int n = lj.n;
    // R^i_k = 2 G^i_{x^k} - y^j G^i_{x^j y^k} + 2 G^j G^i_{y^j y^k} - G^i_{y^j} G^j_{y^k}
    Mat R = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const Jet& Gi = lj.G[static_cast<std::size_t>(i)];
        for (int k = 0; k < n; ++k) {
            double r = 2.0 * partial(Gi, k);
            for (int j = 0; j < n; ++j) {
                const Jet& Gj = lj.G[static_cast<std::size_t>(j)];
                r -= lj.Y[static_cast<std::size_t>(j)].value() * partial(Gi, j, n + k);
                r += 2.0 * Gj.value() * partial(Gi, n + j, n + k);
                r -= partial(Gi, n + j) * partial(Gj, n + k);
            }
            R(i, k) = r;
        }
    }
    return R;
}

CurvatureData riemann_endomorphism(const MetricSpec& m, const Vec& x, const Vec& y)
{
    const int n = m.dim();
    const LocalJets lj = local_jets(m, x, y, 4);
    CurvatureData d;
    d.y = y;
    d.g.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            d.g(i, k) = lj.g[static_cast<std::size_t>(i * n + k)].value();
        }
    }
    d.R = berwald_curvature(lj);
    d.ricci = d.R.trace();
    return d;
}

double CurvatureData::flag(const Vec& w) const
{
    const double yy = y.dot(g * y);
    const double ww = w.dot(g * w);
    const double yw = y.dot(g * w);
    const double den = yy * ww - yw * yw;
    if (den <= 1e-12 * yy * ww) {
        throw DegenerateFlag("flag vector is parallel to the pole");
    }
    return w.dot(g * (R * w)) / den;
}

} // namespace finsler
