#include "finsler/jets.hpp"

#include "finsler/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>

namespace finsler {

MultiIndex::MultiIndex(std::initializer_list<int> exponents)
    : MultiIndex(std::span<const int>(exponents.begin(), exponents.size()))
{
}

MultiIndex::MultiIndex(std::span<const int> exponents)
{
    if (exponents.size() > static_cast<std::size_t>(kMaxJetVars)) {
        throw IndexError("multi-index has more than " + std::to_string(kMaxJetVars) + " entries");
    }
    n_ = static_cast<int>(exponents.size());
    for (std::size_t i = 0; i < exponents.size(); ++i) {
        if (exponents[i] < 0 || exponents[i] > 15) {
            throw IndexError("multi-index exponent out of range");
        }
        e_[i] = static_cast<std::uint8_t>(exponents[i]);
    }
}

MultiIndex MultiIndex::zero(int num_vars)
{
    MultiIndex m;
    m.n_ = num_vars;
    return m;
}

MultiIndex MultiIndex::unit(int num_vars, int var)
{
    return zero(num_vars).plus(var);
}

int MultiIndex::degree() const
{
    int d = 0;
    for (int i = 0; i < n_; ++i) {
        d += e_[static_cast<std::size_t>(i)];
    }
    return d;
}

MultiIndex MultiIndex::plus(int var) const
{
    MultiIndex m = *this;
    ++m.e_[static_cast<std::size_t>(var)];
    return m;
}

std::uint64_t MultiIndex::key() const
{
    std::uint64_t k = 0;
    for (int i = 0; i < n_; ++i) {
        k = (k << 4) | e_[static_cast<std::size_t>(i)];
    }
    return k;
}

namespace {

void enumerate_degree(int num_vars, int degree, int var, std::vector<int>& cur,
                      std::vector<MultiIndex>& out)
{
    if (var == num_vars - 1) {
        cur[static_cast<std::size_t>(var)] = degree;
        out.emplace_back(std::span<const int>(cur));
        return;
    }
    for (int e = degree; e >= 0; --e) {
        cur[static_cast<std::size_t>(var)] = e;
        enumerate_degree(num_vars, degree - e, var + 1, cur, out);
    }
}

double binomial(int n, int k)
{
    double r = 1.0;
    for (int i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

} // namespace

JetLayout::JetLayout(int num_vars, int order) : num_vars_(num_vars), order_(order)
{
    std::vector<int> cur(static_cast<std::size_t>(num_vars), 0);
    for (int d = 0; d <= order; ++d) {
        enumerate_degree(num_vars, d, 0, cur, indices_);
    }
    std::vector<std::pair<std::uint64_t, int>> keyed;
    keyed.reserve(indices_.size());
    for (int i = 0; i < size(); ++i) {
        keyed.emplace_back(indices_[static_cast<std::size_t>(i)].key(), i);
    }
    std::sort(keyed.begin(), keyed.end());
    for (const auto& [k, p] : keyed) {
        sorted_keys_.push_back(k);
        sorted_pos_.push_back(p);
    }

    for (int a = 0; a < size(); ++a) {
        const MultiIndex& ia = index(a);
        for (int b = 0; b < size(); ++b) {
            const MultiIndex& ib = index(b);
            if (ia.degree() + ib.degree() > order) {
                continue;
            }
            std::vector<int> sum(static_cast<std::size_t>(num_vars));
            double coef = 1.0;
            for (int v = 0; v < num_vars; ++v) {
                sum[static_cast<std::size_t>(v)] = ia[v] + ib[v];
                coef *= binomial(ia[v] + ib[v], ia[v]);
            }
            const int out = position(MultiIndex(std::span<const int>(sum)));
            product_.push_back({static_cast<std::uint16_t>(out), static_cast<std::uint16_t>(a),
                                static_cast<std::uint16_t>(b), coef});
        }
    }
    std::sort(product_.begin(), product_.end(),
              [](const Term& x, const Term& y) { return x.out < y.out; });

    if (order > 0) {
        deriv_src_.resize(static_cast<std::size_t>(num_vars));
        const int lower = static_cast<int>(
            std::count_if(indices_.begin(), indices_.end(),
                          [order](const MultiIndex& m) { return m.degree() < order; }));
        for (int v = 0; v < num_vars; ++v) {
            auto& src = deriv_src_[static_cast<std::size_t>(v)];
            src.resize(static_cast<std::size_t>(lower));
            for (int k = 0; k < lower; ++k) {
                src[static_cast<std::size_t>(k)] =
                    static_cast<std::uint16_t>(position(index(k).plus(v)));
            }
        }
    }
}

int JetLayout::position(const MultiIndex& idx) const
{
    if (idx.size() != num_vars_ || idx.degree() > order_) {
        return -1;
    }
    const auto it = std::lower_bound(sorted_keys_.begin(), sorted_keys_.end(), idx.key());
    return sorted_pos_[static_cast<std::size_t>(it - sorted_keys_.begin())];
}

const JetLayout& JetLayout::get(int num_vars, int order)
{
    if (order < 0 || order > kMaxJetOrder) {
        throw OrderError("jet order " + std::to_string(order) + " outside [0, " +
                         std::to_string(kMaxJetOrder) + "]");
    }
    if (num_vars < 1 || num_vars > kMaxJetVars) {
        throw OrderError("jet width " + std::to_string(num_vars) + " outside [1, " +
                         std::to_string(kMaxJetVars) + "]");
    }
    constexpr std::size_t slots = (kMaxJetVars + 1) * (kMaxJetOrder + 1);
    static std::array<std::atomic<const JetLayout*>, slots> cache{};
    static std::array<std::unique_ptr<JetLayout>, slots> owned;
    static std::mutex mutex;
    const auto slot = static_cast<std::size_t>(num_vars * (kMaxJetOrder + 1) + order);
    if (const JetLayout* p = cache[slot].load(std::memory_order_acquire)) {
        return *p;
    }
    std::lock_guard lock(mutex);
    if (!owned[slot]) {
        owned[slot] = std::make_unique<JetLayout>(num_vars, order);
        cache[slot].store(owned[slot].get(), std::memory_order_release);
    }
    return *owned[slot];
}

Jet Jet::constant(int num_vars, int order, double value)
{
    const JetLayout& l = JetLayout::get(num_vars, order);
    std::vector<double> c(static_cast<std::size_t>(l.size()), 0.0);
    c[0] = value;
    return Jet(&l, std::move(c));
}

Jet Jet::variable(int num_vars, int order, int var, double value)
{
    Jet j = constant(num_vars, order, value);
    if (var < 0 || var >= num_vars) {
        throw IndexError("variable index out of range");
    }
    if (order > 0) {
        j.c_[static_cast<std::size_t>(1 + var)] = 1.0;
    }
    return j;
}

double Jet::extract(const MultiIndex& idx) const
{
    if (idx.size() != num_vars()) {
        throw IndexError("multi-index width " + std::to_string(idx.size()) +
                         " does not match jet width " + std::to_string(num_vars()));
    }
    if (idx.degree() > order()) {
        throw IndexError("degree " + std::to_string(idx.degree()) + " exceeds jet order " +
                         std::to_string(order()));
    }
    return c_[static_cast<std::size_t>(layout_->position(idx))];
}

Jet Jet::derivative(int var) const
{
    if (order() == 0) {
        throw OrderError("cannot differentiate an order-0 jet");
    }
    const auto& src = layout_->derivative_source(var);
    std::vector<double> c(src.size());
    for (std::size_t k = 0; k < src.size(); ++k) {
        c[k] = c_[src[k]];
    }
    return Jet(&JetLayout::get(num_vars(), order() - 1), std::move(c));
}

Jet Jet::truncated(int order) const
{
    if (order >= this->order()) {
        return *this;
    }
    const JetLayout& l = JetLayout::get(num_vars(), order);
    return Jet(&l, std::vector<double>(c_.begin(), c_.begin() + l.size()));
}

Jet Jet::embedded(int num_vars, int offset) const
{
    if (offset < 0 || offset + this->num_vars() > num_vars) {
        throw IndexError("embedding does not fit the target width");
    }
    Jet out = constant(num_vars, order(), 0.0);
    std::vector<int> e(static_cast<std::size_t>(num_vars), 0);
    for (int k = 0; k < layout_->size(); ++k) {
        const MultiIndex& m = layout_->index(k);
        std::fill(e.begin(), e.end(), 0);
        for (int i = 0; i < m.size(); ++i) {
            e[static_cast<std::size_t>(offset + i)] = m[i];
        }
        const int pos = out.layout_->position(MultiIndex(std::span<const int>(e)));
        out.c_[static_cast<std::size_t>(pos)] = c_[static_cast<std::size_t>(k)];
    }
    return out;
}

namespace {

void check_compatible(const Jet& a, const Jet& b)
{
    if (a.num_vars() != b.num_vars()) {
        throw std::invalid_argument("jets over different variable sets");
    }
}

} // namespace

Jet Jet::operator-() const
{
    Jet r = *this;
    for (double& v : r.c_) {
        v = -v;
    }
    return r;
}

Jet& Jet::operator+=(const Jet& o)
{
    check_compatible(*this, o);
    if (o.order() < order()) {
        *this = truncated(o.order());
    }
    for (std::size_t k = 0; k < c_.size(); ++k) {
        c_[k] += o.c_[k];
    }
    return *this;
}

Jet& Jet::operator-=(const Jet& o)
{
    check_compatible(*this, o);
    if (o.order() < order()) {
        *this = truncated(o.order());
    }
    for (std::size_t k = 0; k < c_.size(); ++k) {
        c_[k] -= o.c_[k];
    }
    return *this;
}

Jet& Jet::operator*=(const Jet& o)
{
    *this = *this * o;
    return *this;
}

Jet& Jet::operator/=(const Jet& o)
{
    *this = *this / o;
    return *this;
}

Jet& Jet::operator+=(double s)
{
    c_[0] += s;
    return *this;
}

Jet& Jet::operator-=(double s)
{
    c_[0] -= s;
    return *this;
}

Jet& Jet::operator*=(double s)
{
    for (double& v : c_) {
        v *= s;
    }
    return *this;
}

Jet& Jet::operator/=(double s)
{
    if (s == 0.0) {
        throw DomainError("division by zero");
    }
    for (double& v : c_) {
        v /= s;
    }
    return *this;
}

Jet operator*(const Jet& a, const Jet& b)
{
    check_compatible(a, b);
    const JetLayout* l = a.order() <= b.order() ? a.layout_ : b.layout_;
    std::vector<double> c(static_cast<std::size_t>(l->size()), 0.0);
    const double* pa = a.c_.data();
    const double* pb = b.c_.data();
    for (const auto& t : l->product_terms()) {
        c[t.out] += t.coef * pa[t.a] * pb[t.b];
    }
    return Jet(l, std::move(c));
}

Jet operator/(const Jet& a, const Jet& b)
{
    return a * reciprocal(b);
}

Jet operator/(double s, const Jet& a)
{
    return reciprocal(a) * s;
}

Jet compose(const Jet& u, std::span<const double> derivs)
{
    const int d = u.order();
    if (static_cast<int>(derivs.size()) < d + 1) {
        throw OrderError("composition needs derivatives up to the jet order");
    }
    Jet delta = u;
    delta.c_[0] = 0.0;
    // Horner in delta: f(u0 + delta) = sum_k f^(k)(u0)/k! delta^k.
    double fact = 1.0;
    for (int k = 1; k <= d; ++k) {
        fact *= k;
    }
    Jet acc = Jet::constant(u.num_vars(), d, derivs[static_cast<std::size_t>(d)] / fact);
    for (int k = d - 1; k >= 0; --k) {
        fact /= (k + 1);
        acc = acc * delta;
        acc.c_[0] += derivs[static_cast<std::size_t>(k)] / fact;
    }
    return acc;
}

namespace {

std::array<double, kMaxJetOrder + 1> power_derivatives(double u0, double a, int order)
{
    std::array<double, kMaxJetOrder + 1> d{};
    double falling = 1.0;
    for (int k = 0; k <= order; ++k) {
        d[static_cast<std::size_t>(k)] = falling * std::pow(u0, a - k);
        falling *= (a - k);
    }
    return d;
}

Jet compose_array(const Jet& u, const std::array<double, kMaxJetOrder + 1>& d)
{
    return compose(u, std::span<const double>(d.data(), static_cast<std::size_t>(u.order() + 1)));
}

} // namespace

Jet reciprocal(const Jet& u)
{
    if (u.value() == 0.0) {
        throw DomainError("division by zero");
    }
    return compose_array(u, power_derivatives(u.value(), -1.0, u.order()));
}

Jet sqrt(const Jet& u)
{
    if (!(u.value() > 0.0)) {
        throw DomainError("sqrt of non-positive value " + std::to_string(u.value()));
    }
    return compose_array(u, power_derivatives(u.value(), 0.5, u.order()));
}

Jet pow(const Jet& u, double a)
{
    const bool nonneg_int = a >= 0.0 && a == std::floor(a);
    if (nonneg_int) {
        Jet r = Jet::constant(u.num_vars(), u.order(), 1.0);
        for (int k = 0; k < static_cast<int>(a); ++k) {
            r = r * u;
        }
        return r;
    }
    if (!(u.value() > 0.0)) {
        throw DomainError("non-integer power of non-positive value");
    }
    return compose_array(u, power_derivatives(u.value(), a, u.order()));
}

Jet exp(const Jet& u)
{
    std::array<double, kMaxJetOrder + 1> d{};
    d.fill(std::exp(u.value()));
    return compose_array(u, d);
}

Jet log(const Jet& u)
{
    const double u0 = u.value();
    if (!(u0 > 0.0)) {
        throw DomainError("log of non-positive value");
    }
    std::array<double, kMaxJetOrder + 1> d{};
    d[0] = std::log(u0);
    double f = 1.0;
    for (int k = 1; k <= u.order(); ++k) {
        d[static_cast<std::size_t>(k)] = ((k % 2 == 1) ? 1.0 : -1.0) * f / std::pow(u0, k);
        f *= k;
    }
    return compose_array(u, d);
}

namespace {

Jet periodic(const Jet& u, std::array<double, 4> cycle)
{
    std::array<double, kMaxJetOrder + 1> d{};
    for (int k = 0; k <= u.order(); ++k) {
        d[static_cast<std::size_t>(k)] = cycle[static_cast<std::size_t>(k % 4)];
    }
    return compose_array(u, d);
}

} // namespace

Jet sin(const Jet& u)
{
    const double s = std::sin(u.value()), c = std::cos(u.value());
    return periodic(u, {s, c, -s, -c});
}

Jet cos(const Jet& u)
{
    const double s = std::sin(u.value()), c = std::cos(u.value());
    return periodic(u, {c, -s, -c, s});
}

Jet sinh(const Jet& u)
{
    const double s = std::sinh(u.value()), c = std::cosh(u.value());
    return periodic(u, {s, c, s, c});
}

Jet cosh(const Jet& u)
{
    const double s = std::sinh(u.value()), c = std::cosh(u.value());
    return periodic(u, {c, s, c, s});
}

} // namespace finsler
