#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace finsler {

inline constexpr int kMaxJetOrder = 6;
inline constexpr int kMaxJetVars = 8;

class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> exponents);
    explicit MultiIndex(std::span<const int> exponents);

    static MultiIndex zero(int num_vars);
    static MultiIndex unit(int num_vars, int var);

    int size() const { return n_; }
    int operator[](int i) const { return e_[static_cast<std::size_t>(i)]; }
    int degree() const;
    MultiIndex plus(int var) const;
    // Packed 4-bit exponents; unique per index for fixed size.
    std::uint64_t key() const;

    friend bool operator==(const MultiIndex& a, const MultiIndex& b)
    {
        return a.n_ == b.n_ && a.e_ == b.e_;
    }

private:
    std::array<std::uint8_t, kMaxJetVars> e_{};
    int n_ = 0;
};

// Graded-lexicographic enumeration of all multi-indices up to a total degree,
// with the Leibniz product table. Lower orders are prefixes of higher ones.
class JetLayout {
public:
    struct Term {
        std::uint16_t out, a, b;
        double coef;
    };

    static const JetLayout& get(int num_vars, int order);

    int num_vars() const { return num_vars_; }
    int order() const { return order_; }
    int size() const { return static_cast<int>(indices_.size()); }
    const MultiIndex& index(int pos) const { return indices_[static_cast<std::size_t>(pos)]; }
    // -1 when the degree exceeds the order.
    int position(const MultiIndex& idx) const;

    const std::vector<Term>& product_terms() const { return product_; }
    // For position k of the order-1 layout, the position of index(k)+e_var here.
    const std::vector<std::uint16_t>& derivative_source(int var) const
    {
        return deriv_src_[static_cast<std::size_t>(var)];
    }

    JetLayout(int num_vars, int order);

private:
    int num_vars_;
    int order_;
    std::vector<MultiIndex> indices_;
    std::vector<std::uint64_t> sorted_keys_;
    std::vector<int> sorted_pos_;
    std::vector<Term> product_;
    std::vector<std::vector<std::uint16_t>> deriv_src_;
};

// Truncated multivariate Taylor data holding raw partial derivatives.
class Jet {
public:
    Jet() = default;

    static Jet constant(int num_vars, int order, double value);
    static Jet variable(int num_vars, int order, int var, double value);

    int num_vars() const { return layout_->num_vars(); }
    int order() const { return layout_->order(); }
    const JetLayout& layout() const { return *layout_; }
    double value() const { return c_[0]; }
    std::span<const double> coeffs() const { return c_; }
    double coeff(int pos) const { return c_[static_cast<std::size_t>(pos)]; }
    double extract(const MultiIndex& idx) const;

    // Partial derivative in one variable; the result has order one less.
    Jet derivative(int var) const;
    Jet truncated(int order) const;
    // Re-express in a wider variable set, variable i becoming offset + i.
    Jet embedded(int num_vars, int offset) const;

    Jet operator-() const;
    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o);
    Jet& operator/=(const Jet& o);
    Jet& operator+=(double s);
    Jet& operator-=(double s);
    Jet& operator*=(double s);
    Jet& operator/=(double s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator/(const Jet& a, const Jet& b);
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a -= s; }
    friend Jet operator-(double s, const Jet& a) { return -a + s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a /= s; }
    friend Jet operator/(double s, const Jet& a);

    // f(u) from the derivatives f^(k)(u.value()), k = 0..order.
    friend Jet compose(const Jet& u, std::span<const double> derivs);

private:
    Jet(const JetLayout* layout, std::vector<double> c) : layout_(layout), c_(std::move(c)) {}
    const JetLayout* layout_ = nullptr;
    std::vector<double> c_;
};

Jet compose(const Jet& u, std::span<const double> derivs);
Jet reciprocal(const Jet& u);
Jet sqrt(const Jet& u);
Jet exp(const Jet& u);
Jet log(const Jet& u);
Jet pow(const Jet& u, double a);
Jet sin(const Jet& u);
Jet cos(const Jet& u);
Jet sinh(const Jet& u);
Jet cosh(const Jet& u);

// Seeds one variable per coordinate of the point and evaluates the program.
template <class Program>
Jet jet_eval(Program&& program, std::span<const double> point, int order)
{
    const int k = static_cast<int>(point.size());
    std::vector<Jet> vars;
    vars.reserve(point.size());
    for (int i = 0; i < k; ++i) {
        vars.push_back(Jet::variable(k, order, i, point[static_cast<std::size_t>(i)]));
    }
    return program(std::span<const Jet>(vars));
}

} // namespace finsler
