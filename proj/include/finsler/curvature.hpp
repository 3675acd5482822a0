#pragma once

#include "finsler/jets.hpp"
#include "finsler/metric.hpp"
#include "finsler/types.hpp"

#include <array>
#include <vector>

namespace finsler {

struct FundamentalTensor {
    Mat g;
    Mat g_inv;
};

class Tensor3 {
public:
    explicit Tensor3(int n) : n_(n) {}
    int dim() const { return n_; }
    double& operator()(int i, int j, int k) { return c_[static_cast<std::size_t>((i * n_ + j) * n_ + k)]; }
    double operator()(int i, int j, int k) const
    {
        return c_[static_cast<std::size_t>((i * n_ + j) * n_ + k)];
    }

private:
    int n_;
    std::array<double, kMaxDim * kMaxDim * kMaxDim> c_{};
};

struct CurvatureData {
    Vec y;
    Mat g;
    // R(i, k) = R^i_k
    Mat R;
    double ricci = 0.0;
    // g_y(R w, w) / (g_y(y,y) g_y(w,w) - g_y(y,w)^2); DegenerateFlag when w is parallel to y.
    double flag(const Vec& w) const;
};

FundamentalTensor fundamental_tensor(const MetricSpec& m, const Vec& x, const Vec& y);
Tensor3 cartan_tensor(const MetricSpec& m, const Vec& x, const Vec& y);
Vec spray_coefficients(const MetricSpec& m, const Vec& x, const Vec& y);
CurvatureData riemann_endomorphism(const MetricSpec& m, const Vec& x, const Vec& y);

// Jets over the 2n mixed variables (x first, then y) derived from one F^2 jet of the
// given order. g, g_inv, det and G carry order - 2.
struct LocalJets {
    int n = 0;
    int order = 0;
    Jet F2;
    std::vector<Jet> g;
    std::vector<Jet> g_inv;
    Jet det;
    std::vector<Jet> G;
    // y^i as jets of order - 2.
    std::vector<Jet> Y;
};

LocalJets local_jets(const MetricSpec& m, const Vec& x, const Vec& y, int order);

// Berwald curvature from spray jets of order >= 2.
Mat berwald_curvature(const LocalJets& lj);

// Value of d^|a+b| / dv_a dv_b at the expansion point (-1 skips an index).
double partial(const Jet& j, int a, int b = -1, int c = -1);

} // namespace finsler
