#pragma once

#include <Eigen/Dense>

#include <span>

namespace finsler {

// Catalog dimensions are 2 and 3; the fixed capacity keeps small matrices on the stack.
inline constexpr int kMaxDim = 3;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

inline std::span<const double> as_span(const Vec& v)
{
    return {v.data(), static_cast<std::size_t>(v.size())};
}

inline Vec to_vec(std::span<const double> s)
{
    Vec v(static_cast<Eigen::Index>(s.size()));
    for (std::size_t i = 0; i < s.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = s[i];
    }
    return v;
}

} // namespace finsler
