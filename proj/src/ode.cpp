#include "finsler/ode.hpp"

#include "finsler/errors.hpp"

#include <algorithm>
#include <cmath>

namespace finsler {

namespace {

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Shampine's dense output.
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

} // namespace

State Dopri5Step::at(double t) const
{
    const double th = (t - t0) / h;
    const double th1 = 1.0 - th;
    return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
}

void Dopri5::integrate(double& t, State& y, double t_end, const std::function<void(const Dopri5Step&)>& on_step)
{
    const auto dim = y.size();
    if (!have_k1_ || y_k1_.size() != dim || y_k1_ != y) {
        k1_.resize(dim);
        f_(y, k1_);
        ++rhs_evals;
    }
    double h = step_hint > 0.0 ? step_hint : std::min(0.05, t_end - t);
    State k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim), yt(dim), y1(dim);
    bool last_failure_domain = false;
    while (t < t_end) {
        const double remaining = t_end - t;
        bool final_step = false;
        if (h >= remaining * (1.0 - 1e-12)) {
            h = remaining;
            final_step = true;
        }
        if (h <= 1e-13 * std::max(1.0, std::abs(t))) {
            if (last_failure_domain) {
                throw ChartExit("geodesic left the chart near t = " + std::to_string(t));
            }
            throw StepFailure("step size collapsed at t = " + std::to_string(t));
        }
        double err = 0.0;
        try {
            yt = y + h * a21 * k1_;
            f_(yt, k2);
            yt = y + h * (a31 * k1_ + a32 * k2);
            f_(yt, k3);
            yt = y + h * (a41 * k1_ + a42 * k2 + a43 * k3);
            f_(yt, k4);
            yt = y + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4);
            f_(yt, k5);
            yt = y + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f_(yt, k6);
            y1 = y + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            f_(y1, k7);
            rhs_evals += 6;
            const State e = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            for (Eigen::Index i = 0; i < dim; ++i) {
                const double sc = atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y1[i]));
                err += (e[i] / sc) * (e[i] / sc);
            }
            err = std::sqrt(err / static_cast<double>(dim));
            last_failure_domain = false;
        } catch (const DomainError&) {
            last_failure_domain = true;
            h *= 0.25;
            continue;
        }
        if (!std::isfinite(err)) {
            last_failure_domain = false;
            h *= 0.25;
            continue;
        }
        if (err <= 1.0) {
            if (on_step) {
                Dopri5Step s;
                s.t0 = t;
                s.h = h;
                s.r1 = y;
                s.r2 = y1 - y;
                s.r3 = h * k1_ - s.r2;
                s.r4 = s.r2 - h * k7 - s.r3;
                s.r5 = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                on_step(s);
            }
            t = final_step ? t_end : t + h;
            y = y1;
            k1_ = k7;
            const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            // Keep the free-running step when the last one was clipped to land on t_end.
            if (!final_step) {
                step_hint = h * fac;
            } else {
                step_hint = std::max(step_hint, h * fac);
            }
            h = step_hint;
        } else {
            h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 1.0);
        }
    }
    have_k1_ = true;
    y_k1_ = y;
}

} // namespace finsler
