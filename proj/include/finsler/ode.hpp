#pragma once

#include <Eigen/Core>

#include <functional>

namespace finsler {

// Geodesic plus variational state fits in 2 n^2 <= 18 entries.
using State = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 18, 1>;
using Rhs = std::function<void(const State& y, State& dy)>;

// One accepted step with its continuous extension.
struct Dopri5Step {
    double t0 = 0.0;
    double h = 0.0;
    State r1, r2, r3, r4, r5;
    State at(double t) const;
};

// Dormand-Prince 5(4) for autonomous systems. Stage evaluations that throw DomainError
// are treated as rejected steps; if the step then collapses, ChartExit is raised.
class Dopri5 {
public:
    Dopri5(Rhs f, double rtol, double atol) : f_(std::move(f)), rtol_(rtol), atol_(atol) {}

    // Advance (t, y) to exactly t_end.
    void integrate(double& t, State& y, double t_end,
                   const std::function<void(const Dopri5Step&)>& on_step = {});

    double step_hint = 0.0;
    long rhs_evals = 0;

private:
    Rhs f_;
    double rtol_;
    double atol_;
    State k1_;
    bool have_k1_ = false;
    State y_k1_;
};

} // namespace finsler
