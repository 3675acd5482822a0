#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define FINSLER_ERROR(Name)                         \
    class Name : public Error {                     \
    public:                                         \
        explicit Name(const std::string& what)      \
            : Error(std::string(#Name ": ") + what) \
        {                                           \
        }                                           \
    }

FINSLER_ERROR(DomainError);
FINSLER_ERROR(OrderError);
FINSLER_ERROR(IndexError);
FINSLER_ERROR(ConvergenceError);
FINSLER_ERROR(QuadratureError);
FINSLER_ERROR(SingularMatrix);
FINSLER_ERROR(DegenerateFlag);
FINSLER_ERROR(BadN);
FINSLER_ERROR(StepFailure);
FINSLER_ERROR(ChartExit);
FINSLER_ERROR(PoleError);
FINSLER_ERROR(BadDimension);
FINSLER_ERROR(GridTooCoarse);
FINSLER_ERROR(ConfigError);

#undef FINSLER_ERROR

// Carries the radius at which the polar Jacobian lost rank.
class DegenerateJacobian : public Error {
public:
    DegenerateJacobian(double radius, const std::string& what)
        : Error("DegenerateJacobian: " + what), radius_(radius)
    {
    }
    double radius() const { return radius_; }

private:
    double radius_;
};

} // namespace finsler
