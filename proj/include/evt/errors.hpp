#ifndef EVT_ERRORS_HPP
#define EVT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace evt {

// Caller passed an argument outside the documented domain.
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& msg) : std::domain_error(msg) {}
};

// The operation is not defined for this model/configuration (e.g. no
// closed-form A(t) registered). Distinct from domain_error so callers can
// tell "bad value" from "wrong family".
class capability_error : public std::runtime_error {
public:
    explicit capability_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input data violates a contract (non-numeric rows, nonpositive values
// where positivity is required, ...).
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A map hit a singular surface (e.g. the PWM g-map denominator x - 2y = 0).
class singularity_error : public std::runtime_error {
public:
    explicit singularity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Quadrature failed to converge within the subdivision budget. Carries the
// partial value and the error estimate at the point of failure.
class quadrature_error : public std::runtime_error {
public:
    quadrature_error(const std::string& msg, double partial, double estimate)
        : std::runtime_error(msg), partial_value(partial), error_estimate(estimate) {}
    double partial_value;
    double error_estimate;
};

} // namespace evt

#endif
