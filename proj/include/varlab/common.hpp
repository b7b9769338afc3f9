#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace varlab {

using cplx = std::complex<double>;

/// Raised by the experiment harness for malformed configurations.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[noreturn]] inline void domain_fail(const std::string& what) { throw std::domain_error(what); }

inline constexpr double kPi = 3.14159265358979323846;

}  // namespace varlab
