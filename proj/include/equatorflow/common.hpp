#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace eqf {

using cplx = std::complex<double>;

inline constexpr char version_string[] = "0.1.0";

// Raised when a config file fails to parse or validate; message cites the
// offending line or field path.
class config_error : public std::runtime_error {
public:
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when an eigensolve cannot be certified (missed eigenvalue,
// unconverged inverse iteration, LAPACK failure).
class solver_error : public std::runtime_error {
public:
  explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised by branch tracking when a continuation is ambiguous.
class tracking_error : public std::runtime_error {
public:
  explicit tracking_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace eqf
