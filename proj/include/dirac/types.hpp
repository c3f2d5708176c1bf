#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dirac {

using cplx = std::complex<double>;
using Field = std::function<double(double)>;

inline constexpr cplx I{0.0, 1.0};
inline constexpr const char* kVersion = "0.3.0";

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Geometry { Line, HalfLine };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& s);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    // half-open so that adjacent windows partition the rows exactly
    bool contains(double x) const { return x >= lo && x < hi; }
};

// Pauli matrices in the (psi1, psi2) basis.
Eigen::Matrix2cd sigma1();
Eigen::Matrix2cd sigma2();
Eigen::Matrix2cd sigma3();

}  // namespace dirac
