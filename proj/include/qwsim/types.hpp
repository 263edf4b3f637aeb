#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace qwsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Event times are integer picoseconds; the counting card quantizes to 4 ps.
using TimePs = std::int64_t;
inline constexpr TimePs kCardGridPs = 4;
inline constexpr double kPicosecondsPerSecond = 1e12;

inline TimePs seconds_to_ps(double s) { return static_cast<TimePs>(s * kPicosecondsPerSecond); }
inline double ps_to_seconds(TimePs t) { return static_cast<double>(t) / kPicosecondsPerSecond; }

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qwsim
