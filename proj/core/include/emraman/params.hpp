#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace emr {

using cd = std::complex<double>;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;
using Vec14 = Eigen::Vector<cd, 14>;
using Mat14 = Eigen::Matrix<cd, 14, 14>;

// State layout: B 0..2, E 3..5, v_e 6..8, n_e 9, v_i 10..12, n_i 13.
inline constexpr int IB = 0;
inline constexpr int IE = 3;
inline constexpr int IVE = 6;
inline constexpr int INE = 9;
inline constexpr int IVI = 10;
inline constexpr int INI = 13;

struct PlasmaParams {
  double epsilon = 0.0;
  double theta_e = 0.1;
  double alpha_ie = 0.0;
  double k = 3.0;

  double omega() const { return std::sqrt(1.0 + k * k); }

  void validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0))
      throw std::invalid_argument("epsilon must lie in [0, 1]");
    if (!(theta_e > 0.0 && theta_e <= 1.0))
      throw std::invalid_argument("theta_e must lie in (0, 1]");
    if (!(alpha_ie >= 0.0))
      throw std::invalid_argument("alpha_ie must be nonnegative");
    if (!(k != 0.0) || !std::isfinite(k))
      throw std::invalid_argument("k must be finite and nonzero");
  }
};

struct Frequency {
  double xi = 0.0;
  Vec2 eta = Vec2::Zero();

  Frequency() = default;
  Frequency(double xi_, double eta1, double eta2 = 0.0) : xi(xi_), eta(eta1, eta2) {}

  double r() const { return eta.norm(); }
  double norm() const { return std::sqrt(xi * xi + eta.squaredNorm()); }
  Vec3 vec() const { return Vec3(xi, eta(0), eta(1)); }
};

// Hermitian product, linear in the left slot, conjugate-linear in the right.
inline cd herm(const Vec14& u, const Vec14& w) { return w.dot(u); }

// Raised when the requested computation is outside its validity regime
// (as opposed to a usage error).
struct RegimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace emr
