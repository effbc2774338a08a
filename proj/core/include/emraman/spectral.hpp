#pragma once

#include <array>

#include "emraman/params.hpp"

namespace emr {

// Hyperbolic symbol A(i zeta) in the (B, E, v_e, n_e, v_i, n_i) layout.
// with_epsilon = false zeroes every sqrt(epsilon) coupling.
Mat14 symbol_matrix(const PlasmaParams& p, const Frequency& zeta, bool with_epsilon);

// Real frequencies mu_j, eigenvalues being i mu_j; index j-1 holds lambda_j.
// At epsilon = 0: lambda_1 = sqrt(1+|zeta|^2), lambda_2 = sqrt(1+theta^2|zeta|^2),
// lambda_3 = 0, lambda_4 = -lambda_2, lambda_5 = -lambda_1. With epsilon > 0,
// lambda_1 = sqrt(1 + eps/theta^2 + |zeta|^2) and lambda_2, lambda_3 are the
// root pairs of the longitudinal quartic.
std::array<double, 5> eigenvalues(const PlasmaParams& p, const Frequency& zeta,
                                  bool with_epsilon);

// Roots mu^2 of the longitudinal quartic mu^4 - b mu^2 + c = 0, solved stably
// (larger root by the quadratic formula, smaller via the product of roots).
struct LongitudinalRoots {
  double mu2 = 0.0;        // Klein-Gordon-like branch (lambda_2)
  double mu3 = 0.0;        // acoustic branch (lambda_3), O(sqrt(eps) |zeta|)
  bool degenerate = false; // repeated root of the quadratic in mu^2
};
LongitudinalRoots longitudinal_roots(const PlasmaParams& p, double z);

// Closed-form gradient of lambda_j with respect to zeta at epsilon = 0.
Vec3 grad_lambda(const PlasmaParams& p, int j, const Frequency& zeta);

// Orthonormal transverse frame (u1, u2) of the plane perpendicular to zeta,
// with u1 of maximal overlap with (0,1,0); d = zeta/|zeta| (x-hat at zeta = 0).
struct TransverseFrame {
  Vec3 d, u1, u2;
};
TransverseFrame transverse_frame(const Frequency& zeta);

struct Eigenbasis {
  Vec14 e_perp, e_perp_prime;              // transverse, eigenvalue +i lambda_1
  Vec14 e_perp_minus, e_perp_prime_minus;  // transverse, eigenvalue -i lambda_1
  Vec14 e_par_plus, e_par_minus;           // longitudinal, +-i lambda_2
  Vec14 acoustic_plus, acoustic_minus;     // +-i lambda_3 (unit norm)
  std::array<Vec14, 6> kernel;             // basis of ker A(i zeta), zeta != 0
};
Eigenbasis eigenbasis(const PlasmaParams& p, const Frequency& zeta);

struct SpectralEntry {
  int label = 0;           // mode index 1..5
  double eigenvalue = 0.0; // real mu_j, epsilon-corrected
  Mat14 projector;         // epsilon = 0 spectral projector
};

struct SpectralDecomposition {
  Frequency frequency;
  std::array<SpectralEntry, 5> entries;
  Mat14 remainder; // R_A = (A(i zeta) - sum_j i lambda_j Pi_j) / sqrt(eps)

  const Mat14& proj(int j) const { return entries[j - 1].projector; }
  double lambda(int j) const { return entries[j - 1].eigenvalue; }
};
SpectralDecomposition spectral_decomposition(const PlasmaParams& p,
                                             const Frequency& zeta);

}  // namespace emr
