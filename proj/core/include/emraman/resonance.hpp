#pragma once

#include <optional>
#include <string>
#include <vector>

#include "emraman/params.hpp"

namespace emr {

struct PairLabel {
  int j = 1, jp = 2; // ordered, j < jp
  bool valid() const { return 1 <= j && j < jp && jp <= 5; }
};

struct ResonanceRecord {
  PairLabel pair;
  Frequency zeta;
  double phase_residual = 0.0; // |Phi| at the root
  Vec2 nu = Vec2::Zero();      // transverse group velocity mismatch d_eta Phi
  bool is_space_time = false;
};

// Phi_{jj'}(zeta) = lambda_j(xi + k, eta) - lambda_j'(xi, eta) - omega and its
// eta-gradient, at epsilon = 0 (lambda_3 taken identically 0).
struct PhaseValue {
  double phi = 0.0;
  Vec2 dphi_deta = Vec2::Zero();
};
PhaseValue phase_and_gradient(const PlasmaParams& p, PairLabel pair,
                              const Frequency& zeta);

// Roots of xi -> Phi(xi, 0) on [xi_min, xi_max]: sign-change scan + bisection.
std::vector<ResonanceRecord> find_axis_resonances(const PlasmaParams& p,
                                                  PairLabel pair, double xi_min,
                                                  double xi_max,
                                                  double tol = 1e-12);

// Default axis scan window containing all resonances.
void default_scan_window(const PlasmaParams& p, double& xi_min, double& xi_max);

// Level set {Phi = 0} in the (xi, r = |eta|) half-plane by marching squares.
struct CurvePoint {
  double xi = 0.0, r = 0.0;
};
struct GridSpec {
  double xi_min, xi_max, r_min, r_max;
  int n_xi = 200, n_r = 200;
};
std::vector<CurvePoint> resonance_curve(const PlasmaParams& p, PairLabel pair,
                                        const GridSpec& grid);

// Space-time resonances S_{jj'} = R_{jj'} cap {eta = 0}; requires the
// parameter condition sqrt(1+k^2) <= (1 - theta^2)/theta^2.
std::vector<ResonanceRecord> space_time_resonances(const PlasmaParams& p,
                                                   PairLabel pair);

struct Thresholds {
  double k_c = 0.0;            // (1,4)/(2,5) existence threshold
  double k_min = 0.0;          // (2,3)/(3,4) emptiness threshold (inf if none)
  bool cond_k_thetae = false;  // sqrt(1+k^2) <= (1-theta^2)/theta^2
};
Thresholds thresholds(const PlasmaParams& p);

struct SeparationEntry {
  std::string name;
  bool expected_empty = true;
  bool empty = true;
  double min_joint_residual = 0.0; // min over grid of max(|Phi_a|, |Phi_b|)
};
struct SeparationReport {
  std::vector<SeparationEntry> entries;
  bool all_as_expected = true;
};
SeparationReport separation_report(const PlasmaParams& p, double delta_res);

enum class CutoffVariant { flat, base, sharp, tilde_ };

// Smooth plateau profile: 1 on [0,1], 0 outside [0,2].
double chi0(double t);

// chi_{jj'}(zeta) = chi0(C sqrt(Phi^2 + (delta/6)^2)/delta); 0 for pairs
// that are not resonant.
double cutoff_chi(const PlasmaParams& p, PairLabel pair, double delta_res,
                  CutoffVariant variant, const Frequency& zeta);

bool pair_is_resonant(const PlasmaParams& p, PairLabel pair);

}  // namespace emr
