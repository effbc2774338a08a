#pragma once

#include <functional>
#include <ostream>

#include "emraman/params.hpp"

namespace emr {

// Periodic grid in (x, Y): one longitudinal direction plus a transverse Y of
// dimension 1 or 2, all with the same period and point count.
struct ZakharovGrid {
  int dim_y = 1;        // transverse dimension; total grid dimension 1 + dim_y
  int n = 128;          // points per direction (power of two)
  double length = 40.0; // period per direction

  int dim() const { return 1 + dim_y; }
  int total() const;
  double spacing() const { return length / n; }
  Eigen::Vector3d point(int idx) const; // (x, y1, y2), unused entries zero
  void validate() const;
};

// Envelope state: E is the complex scalar amplitude of the transverse pump,
// n the (real) low-frequency density perturbation.
struct ZakharovState {
  PlasmaParams params;
  ZakharovGrid grid;
  double time = 0.0;
  Eigen::VectorXcd E;
  Eigen::VectorXd n, n_t;
  double n_imag_residual = 0.0; // max residual imaginary part, last step

  double mass() const;          // integral of |E|^2
  double amplitude_max() const; // max |E| / omega, recovering max |g|
};

// E = i omega a, n = n_t = 0; the envelope must be supported within a quarter
// period of the box center.
ZakharovState init_from_wkb(
    const std::function<cd(const Eigen::Vector3d&)>& a_envelope,
    const PlasmaParams& p, const ZakharovGrid& grid);

// Leading WKB fields carried by the scalar envelope g at harmonic p = +/-1.
struct WkbLeadingFields {
  Vec3c E0;
  Vec3c B0;
};
WkbLeadingFields wkb_leading_fields(const PlasmaParams& p, int p_harmonic,
                                    cd g);

// One Strang step: exact Fourier multiplier for transport + dispersion +
// constant phase, pointwise nonlinear rotation of E by the exact time
// integral of n, and an exact per-mode driven-oscillator update for n with
// the source frozen over the step. coupling = false switches off the
// nonlinearity (free Schroedinger / free wave).
void zakharov_step(ZakharovState& state, double dt, bool coupling = true);

struct ZakharovReport {
  ZakharovState final;
  double mass_drift = 0.0;     // relative, against the initial mass
  double amplitude_max = 0.0;  // max over the run of max_grid |E| / omega
};
ZakharovReport run_and_report(ZakharovState state, double T, double dt,
                              bool coupling = true);

// Flattened grid CSV: coordinates, Re E, Im E, n, n_t.
void write_state_csv(const ZakharovState& state, std::ostream& os);

}  // namespace emr
