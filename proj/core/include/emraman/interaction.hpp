#pragma once

#include <map>
#include <optional>
#include <vector>

#include "emraman/resonance.hpp"
#include "emraman/spectral.hpp"

namespace emr {

// Leading linearized source B_p applied to a state: E-row n_e vhat, v_e-row
// -theta_e(vhat x B + ipk v_e x vhat' + ipk v_e1 vhat), ionic rows zero;
// vhat = (0,1,0), vhat' = (0,0,1).
Vec14 source_action(const PlasmaParams& p, int p_harmonic, const Vec14& u);
Mat14 source_matrix(const PlasmaParams& p, int p_harmonic);

// B_{p j j'}(zeta) = Pi_j(zeta + p k) B_p Pi_j'(zeta), epsilon = 0 projectors.
Mat14 interaction_matrix(const PlasmaParams& p, int p_harmonic, int j, int jp,
                         const Frequency& zeta);

// tr B_{1jj'}(zeta) B_{-1j'j}(zeta + k).
cd resonance_trace(const PlasmaParams& p, PairLabel pair, const Frequency& zeta);

// Closed forms of the trace on the axis; nullopt for pairs without one.
std::optional<cd> trace_closed_form(const PlasmaParams& p, PairLabel pair,
                                    double xi);

// |<B_{-p} e_perp(+p side), e_acoustic>| for the (1,3)/(3,5) pairs with the
// epsilon > 0 acoustic eigenvector (O(sqrt(eps)) bound, maxed over branches).
double acoustic_coupling(const PlasmaParams& p, PairLabel pair, double xi);

struct ScalarizeResult {
  cd c12 = 0.0, c21 = 0.0;
  Mat14 P1, P2;     // unitary completions; first columns span the two ranges
  double residual;  // worst sigma_2/sigma_1 rank-1 defect
};
ScalarizeResult scalarize(const Mat14& C12, const Mat14& C21);

struct GrowthRateReport {
  std::map<std::pair<int, int>, double> gamma_per_pair;
  double gamma = 0.0;
  PairLabel argmax_pair;
  double argmax_xi = 0.0;
  double amplitude_max = 1.0;
  bool stable = false;           // |k| below the existence threshold
  double acoustic_bound = 0.0;   // O(sqrt(eps)) coupling bound for (1,3)/(3,5)
};
GrowthRateReport growth_rates(const PlasmaParams& p, double amplitude_max);

// Backward/forward Raman rates in the growth-rate-figure normalization:
// the k-dependence of the leading rate curve, carrying a sqrt(theta_e)
// amplitude scaling so that backward ~ amplitude*sqrt(|k| theta_e) and
// forward ~ amplitude*sqrt(theta_e)/(2 sqrt(|k|)) for large |k|.
struct RamanRatePair {
  double backward = 0.0;
  double forward = 0.0;
};
RamanRatePair raman_rate_asymptotics(const PlasmaParams& p,
                                     double amplitude_max);

enum class RamanClass { stable, unstable_backward, unstable_forward, transparent };

struct RamanEntry {
  PairLabel pair;
  double xi = 0.0;
  cd trace = 0.0;
  RamanClass cls = RamanClass::stable;
};
std::vector<RamanEntry> classify_raman(const PlasmaParams& p);

}  // namespace emr
