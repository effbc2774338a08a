#pragma once

#include <functional>
#include <map>
#include <ostream>
#include <vector>

#include "emraman/interaction.hpp"
#include "emraman/params.hpp"
#include "emraman/resonance.hpp"

namespace emr {

// Periodic grid in the transverse variable y, with the epsilon used for the
// 1/eps and 1/sqrt(eps) scalings of the block systems.
struct FlowGrid {
  int dim_y = 1;        // 1 or 2
  double length = 40.0; // period per direction
  int n_points = 256;   // points per direction (power of two)
  double dt = 1e-4;
  double epsilon = 1e-4;

  int total() const { return dim_y == 1 ? n_points : n_points * n_points; }
  double spacing() const { return length / n_points; }
  Vec2 point(int idx) const;
  void validate() const;
};

using GridField = Eigen::VectorXcd;

struct BlockComponent {
  int label = 1;               // mode index 1..5
  double mu = 0.0;             // frozen frequency, uniform convention
  Vec2 dmu_deta = Vec2::Zero();
};

// A frozen-frequency 2- or 3-component block of the symbolic-flow system.
// couplings[(q,r)] is the envelope b(y) such that, in the oscillation-factored
// frame, dS~^q/dt includes + (1/sqrt(eps)) e^{i(mu_q - mu_r) t/eps} b(y) S~^r.
struct BlockSpec {
  std::vector<BlockComponent> comps;
  std::map<std::pair<int, int>, GridField> couplings;
  Frequency zeta; // frozen frequency (diagnostic)

  int size() const { return static_cast<int>(comps.size()); }
};

// Builders. trace is the product b+ b- of the scalarized coefficients; the
// sign convention b- = -conj(b+) for negative real traces makes the coupling
// block skew-adjoint, so stable pairs conserve the L2 norm exactly.
BlockSpec make_pair_block(const PlasmaParams& p, PairLabel pair,
                          const Frequency& zeta, cd trace,
                          const std::function<cd(const Vec2&)>& g1,
                          const FlowGrid& grid);
BlockSpec make_triplet_block(const PlasmaParams& p, const std::array<int, 3>& labels,
                             const Frequency& zeta, cd trace_upper,
                             cd trace_lower,
                             const std::function<cd(const Vec2&)>& g1,
                             const FlowGrid& grid);

struct FlowTrajectory {
  double epsilon = 0.0;
  int block_size = 0;
  std::vector<double> times;
  std::vector<double> sup_norm;               // max_y Frobenius norm of S
  std::vector<double> l2_norm;                // L2(y) Frobenius norm
  std::vector<std::vector<double>> comp_sup;  // [component][time]
  std::vector<double> snapshot_times;
  // snapshots[s][q * block_size + c] = entry S_{qc} over the grid, in the
  // original (unfactored) frame.
  std::vector<std::vector<GridField>> snapshots;
};

std::vector<GridField> identity_datum(const BlockSpec& spec,
                                      const FlowGrid& grid);

// Strang-split integration of the block system: exact Fourier transport
// half-steps for the diagonal advection, pointwise RK4 for the phased
// coupling. datum defaults to the identity.
FlowTrajectory run_flow(const BlockSpec& spec, const FlowGrid& grid,
                        double t_final,
                        const std::vector<GridField>* datum = nullptr,
                        int snapshot_stride = 0);

// Closed-form solution for coupling == 0: per component, phase factor times
// the datum (and time-integrated source) shifted along the group velocity.
// source, when present, is constant in time.
std::vector<GridField> far_field_oracle(const BlockSpec& spec,
                                        const FlowGrid& grid, double T,
                                        const std::vector<GridField>& datum,
                                        const std::vector<GridField>* source =
                                            nullptr);

// Fundamental matrix of dS/dt = (1/sqrt(eps)) [[0, b+], [b-, 0]] S.
Eigen::Matrix2cd resonant_ode_oracle(cd b_plus, cd b_minus, double epsilon,
                                     double t);

struct GrowthFit {
  double rate = 0.0;      // slope of log sup-norm times sqrt(eps)
  double r_squared = 0.0;
  bool reliable = false;  // r_squared >= 0.9
};
GrowthFit estimate_growth(const FlowTrajectory& traj, double t0, double t1);

enum class SymbolClass { hyperbolic, elliptic, marginal };

// Sign of delta_M = -Phi^2 - sqrt(eps) yhat . d_eta(Phi^2)
//                   + eps (4 Re(b+ b-) - (yhat . d_eta Phi)^2).
SymbolClass classify_delta_M(double phi, const Vec2& dphi_deta, cd b_plus,
                             cd b_minus, double epsilon, const Vec2& yhat);

void write_trajectory_csv(const FlowTrajectory& traj, std::ostream& os);

}  // namespace emr
