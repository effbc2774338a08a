#include "emraman/symflow.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace emr {

namespace {

constexpr cd I(0.0, 1.0);

// epsilon = 0 eigenvalue branches and their eta-gradients.
double mode_lambda(const PlasmaParams& p, int j, double xi, const Vec2& eta) {
  double z2 = xi * xi + eta.squaredNorm();
  switch (j) {
    case 1: return std::sqrt(1.0 + z2);
    case 2: return std::sqrt(1.0 + p.theta_e * p.theta_e * z2);
    case 3: return 0.0;
    case 4: return -std::sqrt(1.0 + p.theta_e * p.theta_e * z2);
    case 5: return -std::sqrt(1.0 + z2);
  }
  throw std::invalid_argument("mode label must be 1..5");
}

Vec2 mode_dlambda(const PlasmaParams& p, int j, double xi, const Vec2& eta) {
  if (j == 3) return Vec2::Zero();
  double lam = mode_lambda(p, j, xi, eta);
  double c2 = (j == 2 || j == 4) ? p.theta_e * p.theta_e : 1.0;
  return c2 * eta / lam;
}

BlockComponent component_at(const PlasmaParams& p, int label, double xi,
                            const Vec2& eta, double mu_offset) {
  BlockComponent c;
  c.label = label;
  c.mu = mode_lambda(p, label, xi, eta) + mu_offset;
  c.dmu_deta = mode_dlambda(p, label, xi, eta);
  return c;
}

// Split a trace into scalar couplings b+ b- = trace; negative real traces use
// b- = -conj(b+) so the block is skew-adjoint.
void split_trace(cd trace, cd& b_plus, cd& b_minus) {
  if (trace == cd(0.0, 0.0)) {
    b_plus = b_minus = 0.0;
  } else if (trace.imag() == 0.0 && trace.real() < 0.0) {
    b_plus = std::sqrt(-trace.real());
    b_minus = -b_plus;
  } else {
    b_plus = std::sqrt(trace);
    b_minus = b_plus;
  }
}

GridField sample_envelope(const std::function<cd(const Vec2&)>& g,
                          const FlowGrid& grid, cd scale, bool conjugate) {
  GridField f(grid.total());
  for (int i = 0; i < grid.total(); ++i) {
    cd v = g ? g(grid.point(i)) : cd(1.0, 0.0);
    if (conjugate) v = std::conj(v);
    f(i) = scale * v;
  }
  return f;
}

// Forward/backward FFT with a reusable plan on a scratch buffer.
class Spectral {
 public:
  explicit Spectral(const FlowGrid& grid) : g_(grid), buf_(grid.total()) {
    auto* data = reinterpret_cast<fftw_complex*>(buf_.data());
    if (g_.dim_y == 1) {
      fwd_ = fftw_plan_dft_1d(g_.n_points, data, data, FFTW_FORWARD,
                              FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_1d(g_.n_points, data, data, FFTW_BACKWARD,
                              FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_2d(g_.n_points, g_.n_points, data, data,
                              FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_2d(g_.n_points, g_.n_points, data, data,
                              FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    kappa_.resize(g_.n_points);
    for (int m = 0; m < g_.n_points; ++m) {
      int mm = (m <= g_.n_points / 2) ? m : m - g_.n_points;
      kappa_[m] = 2.0 * M_PI * mm / g_.length;
    }
  }
  ~Spectral() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  void forward(GridField& f) { run(f, fwd_, 1.0); }
  void backward(GridField& f) { run(f, bwd_, 1.0 / g_.total()); }

  // Shift f(y) -> f(y - s) via Fourier phases.
  void shift(GridField& f, const Vec2& s) {
    forward(f);
    apply_shift_phase(f, s);
    backward(f);
  }

  void apply_shift_phase(GridField& fhat, const Vec2& s) const {
    for (int i = 0; i < g_.total(); ++i)
      fhat(i) *= std::exp(-I * wave(i).dot(s.cast<double>()));
  }

  Vec2 wave(int idx) const {
    if (g_.dim_y == 1) return Vec2(kappa_[idx], 0.0);
    return Vec2(kappa_[idx % g_.n_points], kappa_[idx / g_.n_points]);
  }

 private:
  void run(GridField& f, fftw_plan plan, double norm) {
    std::copy(f.data(), f.data() + g_.total(), buf_.begin());
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf_.data()),
                     reinterpret_cast<fftw_complex*>(buf_.data()));
    for (int i = 0; i < g_.total(); ++i) f(i) = buf_[i] * norm;
  }

  const FlowGrid g_;
  std::vector<cd> buf_;
  std::vector<double> kappa_;
  fftw_plan fwd_ = nullptr, bwd_ = nullptr;
};

void record_norms(FlowTrajectory& traj, const std::vector<GridField>& fields,
                  int n, double t, double cell) {
  int total = static_cast<int>(fields[0].size());
  double sup = 0.0, l2sq = 0.0;
  std::vector<double> csup(n, 0.0);
  for (int i = 0; i < total; ++i) {
    double frob = 0.0;
    for (int q = 0; q < n; ++q) {
      double row = 0.0;
      for (int c = 0; c < n; ++c) row += std::norm(fields[q * n + c](i));
      frob += row;
      csup[q] = std::max(csup[q], row);
    }
    sup = std::max(sup, frob);
    l2sq += frob;
  }
  traj.times.push_back(t);
  traj.sup_norm.push_back(std::sqrt(sup));
  traj.l2_norm.push_back(std::sqrt(l2sq * cell));
  for (int q = 0; q < n; ++q) traj.comp_sup[q].push_back(std::sqrt(csup[q]));
}

}  // namespace

Vec2 FlowGrid::point(int idx) const {
  auto coord = [this](int m) { return -0.5 * length + m * spacing(); };
  if (dim_y == 1) return Vec2(coord(idx), 0.0);
  return Vec2(coord(idx % n_points), coord(idx / n_points));
}

void FlowGrid::validate() const {
  if (dim_y != 1 && dim_y != 2)
    throw std::invalid_argument("dim_y must be 1 or 2");
  if (!(length > 0.0)) throw std::invalid_argument("length must be positive");
  if (n_points < 2 || (n_points & (n_points - 1)) != 0)
    throw std::invalid_argument("n_points must be a power of two >= 2");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
}

BlockSpec make_pair_block(const PlasmaParams& p, PairLabel pair,
                          const Frequency& zeta, cd trace,
                          const std::function<cd(const Vec2&)>& g1,
                          const FlowGrid& grid) {
  p.validate();
  grid.validate();
  if (!pair.valid())
    throw std::invalid_argument("pair must satisfy 1 <= j < j' <= 5");
  BlockSpec spec;
  spec.zeta = zeta;
  double w = p.omega();
  spec.comps.push_back(
      component_at(p, pair.j, zeta.xi + p.k, zeta.eta, -w));
  spec.comps.push_back(component_at(p, pair.jp, zeta.xi, zeta.eta, 0.0));
  cd bp, bm;
  split_trace(trace, bp, bm);
  spec.couplings[{0, 1}] = sample_envelope(g1, grid, bp, false);
  spec.couplings[{1, 0}] = sample_envelope(g1, grid, bm, true);
  return spec;
}

BlockSpec make_triplet_block(const PlasmaParams& p,
                             const std::array<int, 3>& labels,
                             const Frequency& zeta, cd trace_upper,
                             cd trace_lower,
                             const std::function<cd(const Vec2&)>& g1,
                             const FlowGrid& grid) {
  p.validate();
  grid.validate();
  BlockSpec spec;
  spec.zeta = zeta;
  double w = p.omega();
  spec.comps.push_back(
      component_at(p, labels[0], zeta.xi + p.k, zeta.eta, -w));
  spec.comps.push_back(component_at(p, labels[1], zeta.xi, zeta.eta, 0.0));
  spec.comps.push_back(
      component_at(p, labels[2], zeta.xi - p.k, zeta.eta, w));
  cd bp, bm;
  split_trace(trace_upper, bp, bm);
  spec.couplings[{0, 1}] = sample_envelope(g1, grid, bp, false);
  spec.couplings[{1, 0}] = sample_envelope(g1, grid, bm, true);
  split_trace(trace_lower, bp, bm);
  spec.couplings[{1, 2}] = sample_envelope(g1, grid, bp, false);
  spec.couplings[{2, 1}] = sample_envelope(g1, grid, bm, true);
  return spec;
}

std::vector<GridField> identity_datum(const BlockSpec& spec,
                                      const FlowGrid& grid) {
  int n = spec.size();
  std::vector<GridField> d(n * n, GridField::Zero(grid.total()));
  for (int q = 0; q < n; ++q)
    d[q * n + q] = GridField::Constant(grid.total(), cd(1.0, 0.0));
  return d;
}

FlowTrajectory run_flow(const BlockSpec& spec, const FlowGrid& grid,
                        double t_final, const std::vector<GridField>* datum,
                        int snapshot_stride) {
  grid.validate();
  int n = spec.size();
  if (n != 2 && n != 3)
    throw std::invalid_argument("block must have 2 or 3 components");
  if (!(t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
  double seps = std::sqrt(grid.epsilon);

  double max_grad = 0.0, max_dmu = 0.0;
  for (const auto& c : spec.comps) {
    max_grad = std::max(max_grad, c.dmu_deta.norm());
    if (grid.dim_y == 1 && std::abs(c.dmu_deta(1)) > 1e-12)
      throw std::invalid_argument(
          "1-d grid requires group velocities along the first axis");
  }
  for (const auto& [edge, field] : spec.couplings)
    if (field.cwiseAbs().maxCoeff() > 0.0)
      max_dmu = std::max(max_dmu, std::abs(spec.comps[edge.first].mu -
                                           spec.comps[edge.second].mu));

  long nsteps = std::max<long>(1, std::lround(t_final / grid.dt));
  double dt = t_final / nsteps;
  if (max_grad > 0.0 && dt > 0.25 * grid.spacing() * seps / max_grad)
    throw RegimeError("time step violates the shift accuracy constraint");
  if (max_dmu * dt / grid.epsilon > 0.5)
    throw RegimeError("time step too large for the coupling phases");
  if (max_grad > 0.0) {
    // wrap-around guard: envelopes must be negligible beyond |y| = L/4
    for (const auto& [edge, field] : spec.couplings) {
      double inner = field.cwiseAbs().maxCoeff(), outer = 0.0;
      for (int i = 0; i < grid.total(); ++i)
        if (grid.point(i).cwiseAbs().maxCoeff() > 0.25 * grid.length)
          outer = std::max(outer, std::abs(field(i)));
      if (outer > 1e-8 * (inner + 1e-300) && inner > 0.0)
        throw RegimeError("envelope support exceeds a quarter period");
    }
  }

  std::vector<GridField> F =
      datum ? *datum : identity_datum(spec, grid);
  if (static_cast<int>(F.size()) != n * n)
    throw std::invalid_argument("datum must provide n*n grid fields");

  FlowTrajectory traj;
  traj.epsilon = grid.epsilon;
  traj.block_size = n;
  traj.comp_sup.resize(n);
  double cell = std::pow(grid.spacing(), grid.dim_y);

  if (snapshot_stride <= 0)
    snapshot_stride = static_cast<int>(std::max<long>(1, nsteps / 256));

  Spectral fft(grid);
  auto snapshot = [&](double t) {
    std::vector<GridField> snap = F;
    for (int q = 0; q < n; ++q) {
      cd phase = std::exp(-I * spec.comps[q].mu * t / grid.epsilon);
      for (int c = 0; c < n; ++c) snap[q * n + c] *= phase;
    }
    traj.snapshot_times.push_back(t);
    traj.snapshots.push_back(std::move(snap));
  };

  record_norms(traj, F, n, 0.0, cell);
  snapshot(0.0);

  // coupling derivative at relative time t
  std::vector<GridField> K(n * n, GridField(grid.total()));
  auto deriv = [&](const std::vector<GridField>& S, double t,
                   std::vector<GridField>& out) {
    for (auto& f : out) f.setZero();
    for (const auto& [edge, b] : spec.couplings) {
      int q = edge.first, r = edge.second;
      cd phase = std::exp(I * (spec.comps[q].mu - spec.comps[r].mu) * t /
                          grid.epsilon) /
                 seps;
      for (int c = 0; c < n; ++c)
        out[q * n + c] += (phase * b.array() * S[r * n + c].array()).matrix();
    }
  };

  std::vector<GridField> k1 = K, k2 = K, k3 = K, k4 = K, tmp = K;
  for (long step = 0; step < nsteps; ++step) {
    double t = step * dt;
    // transport half-step
    for (int q = 0; q < n; ++q) {
      Vec2 s = spec.comps[q].dmu_deta * (0.5 * dt / seps);
      if (s.norm() > 0.0)
        for (int c = 0; c < n; ++c) fft.shift(F[q * n + c], s);
    }
    // coupling full step (RK4)
    if (!spec.couplings.empty()) {
      deriv(F, t, k1);
      for (int e = 0; e < n * n; ++e) tmp[e] = F[e] + 0.5 * dt * k1[e];
      deriv(tmp, t + 0.5 * dt, k2);
      for (int e = 0; e < n * n; ++e) tmp[e] = F[e] + 0.5 * dt * k2[e];
      deriv(tmp, t + 0.5 * dt, k3);
      for (int e = 0; e < n * n; ++e) tmp[e] = F[e] + dt * k3[e];
      deriv(tmp, t + dt, k4);
      for (int e = 0; e < n * n; ++e)
        F[e] += (dt / 6.0) * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e]);
    }
    // transport half-step
    for (int q = 0; q < n; ++q) {
      Vec2 s = spec.comps[q].dmu_deta * (0.5 * dt / seps);
      if (s.norm() > 0.0)
        for (int c = 0; c < n; ++c) fft.shift(F[q * n + c], s);
    }
    double tnext = (step + 1) * dt;
    record_norms(traj, F, n, tnext, cell);
    if ((step + 1) % snapshot_stride == 0 || step + 1 == nsteps)
      snapshot(tnext);
  }
  return traj;
}

std::vector<GridField> far_field_oracle(const BlockSpec& spec,
                                        const FlowGrid& grid, double T,
                                        const std::vector<GridField>& datum,
                                        const std::vector<GridField>* source) {
  grid.validate();
  int n = spec.size();
  for (const auto& [edge, b] : spec.couplings)
    if (b.cwiseAbs().maxCoeff() > 0.0)
      throw std::invalid_argument("far-field oracle requires zero coupling");
  if (static_cast<int>(datum.size()) != n * n)
    throw std::invalid_argument("datum must provide n*n grid fields");
  if (source && static_cast<int>(source->size()) != n * n)
    throw std::invalid_argument("source must provide n*n grid fields");

  Spectral fft(grid);
  double seps = std::sqrt(grid.epsilon);
  std::vector<GridField> out(n * n, GridField::Zero(grid.total()));
  for (int q = 0; q < n; ++q) {
    double mu = spec.comps[q].mu;
    Vec2 v = spec.comps[q].dmu_deta / seps;
    cd phase = std::exp(-I * mu * T / grid.epsilon);
    for (int c = 0; c < n; ++c) {
      GridField g = datum[q * n + c];
      fft.forward(g);
      fft.apply_shift_phase(g, v * T);
      GridField acc = phase * g;
      if (source) {
        GridField s = (*source)[q * n + c];
        fft.forward(s);
        for (int i = 0; i < grid.total(); ++i) {
          cd a = I * (mu / grid.epsilon + fft.wave(i).dot(v));
          cd integral = (std::abs(a) < 1e-14)
                            ? cd(T, 0.0)
                            : (1.0 - std::exp(-a * T)) / a;
          acc(i) += s(i) * integral;
        }
      }
      fft.backward(acc);
      out[q * n + c] = acc;
    }
  }
  return out;
}

Eigen::Matrix2cd resonant_ode_oracle(cd b_plus, cd b_minus, double epsilon,
                                     double t) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("epsilon must be positive");
  double seps = std::sqrt(epsilon);
  Eigen::Matrix2cd M;
  M << 0.0, b_plus / seps, b_minus / seps, 0.0;
  cd sigma = std::sqrt(b_plus * b_minus) / seps;
  Eigen::Matrix2cd out = Eigen::Matrix2cd::Identity();
  if (std::abs(sigma) < 1e-300) return out + t * M;
  out *= std::cosh(sigma * t);
  out += (std::sinh(sigma * t) / sigma) * M;
  return out;
}

GrowthFit estimate_growth(const FlowTrajectory& traj, double t0, double t1) {
  std::vector<double> xs, ys;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    double t = traj.times[i];
    if (t < t0 - 1e-15 || t > t1 + 1e-15) continue;
    if (!(traj.sup_norm[i] > 0.0))
      throw std::invalid_argument("growth fit requires positive norms");
    xs.push_back(t);
    ys.push_back(std::log(traj.sup_norm[i]));
  }
  if (xs.size() < 10)
    throw std::invalid_argument("growth fit requires at least 10 samples");
  double np = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= np;
  my /= np;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  GrowthFit fit;
  double slope = sxy / sxx;
  fit.rate = slope * std::sqrt(traj.epsilon);
  fit.r_squared = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 0.0;
  fit.reliable = fit.r_squared >= 0.9;
  return fit;
}

SymbolClass classify_delta_M(double phi, const Vec2& dphi_deta, cd b_plus,
                             cd b_minus, double epsilon, const Vec2& yhat) {
  double seps = std::sqrt(epsilon);
  double along = yhat.dot(dphi_deta);
  double bb = (b_plus * b_minus).real();
  double delta = -phi * phi - seps * 2.0 * phi * along +
                 epsilon * (4.0 * bb - along * along);
  double scale = phi * phi + seps * std::abs(2.0 * phi * along) +
                 epsilon * (4.0 * std::abs(bb) + along * along);
  double tol = 1e-12 * std::max(scale, 1e-30);
  if (delta > tol) return SymbolClass::elliptic;
  if (delta < -tol) return SymbolClass::hyperbolic;
  return SymbolClass::marginal;
}

void write_trajectory_csv(const FlowTrajectory& traj, std::ostream& os) {
  os << "t,sup_norm,l2_norm";
  for (int q = 0; q < traj.block_size; ++q) os << ",sup_comp" << (q + 1);
  os << "\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.11e%c", v, sep);
    os << buf;
  };
  for (size_t i = 0; i < traj.times.size(); ++i) {
    put(traj.times[i], ',');
    put(traj.sup_norm[i], ',');
    put(traj.l2_norm[i], traj.block_size > 0 ? ',' : '\n');
    for (int q = 0; q < traj.block_size; ++q)
      put(traj.comp_sup[q][i], q + 1 == traj.block_size ? '\n' : ',');
  }
}

}  // namespace emr
