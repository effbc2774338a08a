#include "emraman/zakharov.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace emr {

namespace {

constexpr cd I(0.0, 1.0);

// Forward/backward FFT over the (x, Y) grid with reusable in-place plans.
class Spectral {
 public:
  explicit Spectral(const ZakharovGrid& grid) : g_(grid), buf_(grid.total()) {
    auto* data = reinterpret_cast<fftw_complex*>(buf_.data());
    std::vector<int> dims(g_.dim(), g_.n);
    fwd_ = fftw_plan_dft(g_.dim(), dims.data(), data, data, FFTW_FORWARD,
                         FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(g_.dim(), dims.data(), data, data, FFTW_BACKWARD,
                         FFTW_ESTIMATE);
    kappa_.resize(g_.n);
    for (int m = 0; m < g_.n; ++m) {
      int mm = (m <= g_.n / 2) ? m : m - g_.n;
      kappa_[m] = 2.0 * M_PI * mm / g_.length;
    }
  }
  ~Spectral() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
  }
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;

  void forward(Eigen::VectorXcd& f) { run(f, fwd_, 1.0); }
  void backward(Eigen::VectorXcd& f) { run(f, bwd_, 1.0 / g_.total()); }

  // (xi, |eta|^2) of the grid index: longitudinal frequency and transverse
  // Laplace symbol.
  double xi(int idx) const { return kappa_[index_digit(idx, 0)]; }
  double eta_sq(int idx) const {
    double s = 0.0;
    for (int d = 1; d < g_.dim(); ++d) {
      double k = kappa_[index_digit(idx, d)];
      s += k * k;
    }
    return s;
  }

 private:
  int index_digit(int idx, int d) const {
    for (int e = g_.dim() - 1; e > d; --e) idx /= g_.n;
    return idx % g_.n;
  }

  void run(Eigen::VectorXcd& f, fftw_plan plan, double norm) {
    buf_ = f;
    fftw_execute(plan);
    f = buf_ * norm;
  }

  ZakharovGrid g_;
  Eigen::VectorXcd buf_;
  fftw_plan fwd_, bwd_;
  std::vector<double> kappa_;
};

// Half-step linear multiplier: transport k/omega in x, transverse dispersion,
// and the constant phase 1/(2 omega theta^2).
void linear_half_step(ZakharovState& s, Spectral& sp, double dt) {
  double w = s.params.omega();
  double c_x = s.params.k / w;
  double c_const = 1.0 / (2.0 * w * s.params.theta_e * s.params.theta_e);
  sp.forward(s.E);
  for (int i = 0; i < s.grid.total(); ++i) {
    double phase = c_x * sp.xi(i) + sp.eta_sq(i) / (2.0 * w) + c_const;
    s.E(i) *= std::exp(-I * (0.5 * dt) * phase);
  }
  sp.backward(s.E);
}

// Full nonlinear step: exact driven-oscillator update of each n mode with the
// source frozen over the step, and rotation of E by the exact time integral
// of n (|E|, hence the source, is constant during this substep).
void nonlinear_step(ZakharovState& s, Spectral& sp, double dt) {
  int total = s.grid.total();
  double w = s.params.omega();
  double c = s.params.alpha_ie + 1.0;

  Eigen::VectorXcd nhat = s.n.cast<cd>();
  Eigen::VectorXcd nthat = s.n_t.cast<cd>();
  Eigen::VectorXcd shat(total);
  for (int i = 0; i < total; ++i)
    shat(i) = cd(s.E(i).real() * s.E(i).real() + s.E(i).imag() * s.E(i).imag(),
                 0.0);
  sp.forward(nhat);
  sp.forward(nthat);
  sp.forward(shat);

  Eigen::VectorXcd integral(total);
  for (int i = 0; i < total; ++i) {
    double omega_sq = c * c * sp.eta_sq(i);
    cd src = (2.0 / (w * w)) * sp.eta_sq(i) * shat(i); // -(2/w^2) Delta_Y |E|^2
    cd n0 = nhat(i), nt0 = nthat(i);
    if (omega_sq < 1e-24) {
      nhat(i) = n0 + dt * nt0 + 0.5 * dt * dt * src;
      nthat(i) = nt0 + dt * src;
      integral(i) = dt * n0 + 0.5 * dt * dt * nt0 + dt * dt * dt / 6.0 * src;
    } else {
      double om = std::sqrt(omega_sq);
      double cs = std::cos(om * dt), sn = std::sin(om * dt);
      nhat(i) = n0 * cs + nt0 * sn / om + src * (1.0 - cs) / omega_sq;
      nthat(i) = -n0 * om * sn + nt0 * cs + src * sn / om;
      integral(i) = n0 * sn / om + nt0 * (1.0 - cs) / omega_sq +
                    src * (dt - sn / om) / omega_sq;
    }
  }
  sp.backward(nhat);
  sp.backward(nthat);
  sp.backward(integral);

  double resid = std::max(nhat.imag().cwiseAbs().maxCoeff(),
                          nthat.imag().cwiseAbs().maxCoeff());
  s.n_imag_residual = resid;
  s.n = nhat.real();
  s.n_t = nthat.real();
  for (int i = 0; i < total; ++i)
    s.E(i) *= std::exp(-I * integral(i).real() / (2.0 * w));
}

void strang_step(ZakharovState& s, Spectral& sp, double dt, bool coupling) {
  double mass0 = s.mass();
  linear_half_step(s, sp, dt);
  if (coupling) {
    nonlinear_step(s, sp, dt);
  } else {
    // free wave for n, no rotation of E
    Eigen::VectorXcd saved = std::move(s.E);
    s.E = Eigen::VectorXcd::Zero(s.grid.total());
    nonlinear_step(s, sp, dt);
    s.E = std::move(saved);
  }
  linear_half_step(s, sp, dt);
  s.time += dt;
  double mass1 = s.mass();
  if (!(std::abs(mass1 - mass0) <= 1e-6 * std::max(mass0, 1e-300)))
    throw RegimeError("mass drift exceeds the per-step budget");
}

}  // namespace

int ZakharovGrid::total() const {
  int t = 1;
  for (int d = 0; d < dim(); ++d) t *= n;
  return t;
}

Eigen::Vector3d ZakharovGrid::point(int idx) const {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int d = dim() - 1; d >= 0; --d) {
    x(d) = -0.5 * length + (idx % n) * spacing();
    idx /= n;
  }
  return x;
}

void ZakharovGrid::validate() const {
  if (dim_y != 1 && dim_y != 2)
    throw std::invalid_argument("transverse dimension must be 1 or 2");
  if (n < 2 || (n & (n - 1)) != 0)
    throw std::invalid_argument("points per direction must be a power of two");
  if (!(length > 0.0)) throw std::invalid_argument("period must be positive");
}

double ZakharovState::mass() const {
  double cell = std::pow(grid.spacing(), grid.dim());
  return E.squaredNorm() * cell;
}

double ZakharovState::amplitude_max() const {
  return E.cwiseAbs().maxCoeff() / params.omega();
}

ZakharovState init_from_wkb(
    const std::function<cd(const Eigen::Vector3d&)>& a_envelope,
    const PlasmaParams& p, const ZakharovGrid& grid) {
  p.validate();
  grid.validate();
  ZakharovState s;
  s.params = p;
  s.grid = grid;
  s.E.resize(grid.total());
  double w = p.omega();
  for (int i = 0; i < grid.total(); ++i)
    s.E(i) = I * w * a_envelope(grid.point(i));
  double mx = s.E.cwiseAbs().maxCoeff();
  if (mx > 0.0) {
    double tail = 0.0;
    for (int i = 0; i < grid.total(); ++i)
      if (grid.point(i).cwiseAbs().maxCoeff() > 0.25 * grid.length)
        tail = std::max(tail, std::abs(s.E(i)));
    if (tail > 1e-8 * mx)
      throw std::invalid_argument(
          "envelope support exceeds a quarter period");
  }
  s.n = Eigen::VectorXd::Zero(grid.total());
  s.n_t = Eigen::VectorXd::Zero(grid.total());
  return s;
}

WkbLeadingFields wkb_leading_fields(const PlasmaParams& p, int p_harmonic,
                                    cd g) {
  if (p_harmonic != 1 && p_harmonic != -1)
    throw std::invalid_argument("harmonic index must be +1 or -1");
  WkbLeadingFields out;
  double hp = static_cast<double>(p_harmonic);
  Vec3c vhat(0.0, 1.0, 0.0);
  out.E0 = I * hp * p.omega() * g * vhat;
  Vec3c kvec(I * hp * p.k * g, 0.0, 0.0);
  out.B0 = Vec3c(kvec(1) * vhat(2) - kvec(2) * vhat(1),
                 kvec(2) * vhat(0) - kvec(0) * vhat(2),
                 kvec(0) * vhat(1) - kvec(1) * vhat(0));
  return out;
}

void zakharov_step(ZakharovState& state, double dt, bool coupling) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Spectral sp(state.grid);
  strang_step(state, sp, dt, coupling);
}

ZakharovReport run_and_report(ZakharovState state, double T, double dt,
                              bool coupling) {
  if (T < 0.0) throw std::invalid_argument("T must be nonnegative");
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  Spectral sp(state.grid);
  double mass0 = state.mass();
  double e0 = state.E.cwiseAbs().maxCoeff();
  ZakharovReport rep;
  rep.amplitude_max = state.amplitude_max();
  long nsteps = std::max(1L, std::lround(T / dt));
  double h = T / nsteps;
  for (long step = 0; step < nsteps && T > 0.0; ++step) {
    strang_step(state, sp, h, coupling);
    double emax = state.E.cwiseAbs().maxCoeff();
    if (e0 > 0.0 && emax > 1e3 * e0)
      throw RegimeError("amplitude blow-up guard tripped");
    rep.amplitude_max = std::max(rep.amplitude_max, state.amplitude_max());
  }
  rep.mass_drift =
      mass0 > 0.0 ? std::abs(state.mass() - mass0) / mass0 : 0.0;
  rep.final = std::move(state);
  return rep;
}

void write_state_csv(const ZakharovState& state, std::ostream& os) {
  int dim = state.grid.dim();
  os << (dim == 2 ? "x,y1" : "x,y1,y2") << ",re_E,im_E,n,n_t\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.11e%c", v, sep);
    os << buf;
  };
  for (int i = 0; i < state.grid.total(); ++i) {
    Eigen::Vector3d x = state.grid.point(i);
    for (int d = 0; d < dim; ++d) put(x(d), ',');
    put(state.E(i).real(), ',');
    put(state.E(i).imag(), ',');
    put(state.n(i), ',');
    put(state.n_t(i), '\n');
  }
}

}  // namespace emr
