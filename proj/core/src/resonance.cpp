#include "emraman/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace emr {

namespace {

// lambda_j(xi, eta) at epsilon = 0 and its eta-gradient.
double mode_lambda(const PlasmaParams& p, int j, double xi, double r2) {
  switch (j) {
    case 1: return std::sqrt(1.0 + xi * xi + r2);
    case 2: return std::sqrt(1.0 + p.theta_e * p.theta_e * (xi * xi + r2));
    case 3: return 0.0;
    case 4: return -mode_lambda(p, 2, xi, r2);
    case 5: return -mode_lambda(p, 1, xi, r2);
    default: throw std::invalid_argument("mode label must be 1..5");
  }
}

Vec2 mode_dlambda_deta(const PlasmaParams& p, int j, double xi, const Vec2& eta) {
  double r2 = eta.squaredNorm();
  switch (j) {
    case 1: return eta / std::sqrt(1.0 + xi * xi + r2);
    case 2: {
      double t2 = p.theta_e * p.theta_e;
      return t2 * eta / std::sqrt(1.0 + t2 * (xi * xi + r2));
    }
    case 3: return Vec2::Zero();
    case 4: return -mode_dlambda_deta(p, 2, xi, eta);
    case 5: return -mode_dlambda_deta(p, 1, xi, eta);
    default: throw std::invalid_argument("mode label must be 1..5");
  }
}

double phi_xr(const PlasmaParams& p, PairLabel pair, double xi, double r) {
  double r2 = r * r;
  return mode_lambda(p, pair.j, xi + p.k, r2) - mode_lambda(p, pair.jp, xi, r2) -
         p.omega();
}

// Iterative grid refinement of min over [a,b]x[c,d] of f(xi, r).
double refine_min(const std::function<double(double, double)>& f, double a,
                  double b, double c, double d, double* arg_xi = nullptr,
                  double* arg_r = nullptr) {
  const int n = 81;
  double best = std::numeric_limits<double>::infinity();
  double bx = 0.5 * (a + b), br = 0.5 * (c + d);
  for (int round = 0; round < 6; ++round) {
    double lo_x = a, hi_x = b, lo_r = c, hi_r = d;
    if (round > 0) {
      double wx = (b - a) * std::pow(0.08, round);
      double wr = (d - c) * std::pow(0.08, round);
      lo_x = bx - wx; hi_x = bx + wx;
      lo_r = std::max(c, br - wr); hi_r = br + wr;
    }
    for (int i = 0; i < n; ++i)
      for (int jj = 0; jj < n; ++jj) {
        double x = lo_x + (hi_x - lo_x) * i / (n - 1);
        double r = lo_r + (hi_r - lo_r) * jj / (n - 1);
        double v = f(x, r);
        if (v < best) { best = v; bx = x; br = r; }
      }
  }
  if (arg_xi) *arg_xi = bx;
  if (arg_r) *arg_r = br;
  return best;
}

}  // namespace

PhaseValue phase_and_gradient(const PlasmaParams& p, PairLabel pair,
                              const Frequency& zeta) {
  p.validate();
  if (!pair.valid()) throw std::invalid_argument("pair must satisfy 1 <= j < j' <= 5");
  double r2 = zeta.eta.squaredNorm();
  PhaseValue out;
  out.phi = mode_lambda(p, pair.j, zeta.xi + p.k, r2) -
            mode_lambda(p, pair.jp, zeta.xi, r2) - p.omega();
  out.dphi_deta = mode_dlambda_deta(p, pair.j, zeta.xi + p.k, zeta.eta) -
                  mode_dlambda_deta(p, pair.jp, zeta.xi, zeta.eta);
  return out;
}

void default_scan_window(const PlasmaParams& p, double& xi_min, double& xi_max) {
  double w = p.omega();
  double R = std::sqrt(w * w + 2.0 * w);
  xi_min = -std::abs(p.k) - 3.0 * R;
  xi_max = std::abs(p.k) + 3.0 * R;
}

std::vector<ResonanceRecord> find_axis_resonances(const PlasmaParams& p,
                                                  PairLabel pair, double xi_min,
                                                  double xi_max, double tol) {
  p.validate();
  if (!pair.valid()) throw std::invalid_argument("pair must satisfy 1 <= j < j' <= 5");
  if (!(tol > 0.0) || !(xi_min < xi_max))
    throw std::invalid_argument("invalid scan window or tolerance");
  auto f = [&](double xi) { return phi_xr(p, pair, xi, 0.0); };

  std::vector<ResonanceRecord> out;
  const double step = 1e-3;
  long nsteps = static_cast<long>(std::ceil((xi_max - xi_min) / step));
  double x0 = xi_min, f0 = f(x0);
  for (long i = 1; i <= nsteps; ++i) {
    double x1 = std::min(xi_min + i * step, xi_max);
    double f1 = f(x1);
    bool hit = (f0 == 0.0);
    double a = x0, b = x1, fa = f0;
    if (f0 * f1 < 0.0) {
      for (int it = 0; it < 200 && (b - a) > tol * std::max(1.0, std::abs(a)); ++it) {
        double m = 0.5 * (a + b), fm = f(m);
        if (fm == 0.0) { a = b = m; break; }
        if (fa * fm < 0.0) b = m;
        else { a = m; fa = fm; }
      }
      hit = true;
    }
    if (hit) {
      double root = (f0 == 0.0) ? x0 : 0.5 * (a + b);
      ResonanceRecord rec;
      rec.pair = pair;
      rec.zeta = Frequency(root, 0.0, 0.0);
      rec.phase_residual = std::abs(f(root));
      rec.nu = phase_and_gradient(p, pair, rec.zeta).dphi_deta;
      rec.is_space_time = rec.nu.norm() <= 1e-10;
      out.push_back(rec);
    }
    x0 = x1;
    f0 = f1;
  }
  return out;
}

std::vector<CurvePoint> resonance_curve(const PlasmaParams& p, PairLabel pair,
                                        const GridSpec& g) {
  p.validate();
  if (!pair_is_resonant(p, pair)) return {};
  std::vector<CurvePoint> pts;
  std::vector<double> vals((g.n_xi + 1) * (g.n_r + 1));
  auto at = [&](int i, int jj) -> double& { return vals[i * (g.n_r + 1) + jj]; };
  double dx = (g.xi_max - g.xi_min) / g.n_xi;
  double dr = (g.r_max - g.r_min) / g.n_r;
  for (int i = 0; i <= g.n_xi; ++i)
    for (int jj = 0; jj <= g.n_r; ++jj)
      at(i, jj) = phi_xr(p, pair, g.xi_min + i * dx, g.r_min + jj * dr);
  auto emit = [&](double xa, double ra, double va, double xb, double rb, double vb) {
    if (va == 0.0) { pts.push_back({xa, ra}); return; }
    if (va * vb < 0.0) {
      double t = va / (va - vb);
      pts.push_back({xa + t * (xb - xa), ra + t * (rb - ra)});
    }
  };
  for (int i = 0; i < g.n_xi; ++i)
    for (int jj = 0; jj < g.n_r; ++jj) {
      double xa = g.xi_min + i * dx, xb = xa + dx;
      double ra = g.r_min + jj * dr, rb = ra + dr;
      emit(xa, ra, at(i, jj), xb, ra, at(i + 1, jj));
      emit(xa, ra, at(i, jj), xa, rb, at(i, jj + 1));
    }
  std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) {
    return a.xi != b.xi ? a.xi < b.xi : a.r < b.r;
  });
  return pts;
}

std::vector<ResonanceRecord> space_time_resonances(const PlasmaParams& p,
                                                   PairLabel pair) {
  p.validate();
  Thresholds th = thresholds(p);
  if (!th.cond_k_thetae)
    throw RegimeError("space-time localization requires sqrt(1+k^2) <= (1-theta_e^2)/theta_e^2");
  double xi_min, xi_max;
  default_scan_window(p, xi_min, xi_max);
  // Pairs whose roots sit at |xi| ~ |k|/theta_e need a wider scan window.
  bool wide = (pair.j == 2 && pair.jp == 3) || (pair.j == 3 && pair.jp == 4) ||
              (pair.j == 2 && pair.jp == 4);
  if (wide) {
    double reach = std::abs(p.k) / p.theta_e + std::abs(p.k) + 1.0;
    xi_min = -reach;
    xi_max = reach;
  }
  auto recs = find_axis_resonances(p, pair, xi_min, xi_max);
  for (auto& r : recs) {
    double nu = phase_and_gradient(p, pair, r.zeta).dphi_deta.norm();
    r.is_space_time = nu <= 1e-10;
  }
  return recs;
}

Thresholds thresholds(const PlasmaParams& p) {
  p.validate();
  Thresholds t;
  double th2 = p.theta_e * p.theta_e;
  t.k_c = std::sqrt(2.0 * (1.0 + th2) + 4.0 * std::sqrt(1.0 - th2 + th2 * th2)) /
          (std::sqrt(2.0) * (1.0 - th2));
  double q = 1.0 / p.theta_e - 1.0;
  t.k_min = (q * q > 4.0) ? std::sqrt(3.0) / std::sqrt(q * q - 4.0)
                          : std::numeric_limits<double>::infinity();
  t.cond_k_thetae = p.omega() <= (1.0 - th2) / th2;
  return t;
}

bool pair_is_resonant(const PlasmaParams& p, PairLabel pair) {
  p.validate();
  if (!pair.valid()) return false;
  int j = pair.j, jp = pair.jp;
  if (j == 1 && jp == 5) return false;
  // Difference-type phases are always solvable; sum-type phases need the
  // minimum of lambda_j(xi+k) + lambda_|j'|(xi) to reach omega.
  if ((j == 1 && jp == 4) || (j == 2 && jp == 5)) {
    auto f = [&](double xi) {
      return mode_lambda(p, 1, xi + p.k, 0.0) + mode_lambda(p, 2, xi, 0.0);
    };
    double a = -std::abs(p.k) - 10.0, b = 10.0;
    for (int it = 0; it < 200; ++it) {
      double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
      if (f(m1) < f(m2)) b = m2; else a = m1;
    }
    return f(0.5 * (a + b)) <= p.omega();
  }
  if (j == 2 && jp == 4) {
    double t = p.theta_e * p.k / 2.0;
    return 2.0 * std::sqrt(1.0 + t * t) <= p.omega();
  }
  return true;
}

SeparationReport separation_report(const PlasmaParams& p, double delta_res) {
  p.validate();
  if (!(delta_res > 0.0)) throw std::invalid_argument("delta_res must be positive");

  // J(zeta) = max(|Phi_a(zeta)|, |Phi_b(zeta - shift)|); the set named "X + k"
  // contains zeta exactly when zeta - k lies in X.
  auto joint = [&](PairLabel a, PairLabel b, double shift) {
    return [&, a, b, shift](double xi, double r) {
      return std::max(std::abs(phi_xr(p, a, xi, r)),
                      std::abs(phi_xr(p, b, xi - shift, r)));
    };
  };

  double reach = std::abs(p.k) / p.theta_e + 2.0 * std::abs(p.k) + 2.0;
  SeparationReport rep;
  auto add = [&](const std::string& name, PairLabel a, PairLabel b, double shift,
                 bool expected_empty, bool axis_only = false) {
    SeparationEntry e;
    e.name = name;
    e.expected_empty = expected_empty;
    auto f = joint(a, b, shift);
    double m;
    if (axis_only) {
      auto fr0 = [&](double xi, double) { return f(xi, 0.0); };
      m = refine_min(fr0, -reach, reach, 0.0, 0.0);
    } else {
      m = refine_min(f, -reach, reach, 0.0, reach);
    }
    e.min_joint_residual = m;
    e.empty = m > std::max(10.0 * delta_res, 1e-6);
    rep.entries.push_back(e);
    if (e.empty != e.expected_empty) rep.all_as_expected = false;
  };

  double k = p.k;
  add("R12 cap (R23+k)", {1, 2}, {2, 3}, k, true);
  add("R12 cap (R24+k)", {1, 2}, {2, 4}, k, true);
  add("R23 cap R24", {2, 3}, {2, 4}, 0.0, true);
  add("R25 cap R23", {2, 5}, {2, 3}, 0.0, true);
  add("R25 cap R24", {2, 5}, {2, 4}, 0.0, true);
  add("R14 cap R34", {1, 4}, {3, 4}, 0.0, true);
  add("R24 cap R34", {2, 4}, {3, 4}, 0.0, true);
  add("R34 cap (R45+k)", {3, 4}, {4, 5}, k, true);
  add("R12 cap (R25+k)", {1, 2}, {2, 5}, k, true);
  add("R13 cap R23", {1, 3}, {2, 3}, 0.0, true);
  add("R13 cap (R34+k)", {1, 3}, {3, 4}, k, true);
  add("R13 cap (R35+k)", {1, 3}, {3, 5}, k, false);
  add("R23 cap (R34+k)", {2, 3}, {3, 4}, k, false);
  add("S23 cap (S34+k)", {2, 3}, {3, 4}, k, true, true);
  add("R23 cap (R35+k)", {2, 3}, {3, 5}, k, true);
  add("R34 cap R35", {3, 4}, {3, 5}, 0.0, true);
  return rep;
}

double chi0(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  double s = 2.0 - t;
  return f(s) / (f(s) + f(1.0 - s));
}

double cutoff_chi(const PlasmaParams& p, PairLabel pair, double delta_res,
                  CutoffVariant variant, const Frequency& zeta) {
  p.validate();
  if (!(delta_res > 0.0)) throw std::invalid_argument("delta_res must be positive");
  if (!pair_is_resonant(p, pair)) return 0.0;
  double C;
  switch (variant) {
    case CutoffVariant::flat: C = 4.0; break;
    case CutoffVariant::base: C = 2.0; break;
    case CutoffVariant::sharp: C = 1.0; break;
    case CutoffVariant::tilde_: C = 0.5; break;
    default: throw std::invalid_argument("unknown cutoff variant");
  }
  double phi = phase_and_gradient(p, pair, zeta).phi;
  double d6 = delta_res / 6.0;
  return chi0(C * std::sqrt(phi * phi + d6 * d6) / delta_res);
}

}  // namespace emr
