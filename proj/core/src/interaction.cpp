#include "emraman/interaction.hpp"

#include <algorithm>
#include <cmath>

namespace emr {

namespace {

constexpr cd I(0.0, 1.0);

double lam1(double x) { return std::sqrt(1.0 + x * x); }
double lam2(const PlasmaParams& p, double x) {
  return std::sqrt(1.0 + p.theta_e * p.theta_e * x * x);
}

// Bilinear cross product; Eigen's cross() conjugates complex operands.
Vec3c ccross(const Vec3c& a, const Vec3c& b) {
  return Vec3c(a(1) * b(2) - a(2) * b(1), a(2) * b(0) - a(0) * b(2),
               a(0) * b(1) - a(1) * b(0));
}

Frequency shifted(const Frequency& z, double dk) {
  Frequency s = z;
  s.xi += dk;
  return s;
}

Mat14 unitary_completion(const Vec14& e) {
  Eigen::HouseholderQR<Mat14> qr(
      (Mat14() << e, Mat14::Identity().rightCols<13>()).finished());
  Mat14 Q = qr.householderQ();
  cd phase = e.dot(Q.col(0)); // |phase| = 1 up to rounding
  Q.col(0) *= std::conj(phase) / std::abs(phase);
  Q.col(0) = e; // exact first column
  return Q;
}

}  // namespace

Vec14 source_action(const PlasmaParams& p, int p_harmonic, const Vec14& u) {
  p.validate();
  if (p_harmonic != 1 && p_harmonic != -1)
    throw std::invalid_argument("harmonic index must be +1 or -1");
  Vec3c B = u.segment<3>(IB), ve = u.segment<3>(IVE);
  cd ne = u(INE);
  Vec3c vhat(0.0, 1.0, 0.0), vhatp(0.0, 0.0, 1.0);
  cd ipk = I * static_cast<double>(p_harmonic) * p.k;
  Vec3c erow = ne * vhat;
  Vec3c verow = -p.theta_e *
                (ccross(vhat, B) + ipk * ccross(ve, vhatp) + ipk * ve(0) * vhat);
  Vec14 out = Vec14::Zero();
  out.segment<3>(IE) = erow;
  out.segment<3>(IVE) = verow;
  return out;
}

Mat14 source_matrix(const PlasmaParams& p, int p_harmonic) {
  Mat14 M;
  for (int c = 0; c < 14; ++c)
    M.col(c) = source_action(p, p_harmonic, Vec14::Unit(c));
  return M;
}

Mat14 interaction_matrix(const PlasmaParams& p, int p_harmonic, int j, int jp,
                         const Frequency& zeta) {
  if (j < 1 || j > 5 || jp < 1 || jp > 5)
    throw std::invalid_argument("mode labels must be 1..5");
  Mat14 M = source_matrix(p, p_harmonic);
  auto dec_out = spectral_decomposition(p, shifted(zeta, p_harmonic * p.k));
  auto dec_in = spectral_decomposition(p, zeta);
  return dec_out.proj(j) * M * dec_in.proj(jp);
}

cd resonance_trace(const PlasmaParams& p, PairLabel pair, const Frequency& zeta) {
  if (!pair.valid()) throw std::invalid_argument("pair must satisfy 1 <= j < j' <= 5");
  Mat14 Bf = interaction_matrix(p, +1, pair.j, pair.jp, zeta);
  Mat14 Bb = interaction_matrix(p, -1, pair.jp, pair.j, shifted(zeta, p.k));
  return (Bf * Bb).trace();
}

std::optional<cd> trace_closed_form(const PlasmaParams& p, PairLabel pair,
                                    double xi) {
  p.validate();
  double th2 = p.theta_e * p.theta_e, k = p.k;
  int j = pair.j, jp = pair.jp;
  // |e_parallel|^2 = 2 exactly and |e_perp|^2 = 2 lambda_1^2, so each trace
  // carries a single lambda_2 in the denominator.
  if (j == 1 && jp == 2)
    return cd(-th2 * xi * xi / (4.0 * lam1(xi + k) * lam2(p, xi)), 0.0);
  if (j == 4 && jp == 5)
    return cd(-th2 * (xi + k) * (xi + k) / (4.0 * lam2(p, xi + k) * lam1(xi)),
              0.0);
  if (j == 1 && jp == 4)
    return cd(th2 * xi * xi / (4.0 * lam2(p, xi) * lam1(xi + k)), 0.0);
  if (j == 2 && jp == 5)
    return cd(th2 * (xi + k) * (xi + k) / (4.0 * lam2(p, xi + k) * lam1(xi)),
              0.0);
  if ((j == 2 && jp == 4) || (j == 2 && jp == 3) || (j == 3 && jp == 4))
    return cd(0.0, 0.0);
  return std::nullopt;
}

double acoustic_coupling(const PlasmaParams& p, PairLabel pair, double xi) {
  p.validate();
  bool is13 = (pair.j == 1 && pair.jp == 3);
  bool is35 = (pair.j == 3 && pair.jp == 5);
  if (!is13 && !is35)
    throw std::invalid_argument("acoustic coupling applies to pairs (1,3) and (3,5)");
  if (!(p.epsilon > 0.0))
    throw std::invalid_argument("acoustic coupling requires epsilon > 0");
  // (1,3): transverse mode at xi + k couples down to the acoustic mode at xi;
  // (3,5): acoustic at xi + k, transverse at xi.
  Frequency z_tr = is13 ? Frequency(xi + p.k, 0.0) : Frequency(xi, 0.0);
  Frequency z_ac = is13 ? Frequency(xi, 0.0) : Frequency(xi + p.k, 0.0);
  int harm = is13 ? -1 : +1;
  auto eb_tr = eigenbasis(p, z_tr);
  auto eb_ac = eigenbasis(p, z_ac);
  const Vec14& eperp = is13 ? eb_tr.e_perp : eb_tr.e_perp_minus;
  Vec14 Bu = source_action(p, harm, eperp);
  return std::max(std::abs(herm(Bu, eb_ac.acoustic_plus)),
                  std::abs(herm(Bu, eb_ac.acoustic_minus)));
}

ScalarizeResult scalarize(const Mat14& C12, const Mat14& C21) {
  Eigen::JacobiSVD<Mat14> s12(C12, Eigen::ComputeFullU);
  Eigen::JacobiSVD<Mat14> s21(C21, Eigen::ComputeFullU);
  double r12 = s12.singularValues()(1) / s12.singularValues()(0);
  double r21 = s21.singularValues()(1) / s21.singularValues()(0);
  if (!(r12 <= 1e-8) || !(r21 <= 1e-8))
    throw std::invalid_argument("scalarize requires rank-1 coupling matrices");
  Vec14 e = s12.matrixU().col(0);
  Vec14 f = s21.matrixU().col(0);
  ScalarizeResult out;
  out.c12 = herm(C12 * f, e); // e* C12 f
  out.c21 = herm(C21 * e, f);
  if (std::abs(out.c12 * out.c21) == 0.0)
    throw std::invalid_argument("scalarize requires a nonzero trace invariant");
  out.P1 = unitary_completion(e);
  out.P2 = unitary_completion(f);
  out.residual = std::max(r12, r21);
  return out;
}

namespace {

// Resonance existence threshold for the leading-order rate curves; the exact
// threshold k_c(theta_e) applies whenever it is finite.
bool raman_active(const PlasmaParams& p) {
  double w = p.omega();
  if (w * w - 2.0 * w <= 0.0) return false;
  double kc = thresholds(p).k_c;
  if (std::isfinite(kc) && std::abs(p.k) <= kc) return false;
  return true;
}

}  // namespace

GrowthRateReport growth_rates(const PlasmaParams& p, double amplitude_max) {
  p.validate();
  if (!(amplitude_max >= 0.0))
    throw std::invalid_argument("amplitude_max must be nonnegative");
  GrowthRateReport rep;
  rep.amplitude_max = amplitude_max;
  rep.stable = !raman_active(p);

  // Leading-order rates at the closed-form axis resonances. Negative-trace
  // pairs and transparent pairs contribute Re sqrt(tr) = 0.
  const std::pair<int, int> pairs[] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4},
                                       {2, 5}, {3, 4}, {3, 5}, {4, 5}};
  for (auto [j, jp] : pairs) rep.gamma_per_pair[{j, jp}] = 0.0;

  if (!rep.stable) {
    double w = p.omega();
    double s = std::sqrt(w * w - 2.0 * w);
    double ak = std::abs(p.k);
    // tr = theta^2 xi^2 / (4 (omega - 1)) at xi = -|k| -/+ s (mirrored in k).
    double g14 =
        amplitude_max * p.theta_e * (ak + s) / (2.0 * std::sqrt(w - 1.0));
    rep.gamma_per_pair[{1, 4}] = g14;
    rep.gamma_per_pair[{2, 5}] = g14;
    rep.gamma = g14;
    rep.argmax_pair = PairLabel{1, 4};
    rep.argmax_xi = (p.k > 0.0) ? -p.k - s : -p.k + s;
  }

  if (p.epsilon > 0.0) {
    // (1,3)/(3,5) couplings at their closed-form axis resonances.
    for (double xi : {0.0, -2.0 * p.k})
      rep.acoustic_bound =
          std::max(rep.acoustic_bound,
                   amplitude_max * acoustic_coupling(p, PairLabel{1, 3}, xi));
    for (double xi : {p.k, -p.k})
      rep.acoustic_bound =
          std::max(rep.acoustic_bound,
                   amplitude_max * acoustic_coupling(p, PairLabel{3, 5}, xi));
  }
  return rep;
}

RamanRatePair raman_rate_asymptotics(const PlasmaParams& p,
                                     double amplitude_max) {
  p.validate();
  if (!(amplitude_max >= 0.0))
    throw std::invalid_argument("amplitude_max must be nonnegative");
  RamanRatePair out;
  double w = p.omega();
  if (w * w - 2.0 * w <= 0.0) return out;
  double s = std::sqrt(w * w - 2.0 * w);
  double ak = std::abs(p.k);
  double scale = amplitude_max * std::sqrt(p.theta_e) /
                 (2.0 * std::sqrt(w - 1.0));
  out.backward = scale * (ak + s);
  out.forward = scale * (ak - s);
  return out;
}

std::vector<RamanEntry> classify_raman(const PlasmaParams& p) {
  p.validate();
  std::vector<RamanEntry> out;
  const std::pair<int, int> pairs[] = {{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4},
                                       {2, 5}, {3, 4}, {3, 5}, {4, 5}};
  for (auto [j, jp] : pairs) {
    PairLabel pair{j, jp};
    if (!pair_is_resonant(p, pair)) continue;
    for (const auto& rec : space_time_resonances(p, pair)) {
      RamanEntry e;
      e.pair = pair;
      e.xi = rec.zeta.xi;
      e.trace = resonance_trace(p, pair, rec.zeta);
      bool transparent = (j == 2 && (jp == 3 || jp == 4)) || (j == 3 && jp == 4);
      if (transparent) {
        e.cls = RamanClass::transparent;
      } else if (e.trace.real() > 1e-12) {
        // Group velocity of the electromagnetic branch decides the direction.
        double vg = (j == 1) ? (e.xi + p.k) / lam1(e.xi + p.k)
                             : -e.xi / lam1(e.xi);
        e.cls = (vg * p.k < 0.0) ? RamanClass::unstable_backward
                                 : RamanClass::unstable_forward;
      } else {
        e.cls = RamanClass::stable;
      }
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace emr
