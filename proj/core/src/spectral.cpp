#include "emraman/spectral.hpp"

#include <cmath>

namespace emr {

namespace {

constexpr cd I(0.0, 1.0);

Eigen::Matrix3d cross_matrix(const Vec3& z) {
  Eigen::Matrix3d m;
  m << 0.0, -z(2), z(1), z(2), 0.0, -z(0), -z(1), z(0), 0.0;
  return m;
}

Vec14 assemble(const Vec3c& B, const Vec3c& E, const Vec3c& ve, cd ne,
               const Vec3c& vi, cd ni) {
  Vec14 u;
  u.segment<3>(IB) = B;
  u.segment<3>(IE) = E;
  u.segment<3>(IVE) = ve;
  u(INE) = ne;
  u.segment<3>(IVI) = vi;
  u(INI) = ni;
  return u;
}

// Transverse eigenvector at eigenvalue i*mu, mu = +-lambda_1, w unit, w.zeta = 0.
Vec14 transverse_vector(const PlasmaParams& p, const Frequency& zeta, double mu,
                        const Vec3& w, bool with_epsilon) {
  double se = with_epsilon ? std::sqrt(p.epsilon) : 0.0;
  Vec3c B = I * zeta.vec().cross(w).cast<cd>();
  Vec3c E = I * mu * w.cast<cd>();
  Vec3c vi = cd(-se / p.theta_e, 0.0) * w.cast<cd>();
  return assemble(B, E, w.cast<cd>(), 0.0, vi, 0.0);
}

// Longitudinal eigenvector at complex eigenvalue lam (= i*mu, mu != 0), d = zeta/|zeta|.
Vec14 longitudinal_vector(const PlasmaParams& p, const Frequency& zeta, cd lam,
                          const Vec3& d, bool with_epsilon) {
  double se = with_epsilon ? std::sqrt(p.epsilon) : 0.0;
  double th = p.theta_e, a = p.alpha_ie;
  double z2 = zeta.vec().squaredNorm();
  double zd = zeta.vec().dot(d);
  cd Es = lam + th * th * z2 / lam;
  cd ne = I * th * zd / lam;
  cd vis = -(se / th) * Es * lam / (lam * lam + a * a * se * se * z2);
  cd ni = (I * se / lam) * zd * vis;
  return assemble(Vec3c::Zero(), Es * d.cast<cd>(), d.cast<cd>(), ne,
                  vis * d.cast<cd>(), ni);
}

// Acoustic eigenvector at eigenvalue +-i lambda_3, unit Euclidean norm.
// Degenerate regimes (epsilon = 0, or zeta near 0) use the limiting expressions.
Vec14 acoustic_vector(const PlasmaParams& p, const Frequency& zeta, int sign,
                      const TransverseFrame& fr) {
  double th = p.theta_e, a = p.alpha_ie, eps = p.epsilon;
  double z = zeta.norm();
  double s = static_cast<double>(sign);
  Vec14 e;
  if (eps > 0.0 && z > 1e-9) {
    double mu3 = longitudinal_roots(p, z).mu3;
    e = longitudinal_vector(p, zeta, s * I * mu3, fr.d, true);
  } else if (eps > 0.0) {
    double se = std::sqrt(eps);
    double s2 = (a * a + 1.0) / (1.0 + eps / (th * th));
    double cvi = -(se / th) * (th * th - eps * s2) / (eps * (a * a - s2));
    e = assemble(Vec3c::Zero(), Vec3c::Zero(), fr.d.cast<cd>(),
                 s * th / (se * std::sqrt(s2)), cvi * fr.d.cast<cd>(),
                 s * cvi / std::sqrt(s2));
  } else if (z > 1e-9) {
    double m = 1.0 + th * th * z * z;
    double q0 = z * std::sqrt(a * a + 1.0 / m);
    cd ne = I / (th * z);
    cd vis = s * I * q0 * m / (th * z * z);
    cd ni = I * m / (th * z);
    e = assemble(Vec3c::Zero(), fr.d.cast<cd>(), Vec3c::Zero(), ne,
                 vis * fr.d.cast<cd>(), ni);
  } else {
    e = assemble(Vec3c::Zero(), Vec3c::Zero(), Vec3c::Zero(), I,
                 s * I * std::sqrt(a * a + 1.0) * fr.d.cast<cd>(), I);
  }
  return e / e.norm();
}

}  // namespace

Mat14 symbol_matrix(const PlasmaParams& p, const Frequency& zeta, bool with_epsilon) {
  p.validate();
  double se = with_epsilon ? std::sqrt(p.epsilon) : 0.0;
  double th = p.theta_e, a = p.alpha_ie;
  Vec3 zv = zeta.vec();
  Eigen::Matrix3cd Zx = (I * cross_matrix(zv).cast<cd>()).eval();
  Mat14 A = Mat14::Zero();
  A.block<3, 3>(IB, IE) = Zx;
  A.block<3, 3>(IE, IB) = -Zx;
  A.block<3, 3>(IE, IVE) = -Eigen::Matrix3cd::Identity();
  A.block<3, 3>(IE, IVI) = (se / th) * Eigen::Matrix3cd::Identity();
  A.block<3, 3>(IVE, IE) = Eigen::Matrix3cd::Identity();
  A.block<3, 1>(IVE, INE) = I * th * zv.cast<cd>();
  A.block<1, 3>(INE, IVE) = I * th * zv.transpose().cast<cd>();
  A.block<3, 3>(IVI, IE) = -(se / th) * Eigen::Matrix3cd::Identity();
  A.block<3, 1>(IVI, INI) = I * a * a * se * zv.cast<cd>();
  A.block<1, 3>(INI, IVI) = I * se * zv.transpose().cast<cd>();
  return A;
}

LongitudinalRoots longitudinal_roots(const PlasmaParams& p, double z) {
  double th = p.theta_e, a = p.alpha_ie, eps = p.epsilon;
  double z2 = z * z;
  double b = 1.0 + th * th * z2 + eps * a * a * z2 + eps / (th * th);
  double c = eps * z2 * (a * a + a * a * th * th * z2 + 1.0);
  double disc = b * b - 4.0 * c;
  LongitudinalRoots r;
  if (disc <= 1e-12 * b * b) {
    r.degenerate = true;
    disc = std::max(disc, 0.0);
  }
  r.mu2 = std::sqrt((b + std::sqrt(disc)) / 2.0);
  r.mu3 = std::sqrt(c) / r.mu2;
  return r;
}

std::array<double, 5> eigenvalues(const PlasmaParams& p, const Frequency& zeta,
                                  bool with_epsilon) {
  p.validate();
  double z2 = zeta.vec().squaredNorm();
  double eps = with_epsilon ? p.epsilon : 0.0;
  double l1 = std::sqrt(1.0 + eps / (p.theta_e * p.theta_e) + z2);
  double l2, l3;
  if (eps > 0.0) {
    LongitudinalRoots r = longitudinal_roots(p, std::sqrt(z2));
    l2 = r.mu2;
    l3 = r.mu3;
  } else {
    l2 = std::sqrt(1.0 + p.theta_e * p.theta_e * z2);
    l3 = 0.0;
  }
  return {l1, l2, l3, -l2, -l1};
}

Vec3 grad_lambda(const PlasmaParams& p, int j, const Frequency& zeta) {
  Vec3 zv = zeta.vec();
  double z2 = zv.squaredNorm();
  switch (j) {
    case 1: return zv / std::sqrt(1.0 + z2);
    case 2: return p.theta_e * p.theta_e * zv / std::sqrt(1.0 + p.theta_e * p.theta_e * z2);
    case 3: return Vec3::Zero();
    case 4: return -grad_lambda(p, 2, zeta);
    case 5: return -grad_lambda(p, 1, zeta);
    default: throw std::invalid_argument("mode label must be 1..5");
  }
}

TransverseFrame transverse_frame(const Frequency& zeta) {
  TransverseFrame fr;
  Vec3 zv = zeta.vec();
  double z = zv.norm();
  fr.d = (z > 1e-14) ? Vec3(zv / z) : Vec3(1.0, 0.0, 0.0);
  Vec3 vhat(0.0, 1.0, 0.0);
  Vec3 u1 = vhat - vhat.dot(fr.d) * fr.d;
  if (u1.norm() < 1e-10) {
    Vec3 vp(0.0, 0.0, 1.0);
    u1 = vp - vp.dot(fr.d) * fr.d;
  }
  fr.u1 = u1.normalized();
  fr.u2 = fr.d.cross(fr.u1);
  return fr;
}

Eigenbasis eigenbasis(const PlasmaParams& p, const Frequency& zeta) {
  p.validate();
  double z = zeta.norm();
  if (z < 1e-12)
    throw std::invalid_argument("eigenbasis requires zeta != 0");
  TransverseFrame fr = transverse_frame(zeta);
  auto lam = eigenvalues(p, zeta, true);
  Eigenbasis eb;
  eb.e_perp = transverse_vector(p, zeta, lam[0], fr.u1, true);
  eb.e_perp_prime = transverse_vector(p, zeta, lam[0], fr.u2, true);
  eb.e_perp_minus = transverse_vector(p, zeta, -lam[0], fr.u1, true);
  eb.e_perp_prime_minus = transverse_vector(p, zeta, -lam[0], fr.u2, true);
  eb.e_par_plus = longitudinal_vector(p, zeta, I * lam[1], fr.d, true);
  eb.e_par_minus = longitudinal_vector(p, zeta, -I * lam[1], fr.d, true);
  eb.acoustic_plus = acoustic_vector(p, zeta, +1, fr);
  eb.acoustic_minus = acoustic_vector(p, zeta, -1, fr);

  double se = std::sqrt(p.epsilon), th = p.theta_e, a = p.alpha_ie;
  double z2 = z * z;
  Vec3 zv = zeta.vec();
  eb.kernel[0] = assemble(fr.d.cast<cd>(), Vec3c::Zero(), Vec3c::Zero(), 0.0,
                          Vec3c::Zero(), 0.0);
  for (int j = 0; j < 2; ++j) {
    const Vec3& u = (j == 0) ? fr.u1 : fr.u2;
    Vec3c Bu = -I * zv.cross(u).cast<cd>() / z2;
    eb.kernel[1 + j] = assemble(Bu, Vec3c::Zero(), u.cast<cd>(), 0.0,
                                Vec3c::Zero(), 0.0);
    eb.kernel[3 + j] = assemble(cd(-se / th, 0.0) * Bu, Vec3c::Zero(),
                                Vec3c::Zero(), 0.0, u.cast<cd>(), 0.0);
  }
  eb.kernel[5] = assemble(Vec3c::Zero(), I * th * a * a * zv.cast<cd>(),
                          Vec3c::Zero(), cd(-a * a, 0.0), Vec3c::Zero(), 1.0);
  return eb;
}

SpectralDecomposition spectral_decomposition(const PlasmaParams& p,
                                             const Frequency& zeta) {
  p.validate();
  PlasmaParams p0 = p;
  p0.epsilon = 0.0;
  TransverseFrame fr = transverse_frame(zeta);
  auto lam0 = eigenvalues(p0, zeta, false);
  auto lame = eigenvalues(p, zeta, true);

  auto rank1 = [](const Vec14& e) -> Mat14 {
    return (e * e.adjoint()) / e.squaredNorm();
  };

  SpectralDecomposition dec;
  dec.frequency = zeta;
  Mat14 pi1 = rank1(transverse_vector(p0, zeta, lam0[0], fr.u1, false)) +
              rank1(transverse_vector(p0, zeta, lam0[0], fr.u2, false));
  Mat14 pi5 = rank1(transverse_vector(p0, zeta, -lam0[0], fr.u1, false)) +
              rank1(transverse_vector(p0, zeta, -lam0[0], fr.u2, false));
  Mat14 pi2 = rank1(longitudinal_vector(p0, zeta, I * lam0[1], fr.d, false));
  Mat14 pi4 = rank1(longitudinal_vector(p0, zeta, -I * lam0[1], fr.d, false));
  Mat14 pi3 = Mat14::Identity() - pi1 - pi2 - pi4 - pi5;

  dec.entries[0] = {1, lame[0], pi1};
  dec.entries[1] = {2, lame[1], pi2};
  dec.entries[2] = {3, 0.0, pi3};
  dec.entries[3] = {4, lame[3], pi4};
  dec.entries[4] = {5, lame[4], pi5};

  Mat14 recon = Mat14::Zero();
  for (const auto& e : dec.entries) recon += I * e.eigenvalue * e.projector;
  Mat14 diff = symbol_matrix(p, zeta, true) - recon;
  dec.remainder = (p.epsilon > 0.0) ? Mat14((1.0 / std::sqrt(p.epsilon)) * diff)
                                    : diff;
  return dec;
}

}  // namespace emr
