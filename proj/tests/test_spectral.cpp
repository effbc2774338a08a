#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "emraman/spectral.hpp"

using namespace emr;

namespace {

const cd I(0.0, 1.0);

PlasmaParams base_params(double eps = 0.0, double th = 0.1, double a = 0.05,
                         double k = 3.0) {
  PlasmaParams p;
  p.epsilon = eps;
  p.theta_e = th;
  p.alpha_ie = a;
  p.k = k;
  return p;
}

Frequency random_zeta(std::mt19937& rng, double radius) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Frequency z;
  do {
    z = Frequency(radius * u(rng), radius * u(rng), radius * u(rng));
  } while (z.norm() > radius);
  return z;
}

double eig_residual(const Mat14& A, const Vec14& e, cd lam) {
  return (A * e - lam * e).norm() / e.norm();
}

}  // namespace

TEST_CASE("symbol structure at zeta = 0") {
  auto p = base_params();
  Mat14 A = symbol_matrix(p, Frequency(0.0, 0.0), false);
  Vec14 u = Vec14::Zero();
  u.segment<3>(IE) = Vec3c(1.0, 2.0, 3.0);
  Vec14 Au = A * u;
  CHECK(Au.segment<3>(IVE).isApprox(Vec3c(1.0, 2.0, 3.0)));
  CHECK(Au.segment<3>(IB).norm() == doctest::Approx(0.0));
  CHECK(std::abs(Au(INE)) == doctest::Approx(0.0));
  Vec14 v = Vec14::Zero();
  v.segment<3>(IVE) = Vec3c(1.0, 0.0, 0.0);
  CHECK((A * v).segment<3>(IE).isApprox(Vec3c(-1.0, 0.0, 0.0)));
}

TEST_CASE("epsilon coupling entry") {
  auto p = base_params(0.01);
  Mat14 A = symbol_matrix(p, Frequency(1.0, 0.5), true);
  CHECK(A(IE, IVI).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(A(IVI, IE).real() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("spectrum is purely imaginary") {
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 100; ++trial) {
    auto p = base_params(trial % 2 ? 0.01 : 0.0);
    Frequency z = random_zeta(rng, 10.0);
    Mat14 A = symbol_matrix(p, z, true);
    Eigen::ComplexEigenSolver<Mat14> es(A, false);
    CHECK(es.eigenvalues().real().cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("eigenvalue closed forms") {
  auto p = base_params();
  auto lam = eigenvalues(p, Frequency(3.0, 0.0), false);
  CHECK(lam[0] == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
  CHECK(lam[2] == 0.0);
  CHECK(lam[4] == doctest::Approx(-std::sqrt(10.0)).epsilon(1e-14));
  auto lam2 = eigenvalues(p, Frequency(10.0, 0.0), false);
  CHECK(lam2[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lam2[3] == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-14));
}

TEST_CASE("quartic roots match small-epsilon expansions") {
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    auto p = base_params(eps);
    double worst2 = 0.0, worst3 = 0.0;
    for (double z = 0.25; z <= 10.0; z += 0.25) {
      auto r = longitudinal_roots(p, z);
      CHECK(!r.degenerate);
      double th2 = p.theta_e * p.theta_e, a2 = p.alpha_ie * p.alpha_ie;
      double m = 1.0 + th2 * z * z;
      double mu2_ref = std::sqrt(m + eps / (th2 * m));
      double mu3_ref =
          std::sqrt(eps) * std::sqrt(a2 * z * z + 1.0 / th2 - 1.0 / (th2 * m));
      worst2 = std::max(worst2, std::abs(r.mu2 - mu2_ref));
      worst3 = std::max(worst3, std::abs(r.mu3 - mu3_ref));
      // the quartic itself is satisfied
      double b = 1.0 + th2 * z * z + eps * a2 * z * z + eps / th2;
      double c = eps * z * z * (a2 + a2 * th2 * z * z + 1.0);
      for (double mu : {r.mu2, r.mu3}) {
        double q = ((mu * mu - b) * mu * mu + c);
        CHECK(std::abs(q) < 1e-10 * std::max(1.0, b * b));
      }
    }
    CHECK(worst2 <= 20.0 * eps);
    CHECK(worst3 <= 20.0 * eps);
  }
}

TEST_CASE("eigenbasis residuals and explicit forms") {
  std::mt19937 rng(777);
  for (int trial = 0; trial < 40; ++trial) {
    auto p = base_params(trial % 2 ? 1e-3 : 0.0);
    Frequency z = random_zeta(rng, 8.0);
    if (z.norm() < 0.3) continue;
    Mat14 A = symbol_matrix(p, z, true);
    auto lam = eigenvalues(p, z, true);
    auto eb = eigenbasis(p, z);
    CHECK(eig_residual(A, eb.e_perp, I * lam[0]) < 1e-10);
    CHECK(eig_residual(A, eb.e_perp_prime, I * lam[0]) < 1e-10);
    CHECK(eig_residual(A, eb.e_perp_minus, -I * lam[0]) < 1e-10);
    CHECK(eig_residual(A, eb.e_par_plus, I * lam[1]) < 1e-10);
    CHECK(eig_residual(A, eb.e_par_minus, -I * lam[1]) < 1e-10);
    double mu3 = (p.epsilon > 0.0) ? longitudinal_roots(p, z.norm()).mu3 : 0.0;
    CHECK(eig_residual(A, eb.acoustic_plus, I * mu3) < 1e-8);
    CHECK(eig_residual(A, eb.acoustic_minus, -I * mu3) < 1e-8);
    for (const auto& kv : eb.kernel) CHECK((A * kv).norm() < 1e-10 * kv.norm());
  }

  auto p = base_params();
  Frequency z(3.0, 0.0);
  auto eb = eigenbasis(p, z);
  Vec14 expected = Vec14::Zero();
  expected.segment<3>(IB) = I * Vec3(3.0, 0.0, 0.0).cross(Vec3(0.0, 1.0, 0.0)).cast<cd>();
  expected.segment<3>(IE) = I * std::sqrt(10.0) * Vec3c(0.0, 1.0, 0.0);
  expected.segment<3>(IVE) = Vec3c(0.0, 1.0, 0.0);
  CHECK((eb.e_perp - expected).norm() < 1e-12);
  CHECK(eb.e_par_plus.norm() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  // first kernel vector: B parallel to zeta, all else zero
  CHECK(eb.kernel[0](IB).real() == doctest::Approx(1.0));
  CHECK(eb.kernel[0].tail<11>().norm() == doctest::Approx(0.0));
}

TEST_CASE("projector algebra and reconstruction") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = base_params();
    Frequency z = random_zeta(rng, 20.0);
    auto dec = spectral_decomposition(p, z);
    Mat14 sum = Mat14::Zero(), recon = Mat14::Zero();
    for (const auto& e : dec.entries) {
      sum += e.projector;
      recon += I * e.eigenvalue * e.projector;
      CHECK((e.projector * e.projector - e.projector).norm() < 1e-10);
    }
    CHECK((sum - Mat14::Identity()).norm() < 1e-10);
    for (int a = 1; a <= 5; ++a)
      for (int b = a + 1; b <= 5; ++b)
        CHECK((dec.proj(a) * dec.proj(b)).norm() < 1e-10);
    Mat14 A0 = symbol_matrix(p, z, false);
    CHECK((A0 - recon).norm() <= 1e-10 * std::max(1.0, A0.norm()));
    // ranks via traces
    CHECK(dec.proj(1).trace().real() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(dec.proj(2).trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dec.proj(3).trace().real() == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(dec.proj(4).trace().real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(dec.proj(5).trace().real() == doctest::Approx(2.0).epsilon(1e-9));
  }
}

TEST_CASE("rotation invariance of eigenvalues") {
  auto p = base_params(1e-3);
  auto a = eigenvalues(p, Frequency(2.0, 0.0), true);
  auto b = eigenvalues(p, Frequency(0.0, 2.0), true);
  for (int j = 0; j < 5; ++j) CHECK(a[j] == doctest::Approx(b[j]).epsilon(1e-13));
}

TEST_CASE("remainder bound R_A <= C (1 + |zeta|)") {
  auto p = base_params(1e-4);
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Frequency z = random_zeta(rng, 20.0);
    auto dec = spectral_decomposition(p, z);
    // regression constant fitted once over the sweep and frozen
    CHECK(dec.remainder.norm() <= 12.0 * (1.0 + z.norm()));
  }
}

TEST_CASE("gradients: closed form vs finite differences, magnitude < 1") {
  auto p = base_params();
  std::mt19937 rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    Frequency z = random_zeta(rng, 10.0);
    for (int j : {1, 2, 4, 5}) {
      Vec3 g = grad_lambda(p, j, z);
      CHECK(g.norm() < 1.0);
      double h = 1e-5;
      for (int c = 0; c < 3; ++c) {
        Vec3 dz = Vec3::Zero();
        dz(c) = h;
        auto lp = eigenvalues(p, Frequency(z.xi + dz(0), z.eta(0) + dz(1), z.eta(1) + dz(2)), false);
        auto lm = eigenvalues(p, Frequency(z.xi - dz(0), z.eta(0) - dz(1), z.eta(1) - dz(2)), false);
        double fd = (lp[j - 1] - lm[j - 1]) / (2.0 * h);
        CHECK(g(c) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("epsilon continuity of eigenvalues") {
  std::mt19937 rng(31337);
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    auto p = base_params(eps);
    for (int trial = 0; trial < 30; ++trial) {
      Frequency z = random_zeta(rng, 10.0);
      auto le = eigenvalues(p, z, true);
      auto l0 = eigenvalues(p, z, false);
      for (int j : {0, 1, 3, 4})
        CHECK(std::abs(le[j] - l0[j]) <= 60.0 * eps);
      CHECK(std::abs(le[2]) <= 4.0 * std::sqrt(eps) * (1.0 + z.norm()));
    }
  }
}
