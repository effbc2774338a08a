#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "emraman/symflow.hpp"

using namespace emr;

namespace {

PlasmaParams make_params(double k = 3.0, double th = 0.1, double eps = 0.0) {
  PlasmaParams p;
  p.epsilon = eps;
  p.theta_e = th;
  p.alpha_ie = 0.05;
  p.k = k;
  return p;
}

std::function<cd(const Vec2&)> gaussian(double w) {
  return [w](const Vec2& y) { return cd(std::exp(-y.squaredNorm() / (w * w)), 0.0); };
}

std::function<cd(const Vec2&)> constant_envelope() {
  return [](const Vec2&) { return cd(1.0, 0.0); };
}

// off-axis (1,4) resonance at fixed eta: bisection in xi
double offaxis_root14(const PlasmaParams& p, double eta1, double lo, double hi) {
  auto f = [&](double xi) {
    return phase_and_gradient(p, {1, 4}, Frequency(xi, eta1, 0.0)).phi;
  };
  REQUIRE(f(lo) * f(hi) < 0.0);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("zero-coupling flow matches the far-field oracle") {
  auto p = make_params();
  FlowGrid grid;
  grid.length = 40.0;
  grid.n_points = 256;
  grid.dt = 5e-3;
  grid.epsilon = 1e-2;
  Frequency zeta(1.0, 0.6, 0.0);
  auto spec = make_pair_block(p, {1, 4}, zeta, 0.0, gaussian(2.0), grid);

  std::vector<GridField> datum(4, GridField(grid.total()));
  for (int e = 0; e < 4; ++e)
    for (int i = 0; i < grid.total(); ++i) {
      Vec2 y = grid.point(i);
      datum[e](i) = std::exp(-y.squaredNorm() / 4.0) * cd(1.0 + 0.1 * e, 0.2);
    }

  double T = 0.5;
  auto traj = run_flow(spec, grid, T, &datum);
  auto oracle = far_field_oracle(spec, grid, T, datum);
  const auto& last = traj.snapshots.back();
  CHECK(traj.snapshot_times.back() == doctest::Approx(T));
  double err = 0.0;
  for (int e = 0; e < 4; ++e)
    err = std::max(err, (last[e] - oracle[e]).cwiseAbs().maxCoeff());
  CHECK(err < 1e-8);

  // pure transport conserves the L2 norm exactly; the discrete sup of each
  // component only wobbles at the grid-sampling level as the peak drifts
  for (double s : traj.l2_norm)
    CHECK(s == doctest::Approx(traj.l2_norm.front()).epsilon(1e-10));
  for (int q = 0; q < spec.size(); ++q)
    for (double s : traj.comp_sup[q])
      CHECK(s == doctest::Approx(traj.comp_sup[q].front()).epsilon(1e-3));
}

TEST_CASE("far-field oracle source terms") {
  auto p = make_params();
  FlowGrid grid;
  grid.n_points = 64;
  grid.dt = 1e-3;
  grid.epsilon = 1e-2;
  // component 2 of the (1,3) block has mu = 0 and no drift
  Frequency zeta(1.0, 0.0, 0.0);
  auto spec = make_pair_block(p, {1, 3}, zeta, 0.0, constant_envelope(), grid);
  CHECK(spec.comps[1].mu == 0.0);
  CHECK(spec.comps[1].dmu_deta.norm() == 0.0);
  double mu1 = spec.comps[0].mu;
  CHECK(mu1 != 0.0);

  std::vector<GridField> datum(4, GridField::Constant(grid.total(), cd(0.5, 0.0)));
  std::vector<GridField> source(4, GridField::Constant(grid.total(), cd(2.0, 0.0)));
  double T = 0.3;
  auto out = far_field_oracle(spec, grid, T, datum, &source);
  // mu = 0 row: datum + T * source exactly
  CHECK(std::abs(out[2](0) - cd(0.5 + 2.0 * T, 0.0)) < 1e-12);
  // oscillatory row: source contribution bounded by min(T, 2 eps / |mu|)
  std::vector<GridField> zero(4, GridField::Zero(grid.total()));
  auto osc = far_field_oracle(spec, grid, T, zero, &source);
  double bound = 2.0 * std::min(T, 2.0 * grid.epsilon / std::abs(mu1));
  CHECK(osc[0].cwiseAbs().maxCoeff() <= bound + 1e-12);
}

TEST_CASE("resonant ode oracle closed forms") {
  double eps = 1e-2;
  // t chosen so t sqrt(b+b-)/sqrt(eps) = 2
  auto m = resonant_ode_oracle(1.0, 1.0, eps, 2.0 * std::sqrt(eps));
  CHECK(std::abs(m(0, 0) - std::cosh(2.0)) < 1e-12);
  CHECK(std::abs(m(1, 1) - std::cosh(2.0)) < 1e-12);
  CHECK(std::abs(m(0, 1) - std::sinh(2.0)) < 1e-12);

  // rotation: entries bounded by 1
  for (double t : {0.01, 0.5, 2.0, 7.0}) {
    auto r = resonant_ode_oracle(1.0, -1.0, eps, t);
    CHECK(r.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
  }

  auto id = resonant_ode_oracle(0.0, 0.0, eps, 5.0);
  CHECK((id - Eigen::Matrix2cd::Identity()).norm() == 0.0);
}

TEST_CASE("resonant (1,4) run grows like cosh with the predicted rate") {
  auto p = make_params(3.0, 0.1);
  auto roots = space_time_resonances(p, {1, 4});
  REQUIRE(roots.size() == 2);
  Frequency zeta = roots.front().zeta; // the backward root, xi ~ -4.9
  REQUIRE(zeta.xi < -4.0);

  // figure-scaled coupling: gamma = 1.6720, trace = gamma^2
  double gamma = growth_rates(make_params(3.0, 1.0), 1.0).gamma;
  CHECK(gamma == doctest::Approx(1.6720).epsilon(1e-4));

  FlowGrid grid;
  grid.n_points = 64;
  grid.length = 40.0;
  grid.dt = 1e-4;
  grid.epsilon = 1e-4;
  auto spec = make_pair_block(p, {1, 4}, zeta, gamma * gamma,
                              constant_envelope(), grid);
  double seps = std::sqrt(grid.epsilon);
  double T = 5.0 * seps;
  auto traj = run_flow(spec, grid, T, nullptr, 1);

  // S_11 at y = 0 tracks cosh(gamma t / sqrt(eps)) within 2%
  int mid = grid.n_points / 2;
  for (size_t s = 0; s < traj.snapshots.size(); s += 25) {
    double t = traj.snapshot_times[s];
    double expected = std::cosh(gamma * t / seps);
    double got = std::abs(traj.snapshots[s][0](mid));
    CHECK(got == doctest::Approx(expected).epsilon(0.02));
  }
  // entrywise match with the 2x2 oracle at the final time
  auto m = resonant_ode_oracle(gamma, gamma, grid.epsilon, T);
  cd phase1 = std::exp(cd(0.0, -1.0) * spec.comps[0].mu * T / grid.epsilon);
  CHECK(std::abs(traj.snapshots.back()[0](mid) - phase1 * m(0, 0)) <
        2e-2 * std::abs(m(0, 0)));

  // fitted growth rate within 2% of gamma
  auto fit = estimate_growth(traj, 0.2 * T, T);
  CHECK(fit.reliable);
  CHECK(fit.rate == doctest::Approx(gamma).epsilon(0.02));
}

TEST_CASE("negative-trace (1,2) run is bounded and conserves the L2 norm") {
  auto p = make_params(3.0, 0.1);
  auto roots = space_time_resonances(p, {1, 2});
  REQUIRE(roots.size() == 2);
  Frequency zeta = roots.back().zeta;
  cd tr = resonance_trace(p, {1, 2}, zeta);
  REQUIRE(tr.real() < 0.0);

  FlowGrid grid;
  grid.n_points = 64;
  grid.dt = 1e-4;
  grid.epsilon = 1e-4;
  double T = 10.0 * std::sqrt(grid.epsilon);
  auto spec = make_pair_block(p, {1, 2}, zeta, tr, constant_envelope(), grid);
  auto traj = run_flow(spec, grid, T);
  for (size_t i = 0; i < traj.times.size(); ++i) {
    CHECK(traj.sup_norm[i] <= 1.05 * traj.sup_norm.front());
    CHECK(traj.l2_norm[i] <= (1.0 + 1e-6) * traj.l2_norm.front());
  }
}

// off-axis (1,4) resonance at fixed xi = -k: bisection in eta
double offaxis_root14_eta(const PlasmaParams& p, double lo, double hi) {
  auto f = [&](double eta) {
    return phase_and_gradient(p, {1, 4}, Frequency(-p.k, eta, 0.0)).phi;
  };
  REQUIRE(f(lo) * f(hi) < 0.0);
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

TEST_CASE("epsilon damping away from the space-time resonance") {
  auto p = make_params(3.0, 0.1);
  double eta1 = offaxis_root14_eta(p, 1.5, 2.0);
  Frequency zeta(-p.k, eta1, 0.0);
  auto pv = phase_and_gradient(p, {1, 4}, zeta);
  REQUIRE(std::abs(pv.phi) < 1e-10);
  REQUIRE(pv.dphi_deta.norm() >= 0.3); // |nu| >= 0.3, here ~0.90

  // elliptic coupling with predicted on-resonance rate gamma0; the symbol is
  // hyperbolic here (4 gamma0^2 < |nu|^2), so transport damps the growth
  double gamma0 = 0.15;
  CHECK(classify_delta_M(pv.phi, pv.dphi_deta, gamma0, gamma0, 1e-4,
                         Vec2(1.0, 0.0)) == SymbolClass::hyperbolic);

  double T = 1.2;
  std::vector<double> rates;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    FlowGrid grid;
    grid.length = 112.0;
    grid.n_points = 256;
    grid.epsilon = eps;
    grid.dt = 1e-3;
    auto spec =
        make_pair_block(p, {1, 4}, zeta, gamma0 * gamma0, gaussian(2.0), grid);
    auto traj = run_flow(spec, grid, T);
    auto fit = estimate_growth(traj, 0.5 * T, T);
    CHECK(fit.reliable);
    rates.push_back(fit.rate);
  }
  CHECK(rates[0] > rates[1]);
  CHECK(rates[1] > rates[2]);
  CHECK(rates[2] <= 0.3 * gamma0);
}

TEST_CASE("triplet block at the (2,3)-(3,4) intersection point") {
  auto p = make_params(3.0, 0.1);
  double r = p.k * std::sqrt(1.0 / (p.theta_e * p.theta_e) - 1.0);
  Frequency zeta(0.0, r, 0.0);
  // both phases vanish at the circle point
  CHECK(std::abs(phase_and_gradient(p, {2, 3}, zeta).phi) < 1e-12);
  CHECK(std::abs(phase_and_gradient(p, {3, 4},
                                    Frequency(zeta.xi - p.k, r, 0.0)).phi) <
        1e-12);

  FlowGrid grid;
  grid.length = 80.0;
  grid.n_points = 128;
  grid.dt = 1e-3;
  grid.epsilon = 1e-2;
  double T = 5.0 * std::sqrt(grid.epsilon);

  // physical couplings vanish (transparent pairs): no growth
  auto spec0 =
      make_triplet_block(p, {2, 3, 4}, zeta, 0.0, 0.0, gaussian(4.0), grid);
  auto traj0 = run_flow(spec0, grid, T);
  CHECK(traj0.sup_norm.back() ==
        doctest::Approx(traj0.sup_norm.front()).epsilon(1e-10));

  // synthetic couplings: rate approaches sqrt(b1 b2 + b3 b4)
  auto spec = make_triplet_block(p, {2, 3, 4}, zeta, 0.25, 0.16,
                                 gaussian(4.0), grid);
  auto traj = run_flow(spec, grid, T);
  auto fit = estimate_growth(traj, 0.6 * T, T);
  CHECK(fit.reliable);
  CHECK(fit.rate == doctest::Approx(std::sqrt(0.25 + 0.16)).epsilon(0.02));
}

TEST_CASE("time reversibility with frozen couplings") {
  auto p = make_params(3.0, 0.1);
  double xi = offaxis_root14(p, 0.8, -4.9, -4.0);
  Frequency zeta(xi, 0.8, 0.0);
  cd tr = resonance_trace(p, {1, 4}, zeta);

  FlowGrid grid;
  grid.length = 112.0;
  grid.n_points = 256;
  grid.epsilon = 1e-2;
  grid.dt = 1e-3;
  double T = 0.2;
  auto spec = make_pair_block(p, {1, 4}, zeta, tr, gaussian(2.0), grid);
  auto traj = run_flow(spec, grid, T);

  BlockSpec rev = spec;
  for (auto& c : rev.comps) {
    c.mu = -c.mu;
    c.dmu_deta = -c.dmu_deta;
  }
  for (auto& [edge, f] : rev.couplings) f = -f;
  auto back = run_flow(rev, grid, T, &traj.snapshots.back());
  auto id = identity_datum(spec, grid);
  double err = 0.0;
  for (int e = 0; e < 4; ++e)
    err = std::max(err,
                   (back.snapshots.back()[e] - id[e]).cwiseAbs().maxCoeff());
  CHECK(err < 1e-6);
}

TEST_CASE("growth estimation on analytic trajectories") {
  double eps = 1e-4, gamma0 = 1.5;
  FlowTrajectory traj;
  traj.epsilon = eps;
  traj.block_size = 2;
  traj.comp_sup.resize(2);
  double T = 5.0 * std::sqrt(eps);
  for (int i = 0; i <= 200; ++i) {
    double t = T * i / 200.0;
    auto m = resonant_ode_oracle(gamma0, gamma0, eps, t);
    traj.times.push_back(t);
    traj.sup_norm.push_back(m.norm());
    traj.l2_norm.push_back(m.norm());
    for (int q = 0; q < 2; ++q) traj.comp_sup[q].push_back(m.row(q).norm());
  }
  auto fit = estimate_growth(traj, 0.3 * T, T);
  CHECK(fit.reliable);
  CHECK(fit.rate == doctest::Approx(gamma0).epsilon(0.01));

  FlowTrajectory rot;
  rot.epsilon = eps;
  rot.block_size = 2;
  rot.comp_sup.resize(2);
  for (int i = 0; i <= 200; ++i) {
    double t = T * i / 200.0;
    auto m = resonant_ode_oracle(1.0, -1.0, eps, t);
    rot.times.push_back(t);
    rot.sup_norm.push_back(m.norm());
    rot.l2_norm.push_back(m.norm());
    for (int q = 0; q < 2; ++q) rot.comp_sup[q].push_back(m.row(q).norm());
  }
  auto rfit = estimate_growth(rot, 0.0, T);
  CHECK(std::abs(rfit.rate) <= 0.01 * gamma0);
  CHECK(!rfit.reliable);

  FlowTrajectory tiny = rot;
  tiny.times.resize(5);
  tiny.sup_norm.resize(5);
  CHECK_THROWS_AS(estimate_growth(tiny, 0.0, T), std::invalid_argument);
}

TEST_CASE("delta_M classification") {
  Vec2 yhat(1.0, 0.0);
  // away from the resonance: hyperbolic for small epsilon
  CHECK(classify_delta_M(0.5, Vec2(0.2, 0.0), 1.0, 1.0, 1e-6, yhat) ==
        SymbolClass::hyperbolic);
  // at the resonance with positive product: elliptic
  CHECK(classify_delta_M(0.0, Vec2::Zero(), 1.0, 1.0, 1e-4, yhat) ==
        SymbolClass::elliptic);
  // gradient term dominates
  CHECK(classify_delta_M(0.0, Vec2(3.0, 0.0), 1.0, 1.0, 1e-4, yhat) ==
        SymbolClass::hyperbolic);
  // balanced: marginal
  CHECK(classify_delta_M(0.0, Vec2(2.0, 0.0), 1.0, 1.0, 1e-4, yhat) ==
        SymbolClass::marginal);
}

TEST_CASE("guards: CFL, phase resolution, envelope support, grid") {
  auto p = make_params(3.0, 0.1);
  double xi = offaxis_root14(p, 0.8, -4.9, -4.0);
  Frequency zeta(xi, 0.8, 0.0);

  FlowGrid bad;
  bad.n_points = 100; // not a power of two
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  FlowGrid coarse;
  coarse.length = 112.0;
  coarse.n_points = 256;
  coarse.epsilon = 1e-4;
  coarse.dt = 0.05; // violates the shift constraint
  auto spec = make_pair_block(p, {1, 4}, zeta, 1.0, gaussian(2.0), coarse);
  CHECK_THROWS_AS(run_flow(spec, coarse, 0.1), RegimeError);

  // constant envelope with nonzero drift: wrap-around contamination
  FlowGrid grid;
  grid.length = 112.0;
  grid.n_points = 256;
  grid.epsilon = 1e-2;
  grid.dt = 1e-3;
  auto wide = make_pair_block(p, {1, 4}, zeta, 1.0, constant_envelope(), grid);
  CHECK_THROWS_AS(run_flow(wide, grid, 0.1), RegimeError);
}

TEST_CASE("trajectory csv export") {
  auto p = make_params(3.0, 0.1);
  auto roots = space_time_resonances(p, {1, 4});
  FlowGrid grid;
  grid.n_points = 32;
  grid.dt = 1e-3;
  grid.epsilon = 1e-2;
  auto spec = make_pair_block(p, {1, 4}, roots.front().zeta, 0.1,
                              constant_envelope(), grid);
  auto traj = run_flow(spec, grid, 0.05);
  std::ostringstream os;
  write_trajectory_csv(traj, os);
  std::string s = os.str();
  CHECK(s.rfind("t,sup_norm,l2_norm,sup_comp1,sup_comp2", 0) == 0);
  // deterministic: same run, same bytes
  std::ostringstream os2;
  write_trajectory_csv(run_flow(spec, grid, 0.05), os2);
  CHECK(s == os2.str());
}
