#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "battery.hpp"
#include "vaac/vaac.hpp"

using namespace vaac;

namespace {

Trajectory two_step_geo() {
  Trajectory traj;
  traj.steps = {{0, 0, 1.0}, {0, 1, 1.0}};  // continue once, then stop
  return traj;
}

}  // namespace

TEST_CASE("fresh critic state is zero with the map dimensions") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo);
  FeatureMap map = compatible_features(pol);
  CriticState state = make_critic_state(map, map);
  CHECK(state.w_j.size() == 1);
  CHECK(state.w_m.size() == 1);
  CHECK(state.w_tilde_j.size() == 1);
  CHECK(state.w_j.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(state.j0 == 0.0);
  CHECK(state.episode_index == 0);
}

TEST_CASE("single update from zero matches hand arithmetic") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo, Eigen::VectorXd::Zero(1), {1});  // parameter = continue logit
  FeatureMap map = compatible_features(pol);
  Trajectory traj = two_step_geo();

  // Suffix returns G = (2, 1), prefixes C = (0, 1), episode return B = 2,
  // phi(s, cont) = 0.5, phi(s, stop) = -0.5, alpha = 0.1:
  //   w_j     = 0.1 * (0.5 * 2 - 0.5 * 1)      = 0.05
  //   w_m     = 0.1 * (0.5 * 4 - 0.5 * 1)      = 0.15
  //   w_tilde = 0.1 * (0 + 1 * (-0.5) * 1)     = -0.05
  //   j0      = 0.1 * 2                        = 0.2
  CriticState next = critic_update(make_critic_state(map, map), traj, map, map, pol, 0.1);
  CHECK(next.w_j[0] == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(next.w_m[0] == doctest::Approx(0.15).epsilon(1e-14));
  CHECK(next.w_tilde_j[0] == doctest::Approx(-0.05).epsilon(1e-14));
  CHECK(next.j0 == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(next.episode_index == 1);
}

TEST_CASE("residuals are taken at the episode-start weights") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo, Eigen::VectorXd::Zero(1), {1});
  FeatureMap map = compatible_features(pol);
  Trajectory traj = two_step_geo();
  const double a = 0.1;

  CriticState s1 = critic_update(make_critic_state(map, map), traj, map, map, pol, a);
  CriticState s2 = critic_update(s1, traj, map, map, pol, a);

  auto expect = [&](double w, auto target) {
    // Both steps see phi = +0.5 then -0.5; residuals use w from before the episode.
    return w + a * (0.5 * (target(0) - 0.5 * w) - 0.5 * (target(1) + 0.5 * w));
  };
  double g[2] = {2.0, 1.0};
  double g2[2] = {4.0, 1.0};
  CHECK(s2.w_j[0] ==
        doctest::Approx(expect(s1.w_j[0], [&](int t) { return g[t]; })).epsilon(1e-14));
  CHECK(s2.w_m[0] ==
        doctest::Approx(expect(s1.w_m[0], [&](int t) { return g2[t]; })).epsilon(1e-14));
  // Prefix weights: only t = 1 contributes, with C = 1.
  double wt = s1.w_tilde_j[0];
  CHECK(s2.w_tilde_j[0] ==
        doctest::Approx(wt + a * (1.0 * (-0.5) * (1.0 + 0.5 * wt))).epsilon(1e-14));
  CHECK(s2.j0 == doctest::Approx(s1.j0 + a * (2.0 - s1.j0)).epsilon(1e-14));
  CHECK(s2.episode_index == 2);
}

TEST_CASE("augmented constant feature accumulates the plain return sum") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo, Eigen::VectorXd::Zero(1), {1});
  FeatureMap map_j = augmented_features(
      pol, [](int, int) { return Eigen::VectorXd::Ones(1); }, 1);
  FeatureMap map_m = compatible_features(pol);

  CriticState state = make_critic_state(map_j, map_m);
  CHECK(state.w_j.size() == 2);
  CHECK(state.w_tilde_j.size() == 2);
  CHECK(state.w_m.size() == 1);

  CriticState next = critic_update(state, two_step_geo(), map_j, map_m, pol, 0.1);
  // Constant coordinate: 0.1 * (G_0 + G_1) = 0.1 * 3.
  CHECK(next.w_j[1] == doctest::Approx(0.3).epsilon(1e-14));
  // Score coordinate unchanged from the compatible run.
  CHECK(next.w_j[0] == doctest::Approx(0.05).epsilon(1e-14));
}

TEST_CASE("zero rewards leave a zero critic at zero") {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2, 2);
  p(0, 0) = 0.5;
  p(0, 1) = 0.5;
  MdpModel model({"s", "end"}, 0, 1, {"u", "v"}, Eigen::VectorXd::Zero(2), {p, p});
  SoftmaxPolicy pol(model);
  FeatureMap map = compatible_features(pol);
  CriticState state = make_critic_state(map, map);
  std::mt19937_64 rng(21);
  for (int e = 0; e < 100; ++e)
    state = critic_update(state, simulate_episode(model, pol, rng), map, map, pol, 0.5);
  CHECK(state.w_j.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(state.w_m.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(state.w_tilde_j.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(state.j0 == 0.0);
  CHECK(state.episode_index == 100);
}

TEST_CASE("fixed point on the geometric model") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo, Eigen::VectorXd::Zero(1), {1});
  FeatureMap map = compatible_features(pol);
  CriticFixedPoint fp = critic_fixed_point(geo, pol, map, map);
  CHECK(fp.w_j[0] == doctest::Approx(1.636363636363636).epsilon(1e-13));
  CHECK(fp.w_m[0] == doctest::Approx(7.586776859504130).epsilon(1e-13));
  CHECK(fp.w_tilde_j[0] == doctest::Approx(1.636363636363636).epsilon(1e-13));
  CHECK(fp.j0 == doctest::Approx(1.818181818181818).epsilon(1e-14));

  // Same numbers as direct projections of the oracle tables.
  ExactEvaluation ev = evaluate_exact(geo, pol, 0.0);
  CHECK(fp.w_j[0] ==
        doctest::Approx(projection_weights(ev.j.sa, map, pol, geo, ev.q_sa)[0]).epsilon(1e-13));
  CHECK(fp.w_m[0] ==
        doctest::Approx(projection_weights(ev.m.sa, map, pol, geo, ev.q_sa)[0]).epsilon(1e-13));
  CHECK(fp.w_tilde_j[0] ==
        doctest::Approx(projection_weights(ev.j.sa, map, pol, geo, ev.qtilde_sa)[0])
            .epsilon(1e-13));
}

TEST_CASE("identical actions give zero weights and the plain start value") {
  MdpModel path = zoo::make_two_action_path(0.1);
  SoftmaxPolicy pol(path);
  FeatureMap map = compatible_features(pol);
  CriticFixedPoint fp = critic_fixed_point(path, pol, map, map);
  CHECK(fp.w_j.lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(fp.w_m.lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(fp.w_tilde_j.lpNorm<Eigen::Infinity>() < 1e-12);
  CHECK(fp.j0 == doctest::Approx(28.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("fixed point gap arithmetic") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo, Eigen::VectorXd::Zero(1), {1});
  FeatureMap map = compatible_features(pol);
  CriticFixedPoint fp = critic_fixed_point(geo, pol, map, map);

  CriticState at_fp = make_critic_state(map, map);
  at_fp.w_j = fp.w_j;
  at_fp.w_m = fp.w_m;
  at_fp.w_tilde_j = fp.w_tilde_j;
  at_fp.j0 = fp.j0;
  CHECK(critic_fixed_point_gap(at_fp, fp) == 0.0);

  CriticState off = at_fp;
  off.w_m[0] += 0.75;
  off.j0 -= 0.25;
  CHECK(critic_fixed_point_gap(off, fp) == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("updates are stationary in expectation at the fixed point") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo);
  FeatureMap map = compatible_features(pol);
  CriticFixedPoint fp = critic_fixed_point(geo, pol, map, map);
  CriticState at_fp = make_critic_state(map, map);
  at_fp.w_j = fp.w_j;
  at_fp.w_m = fp.w_m;
  at_fp.w_tilde_j = fp.w_tilde_j;
  at_fp.j0 = fp.j0;

  std::mt19937_64 rng(13);
  const long long n = 20000;
  double sum[4] = {0, 0, 0, 0}, sumsq[4] = {0, 0, 0, 0};
  for (long long e = 0; e < n; ++e) {
    Trajectory traj = simulate_episode(geo, pol, rng);
    CriticState upd = critic_update(at_fp, traj, map, map, pol, 1.0);
    double delta[4] = {upd.w_j[0] - fp.w_j[0], upd.w_m[0] - fp.w_m[0],
                       upd.w_tilde_j[0] - fp.w_tilde_j[0], upd.j0 - fp.j0};
    for (int i = 0; i < 4; ++i) {
      sum[i] += delta[i];
      sumsq[i] += delta[i] * delta[i];
    }
  }
  for (int i = 0; i < 4; ++i) {
    double mean = sum[i] / n;
    double se = std::sqrt((sumsq[i] / n - mean * mean) / n);
    CHECK(std::abs(mean) < 3.0 * se);
  }
}

TEST_CASE("decaying steps reach the fixed point") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo);
  FeatureMap map = compatible_features(pol);
  CriticFixedPoint fp = critic_fixed_point(geo, pol, map, map);
  CriticState state = make_critic_state(map, map);
  std::mt19937_64 rng(1);
  const long long n = 2000000;
  for (long long e = 0; e < n; ++e) {
    double alpha = 2.0 / static_cast<double>(e + 1);
    state = critic_update(state, simulate_episode(geo, pol, rng), map, map, pol, alpha);
  }
  CHECK(state.episode_index == n);
  CHECK(critic_fixed_point_gap(state, fp) < 0.05);
}

TEST_CASE("oversized steps raise a divergence error") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo);
  FeatureMap map = compatible_features(pol);
  CriticState state = make_critic_state(map, map);
  std::mt19937_64 rng(5);
  bool threw = false;
  try {
    for (int e = 0; e < 2000; ++e)
      state = critic_update(state, simulate_episode(geo, pol, rng), map, map, pol, 50.0);
  } catch (const DivergenceError& err) {
    threw = true;
    std::string what = err.what();
    CHECK(what.find("alpha = 50") != std::string::npos);
    CHECK(what.find("reduce the critic step size") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("dimension mismatches are rejected") {
  MdpModel geo = zoo::make_geo();
  SoftmaxPolicy pol(geo);
  FeatureMap map = compatible_features(pol);
  CriticState state = make_critic_state(map, map);
  state.w_j = Eigen::VectorXd::Zero(3);
  CHECK_THROWS_AS(critic_update(state, two_step_geo(), map, map, pol, 0.1), ContractError);
}
