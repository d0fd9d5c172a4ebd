#include <benchmark/benchmark.h>

#include <random>

#include "vaac/vaac.hpp"

using namespace vaac;

namespace {

// Two-state geometric model: continue pays 1 and loops with probability 0.9.
MdpModel make_geo() {
  Eigen::MatrixXd cont = Eigen::MatrixXd::Zero(2, 2);
  cont(0, 0) = 0.9;
  cont(0, 1) = 0.1;
  Eigen::MatrixXd stop = Eigen::MatrixXd::Zero(2, 2);
  stop(0, 1) = 1.0;
  Eigen::VectorXd r(2);
  r << 1.0, 0.0;
  return MdpModel({"s", "end"}, 0, 1, {"cont", "stop"}, r, {cont, stop});
}

// Dense 5-state / 3-action model, the size the test battery trains on.
MdpModel make_dense() {
  const int ns = 5, na = 3;
  std::mt19937_64 rng(12);
  std::vector<Eigen::MatrixXd> trans(na, Eigen::MatrixXd::Zero(ns, ns));
  for (int u = 0; u < na; ++u) {
    for (int x = 0; x < ns - 1; ++x) {
      Eigen::VectorXd w(ns);
      for (int y = 0; y < ns; ++y) w[y] = 0.05 + 0.95 * canonical_uniform(rng);
      w /= w.sum();
      for (int y = 0; y < ns; ++y) trans[u](x, y) = 0.85 * w[y];
      trans[u](x, ns - 1) += 0.15;
    }
  }
  Eigen::VectorXd r(ns);
  r << 1.3, 0.4, 1.9, 0.8, 0.0;
  return MdpModel({"s0", "s1", "s2", "s3", "end"}, 0, ns - 1, {"a", "b", "c"}, r, trans);
}

void bm_simulate_episode(benchmark::State& state) {
  MdpModel model = make_dense();
  SoftmaxPolicy policy(model);
  std::mt19937_64 rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_episode(model, policy, rng));
}
BENCHMARK(bm_simulate_episode);

void bm_evaluate_exact(benchmark::State& state) {
  MdpModel model = make_dense();
  SoftmaxPolicy policy(model);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_exact(model, policy, 0.2));
}
BENCHMARK(bm_evaluate_exact);

void bm_exact_gradient(benchmark::State& state) {
  MdpModel model = make_dense();
  SoftmaxPolicy policy(model);
  for (auto _ : state) benchmark::DoNotOptimize(exact_gradient(model, policy, 0.2));
}
BENCHMARK(bm_exact_gradient);

void bm_critic_update(benchmark::State& state) {
  MdpModel model = make_dense();
  SoftmaxPolicy policy(model);
  FeatureMap map = compatible_features(policy);
  CriticState critic = make_critic_state(map, map);
  std::mt19937_64 rng(2);
  Trajectory traj = simulate_episode(model, policy, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(critic = critic_update(critic, traj, map, map, policy, 1e-3));
}
BENCHMARK(bm_critic_update);

void bm_actor_gradient_estimate(benchmark::State& state) {
  MdpModel model = make_dense();
  SoftmaxPolicy policy(model);
  FeatureMap map = compatible_features(policy);
  CriticState critic = make_critic_state(map, map);
  std::mt19937_64 rng(3);
  for (int e = 0; e < 200; ++e)
    critic = critic_update(critic, simulate_episode(model, policy, rng), map, map, policy, 0.05);
  Trajectory traj = simulate_episode(model, policy, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(actor_gradient_estimate(traj, critic, map, map, policy, 0.2));
}
BENCHMARK(bm_actor_gradient_estimate);

void bm_training_episode(benchmark::State& state) {
  MdpModel model = make_geo();
  ExperimentConfig config;
  config.mu = 0.2;
  config.episodes = 1000;
  config.eval_every = 1000;
  config.seed = 5;
  for (auto _ : state) benchmark::DoNotOptimize(run_training(model, config));
  state.SetItemsProcessed(state.iterations() * config.episodes);
}
BENCHMARK(bm_training_episode);

}  // namespace

BENCHMARK_MAIN();
