#include <benchmark/benchmark.h>

#include <vector>

#include "fbrl/backward_model.hpp"
#include "fbrl/ddqn_agent.hpp"
#include "fbrl/environment.hpp"
#include "fbrl/imagination.hpp"
#include "fbrl/mlp.hpp"
#include "fbrl/replay_buffer.hpp"
#include "fbrl/rng.hpp"

namespace {

void bm_mlp_forward(benchmark::State& state) {
  fbrl::Rng rng(1);
  fbrl::MlpNetwork net =
      fbrl::MlpNetwork::seeded(2, static_cast<int>(state.range(0)), 4, rng);
  std::vector<double> input{3.0, 4.0};
  std::vector<double> output(4);
  for (auto _ : state) {
    net.forward(input, output);
    benchmark::DoNotOptimize(output.data());
  }
}
BENCHMARK(bm_mlp_forward)->Arg(32)->Arg(100);

void bm_mlp_train_step(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  fbrl::Rng rng(2);
  fbrl::MlpNetwork net = fbrl::MlpNetwork::seeded(2, 32, 4, rng);
  std::vector<double> inputs(batch * 2, 1.0);
  std::vector<double> grads(batch * 4, 0.01);
  for (auto _ : state) {
    net.train_step(inputs, grads, batch, 1e-5);
  }
}
BENCHMARK(bm_mlp_train_step)->Arg(1)->Arg(100);

void bm_env_step_gridworld(benchmark::State& state) {
  fbrl::EnvironmentSpec spec = fbrl::make_gridworld(20);
  fbrl::StateVector s = fbrl::reset(spec);
  int a = 0;
  for (auto _ : state) {
    fbrl::StepResult res = fbrl::step(spec, s, a);
    benchmark::DoNotOptimize(res.next_state.data());
    a = (a + 1) % 4;
  }
}
BENCHMARK(bm_env_step_gridworld);

void bm_env_step_hanoi(benchmark::State& state) {
  fbrl::EnvironmentSpec spec = fbrl::make_hanoi(3);
  fbrl::StateVector s = fbrl::reset(spec);
  int a = 0;
  for (auto _ : state) {
    fbrl::StepResult res = fbrl::step(spec, s, a);
    benchmark::DoNotOptimize(res.next_state.data());
    a = (a + 1) % 9;
  }
}
BENCHMARK(bm_env_step_hanoi);

void bm_replay_append_sample(benchmark::State& state) {
  fbrl::ReplayBuffer buffer(10000);
  fbrl::Rng rng(3);
  fbrl::Transition t;
  t.state = {1.0, 2.0};
  t.next_state = {2.0, 2.0};
  for (int i = 0; i < 10000; ++i) buffer.append(t);
  std::vector<fbrl::Transition> batch;
  for (auto _ : state) {
    buffer.append(t);
    buffer.sample(100, rng, batch);
    benchmark::DoNotOptimize(batch.data());
  }
}
BENCHMARK(bm_replay_append_sample);

void bm_agent_learn_step(benchmark::State& state) {
  fbrl::AgentConfig config;
  config.warmup_samples = 200;
  fbrl::Rng init_rng(4);
  fbrl::DdqnAgent agent(2, 4, config, init_rng);
  fbrl::ReplayBuffer buffer(10000);
  fbrl::EnvironmentSpec spec = fbrl::make_gridworld(5);
  fbrl::Rng walk_rng(5);
  fbrl::StateVector s = fbrl::reset(spec);
  for (int i = 0; i < 1000; ++i) {
    int a = walk_rng.uniform_int(4);
    fbrl::StepResult res = fbrl::step(spec, s, a);
    buffer.append(fbrl::Transition{s, a, res.reward, res.next_state, res.terminal, false});
    s = res.terminal ? fbrl::reset(spec) : res.next_state;
  }
  fbrl::Rng learn_rng(6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(agent.learn_step(buffer, learn_rng));
  }
}
BENCHMARK(bm_agent_learn_step);

void bm_backward_rollout(benchmark::State& state) {
  fbrl::EnvironmentSpec spec = fbrl::make_gridworld(15);
  fbrl::Rng rng(7);
  fbrl::MlpNetwork q = fbrl::MlpNetwork::seeded(2, 32, 4, rng);
  fbrl::BackwardModelConfig mc;
  fbrl::BackwardModel model(2, 4, spec.value_range(), mc, rng);
  fbrl::ImaginationConfig config;
  config.steps_per_rollout = 10;
  fbrl::Rng roll_rng(8);
  for (auto _ : state) {
    auto rollout = fbrl::backward_rollout(spec, config, q, model, roll_rng);
    benchmark::DoNotOptimize(rollout.data());
  }
}
BENCHMARK(bm_backward_rollout);

void bm_model_train(benchmark::State& state) {
  fbrl::EnvironmentSpec spec = fbrl::make_gridworld(5);
  fbrl::Rng rng(9);
  fbrl::BackwardModelConfig mc;
  fbrl::BackwardModel model(2, 4, spec.value_range(), mc, rng);
  std::vector<fbrl::Transition> batch;
  fbrl::Rng walk_rng(10);
  fbrl::StateVector s = fbrl::reset(spec);
  for (int i = 0; i < 100; ++i) {
    int a = walk_rng.uniform_int(4);
    fbrl::StepResult res = fbrl::step(spec, s, a);
    batch.push_back(fbrl::Transition{s, a, res.reward, res.next_state, res.terminal, false});
    s = res.terminal ? fbrl::reset(spec) : res.next_state;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.train(batch));
  }
}
BENCHMARK(bm_model_train);

}  // namespace

BENCHMARK_MAIN();
