// Command line front end: run experiments, query the exact tabular solution,
// compare two result directories, and export plot data.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fbrl/config_file.hpp"
#include "fbrl/experiment.hpp"
#include "fbrl/oracles.hpp"

namespace {

int cmd_run(const std::string& config_path, bool seed_set, std::uint64_t seed,
            bool deterministic, const std::string& out_dir) {
  fbrl::ExperimentConfig config = fbrl::parse_config_file(config_path);
  if (seed_set) config.seed = seed;
  if (deterministic) config.deterministic_mode = true;
  if (!out_dir.empty()) config.output_path = out_dir;
  config.validate();

  std::printf("running %s %dx, method %s, %d trials x %lld episodes, seed %llu\n",
              config.env.kind == fbrl::EnvKind::gridworld ? "gridworld" : "hanoi",
              config.env.size, config.is_fbrl() ? "fbrl" : "ddqn", config.trials,
              static_cast<long long>(config.total_episodes),
              static_cast<unsigned long long>(config.seed));

  fbrl::ExperimentResult result = fbrl::run_experiment(config);
  auto curve = fbrl::mean_curve(result);
  std::size_t window = std::min<std::size_t>(50, curve.size());
  std::printf("final %zu-episode mean return: %.4f\n", window,
              fbrl::final_window_mean(result, window));
  std::printf("area under mean curve: %.4f\n", fbrl::area_under_curve(curve));
  std::printf("median first-goal episode: %lld\n",
              fbrl::median_first_goal_episode(result));
  std::uint64_t imagined = 0;
  for (const auto& trial : result.trials) imagined += trial.imagined_transitions;
  std::printf("imagined transitions (all trials): %llu\n",
              static_cast<unsigned long long>(imagined));
  if (!config.output_path.empty()) {
    std::printf("wrote %s/trials.csv and %s/mean.csv\n", config.output_path.c_str(),
                config.output_path.c_str());
  }
  return 0;
}

int cmd_oracle(const std::string& config_path) {
  fbrl::ExperimentConfig config = fbrl::parse_config_file(config_path);
  const fbrl::EnvironmentSpec& spec = config.env;

  auto shortest = fbrl::bfs_shortest_path(spec);
  if (shortest) {
    std::printf("shortest path (breadth-first search): %d steps\n", *shortest);
  } else {
    std::printf("shortest path: goal unreachable\n");
  }

  auto oracle = fbrl::value_iteration_oracle(spec, config.agent.gamma);
  fbrl::StateVector start = fbrl::reset(spec);
  std::size_t start_index = oracle.index_of(spec, start);
  std::printf("value iteration: %d sweeps over %zu states\n", oracle.sweeps,
              oracle.states.size());
  std::printf("V*(start): %.6f\n", oracle.values[start_index]);

  auto greedy = fbrl::greedy_policy_steps(spec, oracle, spec.horizon);
  if (greedy) {
    std::printf("greedy policy reaches the goal in %d steps\n", *greedy);
  } else {
    std::printf("greedy policy does not reach the goal within the horizon\n");
  }

  if (oracle.states.size() <= 100) {
    std::printf("\nstate  V*  greedy_action\n");
    for (std::size_t i = 0; i < oracle.states.size(); ++i) {
      std::string repr = "[";
      for (std::size_t j = 0; j < oracle.states[i].size(); ++j) {
        if (j) repr += ",";
        repr += std::to_string(static_cast<int>(oracle.states[i][j]));
      }
      repr += "]";
      std::printf("%s  %.6f  %d\n", repr.c_str(), oracle.values[i],
                  oracle.policy[i]);
    }
  }
  return 0;
}

int cmd_compare(const std::string& dir_a, const std::string& dir_b) {
  auto curve_a = fbrl::read_mean_csv(dir_a + "/mean.csv");
  auto curve_b = fbrl::read_mean_csv(dir_b + "/mean.csv");
  if (curve_a.size() != curve_b.size()) {
    std::fprintf(stderr, "episode counts differ: %zu vs %zu\n", curve_a.size(),
                 curve_b.size());
    return 1;
  }
  std::printf("episode,mean_a,mean_b,difference\n");
  for (std::size_t i = 0; i < curve_a.size(); ++i) {
    std::printf("%lld,%.6f,%.6f,%.6f\n", curve_a[i].episode,
                curve_a[i].mean_return, curve_b[i].mean_return,
                curve_a[i].mean_return - curve_b[i].mean_return);
  }
  std::size_t window = std::min<std::size_t>(50, curve_a.size());
  double final_a = 0.0;
  double final_b = 0.0;
  for (std::size_t i = curve_a.size() - window; i < curve_a.size(); ++i) {
    final_a += curve_a[i].mean_return;
    final_b += curve_b[i].mean_return;
  }
  final_a /= static_cast<double>(window);
  final_b /= static_cast<double>(window);
  std::printf("\nfinal %zu episodes: a %.4f, b %.4f, difference %.4f\n", window,
              final_a, final_b, final_a - final_b);
  std::printf("area under curve: a %.4f, b %.4f\n",
              fbrl::area_under_curve(curve_a), fbrl::area_under_curve(curve_b));
  return 0;
}

int cmd_plot(const std::string& in_dir, const std::string& out_file) {
  auto curve = fbrl::read_mean_csv(in_dir + "/mean.csv");
  std::ofstream out(out_file, std::ios::binary);
  if (!out) {
    std::fprintf(stderr, "cannot open %s for writing\n", out_file.c_str());
    return 1;
  }
  out << "# mean learning curve from " << in_dir << "/mean.csv\n";
  out << "# plot with: gnuplot -e \"plot '" << out_file
      << "' using 1:2:3 with yerrorlines title 'mean return'\"\n";
  out << "# episode mean_return stderr_return\n";
  char buffer[128];
  for (const auto& point : curve) {
    std::snprintf(buffer, sizeof(buffer), "%lld %.10g %.10g\n", point.episode,
                  point.mean_return, point.stderr_return);
    out << buffer;
  }
  std::printf("wrote %zu points to %s\n", curve.size(), out_file.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"forward-backward reinforcement learning laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  bool deterministic = false;
  std::string out_dir;
  auto* run = app.add_subcommand("run", "train and record learning curves");
  run->add_option("--config", config_path, "experiment config file")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_flag("--deterministic", deterministic,
                "force bitwise-reproducible mode");
  run->add_option("--out", out_dir, "override the output directory");

  std::string oracle_config;
  auto* oracle = app.add_subcommand("oracle", "exact tabular solution");
  oracle->add_option("--config", oracle_config, "experiment config file")
      ->required();

  std::string dir_a;
  std::string dir_b;
  auto* compare = app.add_subcommand("compare", "compare two result directories");
  compare->add_option("--a", dir_a, "first result directory")->required();
  compare->add_option("--b", dir_b, "second result directory")->required();

  std::string plot_in;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "export gnuplot-compatible plot data");
  plot->add_option("--in", plot_in, "result directory")->required();
  plot->add_option("--out", plot_out, "output data file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, seed_opt->count() > 0, seed, deterministic,
                     out_dir);
    }
    if (oracle->parsed()) return cmd_oracle(oracle_config);
    if (compare->parsed()) return cmd_compare(dir_a, dir_b);
    if (plot->parsed()) return cmd_plot(plot_in, plot_out);
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
  return 0;
}
