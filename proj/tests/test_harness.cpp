#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fbrl/config_file.hpp"
#include "fbrl/experiment.hpp"

namespace {

namespace fs = std::filesystem;
using fbrl::EpisodeRecord;
using fbrl::ExperimentConfig;
using fbrl::ExperimentResult;
using fbrl::LearningCurve;
using fbrl::MeanPoint;

fs::path fresh_dir(const std::string& tag) {
  fs::path dir = fs::temp_directory_path() / ("fbrl_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  EXPECT_TRUE(in.is_open()) << path;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Small fast overrides shared by the end-to-end harness tests.
std::string tiny_suffix() {
  return "trials = 2\n"
         "total_episodes = 6\n"
         "warmup_samples = 40\n"
         "batch_size = 16\n"
         "buffer_capacity = 500\n"
         "seed = 3\n";
}

TEST(ConfigParse, GridworldDdqnPreset) {
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\nsize = 5\nmethod = ddqn\n");
  EXPECT_EQ(c.env.kind, fbrl::EnvKind::gridworld);
  EXPECT_EQ(c.env.size, 5);
  EXPECT_EQ(c.env.horizon, 50);
  EXPECT_DOUBLE_EQ(c.env.step_cost, -0.01);
  EXPECT_DOUBLE_EQ(c.env.goal_reward, 1.0);
  EXPECT_DOUBLE_EQ(c.agent.gamma, 0.99);
  EXPECT_DOUBLE_EQ(c.agent.learning_rate, 1e-3);
  EXPECT_EQ(c.agent.target_sync_period, 100);
  EXPECT_EQ(c.agent.hidden_dim, 32);
  EXPECT_EQ(c.agent.batch_size, 100);
  EXPECT_EQ(c.agent.warmup_samples, 10000);
  EXPECT_DOUBLE_EQ(c.agent.epsilon_start, 1.0);
  EXPECT_DOUBLE_EQ(c.agent.epsilon_end, 0.1);
  EXPECT_EQ(c.buffer_capacity, 10000u);
  EXPECT_EQ(c.trials, 10);
  EXPECT_EQ(c.total_episodes, 500);
  EXPECT_FALSE(c.is_fbrl());
  EXPECT_EQ(c.model.hidden_dim, 100);
  // epsilon decays over the first 20% of the step budget: 500 * 50 / 5
  EXPECT_EQ(c.agent.epsilon_decay_steps, 5000);
  EXPECT_EQ(fbrl::derived_epsilon_decay_steps(c), 5000);
}

TEST(ConfigParse, GridworldFbrlPreset) {
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\nsize = 15\nmethod = fbrl\n");
  EXPECT_TRUE(c.is_fbrl());
  EXPECT_EQ(c.env.horizon, 150);
  EXPECT_DOUBLE_EQ(c.agent.learning_rate, 5e-3);
  EXPECT_EQ(c.imagination->steps_per_rollout, 10);
  EXPECT_EQ(c.imagination->stream_count, 1);
  EXPECT_EQ(c.model.variant, fbrl::DeltaVariant::continuous);
}

TEST(ConfigParse, HanoiPresets) {
  ExperimentConfig ddqn = fbrl::parse_config_text(
      "environment = hanoi\nsize = 3\nmethod = ddqn\n");
  EXPECT_EQ(ddqn.env.kind, fbrl::EnvKind::hanoi);
  EXPECT_EQ(ddqn.env.horizon, 100);  // 50 * (discs - 1)
  EXPECT_DOUBLE_EQ(ddqn.agent.learning_rate, 5e-4);
  EXPECT_EQ(ddqn.agent.target_sync_period, 500);
  EXPECT_EQ(ddqn.total_episodes, 1000);

  ExperimentConfig fbrl_c = fbrl::parse_config_text(
      "environment = hanoi\nsize = 3\nmethod = fbrl\n");
  EXPECT_DOUBLE_EQ(fbrl_c.agent.learning_rate, 1e-4);
  EXPECT_EQ(fbrl_c.imagination->steps_per_rollout, 5);
  EXPECT_EQ(fbrl_c.imagination->stream_count, 3);
  EXPECT_EQ(fbrl_c.model.variant, fbrl::DeltaVariant::categorical);
}

TEST(ConfigParse, CommentsBlankLinesAndSpacingAreTolerated) {
  ExperimentConfig c = fbrl::parse_config_text(
      "# experiment description\n"
      "\n"
      "environment = gridworld   # trailing comment\n"
      "   size=7\n"
      "method =    ddqn\n"
      "\n");
  EXPECT_EQ(c.env.size, 7);
}

TEST(ConfigParse, OverridesApply) {
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\n"
      "size = 5\n"
      "method = fbrl\n"
      "trials = 3\n"
      "total_episodes = 20\n"
      "seed = 99\n"
      "deterministic = false\n"
      "learning_rate = 0.002\n"
      "model_learning_rate = 0.004\n"
      "optimizer = sgd\n"
      "hidden_dim = 16\n"
      "model_hidden_dim = 24\n"
      "imagination_steps = 4\n"
      "imagination_streams = 2\n"
      "imagination_strategy = greedy\n"
      "buffer_capacity = 2000\n"
      "warmup_samples = 1500\n"
      "output_path = /tmp/somewhere\n");
  EXPECT_EQ(c.trials, 3);
  EXPECT_EQ(c.total_episodes, 20);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_FALSE(c.deterministic_mode);
  EXPECT_DOUBLE_EQ(c.agent.learning_rate, 0.002);
  EXPECT_DOUBLE_EQ(c.model.learning_rate, 0.004);
  EXPECT_EQ(c.agent.optimizer, fbrl::Optimizer::sgd);
  EXPECT_EQ(c.model.optimizer, fbrl::Optimizer::sgd);
  EXPECT_EQ(c.agent.hidden_dim, 16);
  EXPECT_EQ(c.model.hidden_dim, 24);
  EXPECT_EQ(c.imagination->steps_per_rollout, 4);
  EXPECT_EQ(c.imagination->stream_count, 2);
  EXPECT_EQ(c.imagination->strategy, fbrl::ImaginationStrategy::greedy);
  EXPECT_EQ(c.buffer_capacity, 2000u);
  EXPECT_EQ(c.agent.warmup_samples, 1500);
  EXPECT_EQ(c.output_path, "/tmp/somewhere");
  // shrinking the episode budget shrinks the derived epsilon schedule
  EXPECT_EQ(c.agent.epsilon_decay_steps, 20 * 50 / 5);
}

TEST(ConfigParse, ExplicitEpsilonDecayIsNotRederived) {
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\nsize = 5\nmethod = ddqn\n"
      "epsilon_decay_steps = 777\ntotal_episodes = 20\n");
  EXPECT_EQ(c.agent.epsilon_decay_steps, 777);
}

TEST(ConfigParse, RejectsUnknownDuplicateAndMalformedInput) {
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 5\nmethod = ddqn\nfrobnicate = 1\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 5\nsize = 6\nmethod = ddqn\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text("size = 5\nmethod = ddqn\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text("environment = gridworld\nmethod = ddqn\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text("environment = gridworld\nsize = 5\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = mars\nsize = 5\nmethod = ddqn\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 5\nmethod = sarsa\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = one\nmethod = ddqn\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 1\nmethod = ddqn\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 5\nmethod = ddqn\ngamma = 1.5\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 5\nmethod = ddqn\ntrials = 0\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 5\nmethod = ddqn\ndeterministic = maybe\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 5\nmethod = ddqn\nno_equals_sign\n"),
               std::invalid_argument);
}

TEST(ConfigParse, ImaginationKeysRequireFbrlMethod) {
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 5\nmethod = ddqn\nimagination_steps = 5\n"),
               std::invalid_argument);
  EXPECT_THROW(fbrl::parse_config_text(
                   "environment = gridworld\nsize = 5\nmethod = ddqn\nimagination_strategy = random\n"),
               std::invalid_argument);
}

TEST(ConfigParse, FileAndTextAgree) {
  fs::path dir = fresh_dir("config_file");
  fs::path path = dir / "exp.cfg";
  std::string text = "environment = hanoi\nsize = 2\nmethod = fbrl\nseed = 8\n";
  std::ofstream(path) << text;
  ExperimentConfig from_file = fbrl::parse_config_file(path.string());
  ExperimentConfig from_text = fbrl::parse_config_text(text);
  EXPECT_EQ(from_file.env.kind, from_text.env.kind);
  EXPECT_EQ(from_file.env.size, from_text.env.size);
  EXPECT_EQ(from_file.seed, from_text.seed);
  EXPECT_THROW(fbrl::parse_config_file((dir / "missing.cfg").string()),
               std::invalid_argument);
}

TEST(Harness, CsvSchemaRowCountsAndRoundtrip) {
  fs::path dir = fresh_dir("csv_schema");
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\nsize = 3\nmethod = ddqn\n" + tiny_suffix() +
      "output_path = " + dir.string() + "\n");
  ExperimentResult result = fbrl::run_experiment(c);

  std::string raw = slurp(dir / "trials.csv");
  std::istringstream lines(raw);
  std::string line;
  ASSERT_TRUE(std::getline(lines, line));
  EXPECT_EQ(line, "trial,episode,return,env_steps,epsilon,td_loss,backward_loss");
  int rows = 0;
  long long prev_steps = -1;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    ++rows;
    // baseline rows end with an empty backward_loss field
    EXPECT_EQ(line.back(), ',') << line;
    std::istringstream fields(line);
    std::string f;
    int count = 0;
    while (std::getline(fields, f, ',')) ++count;
    EXPECT_EQ(count, 6) << line;  // 7 columns, last empty
    long long trial, episode;
    char comma;
    std::istringstream head(line);
    head >> trial >> comma >> episode;
    if (episode == 0) prev_steps = -1;
    std::string rest;
    std::getline(head, rest);
    (void)rest;
  }
  EXPECT_EQ(rows, 2 * 6);

  std::string mean = slurp(dir / "mean.csv");
  std::istringstream mean_lines(mean);
  ASSERT_TRUE(std::getline(mean_lines, line));
  EXPECT_EQ(line, "episode,mean_return,stderr_return");
  int mean_rows = 0;
  while (std::getline(mean_lines, line))
    if (!line.empty()) ++mean_rows;
  EXPECT_EQ(mean_rows, 6);

  std::vector<MeanPoint> reread = fbrl::read_mean_csv((dir / "mean.csv").string());
  std::vector<MeanPoint> computed = fbrl::mean_curve(result);
  ASSERT_EQ(reread.size(), computed.size());
  for (std::size_t i = 0; i < reread.size(); ++i) {
    EXPECT_EQ(reread[i].episode, computed[i].episode);
    EXPECT_NEAR(reread[i].mean_return, computed[i].mean_return, 1e-12);
    EXPECT_NEAR(reread[i].stderr_return, computed[i].stderr_return, 1e-12);
  }
}

TEST(Harness, FbrlRowsCarryBackwardLoss) {
  fs::path dir = fresh_dir("fbrl_rows");
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\nsize = 3\nmethod = fbrl\n" + tiny_suffix() +
      "imagination_steps = 3\n"
      "output_path = " + dir.string() + "\n");
  fbrl::run_experiment(c);
  std::istringstream lines(slurp(dir / "trials.csv"));
  std::string line;
  std::getline(lines, line);  // header
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    EXPECT_NE(line.back(), ',') << "fbrl row missing backward loss: " << line;
  }
}

TEST(Harness, EpisodeRecordsAreWellFormed) {
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\nsize = 3\nmethod = ddqn\n" + tiny_suffix());
  ExperimentResult result = fbrl::run_experiment(c);
  ASSERT_EQ(result.trials.size(), 2u);
  double worst = c.env.horizon * c.env.step_cost;
  for (int t = 0; t < 2; ++t) {
    const LearningCurve& curve = result.trials[t];
    ASSERT_EQ(curve.episodes.size(), 6u);
    EXPECT_EQ(curve.warmup_env_steps, 40);
    EXPECT_EQ(curve.imagined_transitions, 0u);
    long long prev_steps = 0;
    double prev_eps = 1.0;
    for (std::size_t e = 0; e < curve.episodes.size(); ++e) {
      const EpisodeRecord& rec = curve.episodes[e];
      EXPECT_EQ(rec.trial, t);
      EXPECT_EQ(rec.episode, static_cast<long long>(e));
      EXPECT_LE(rec.undiscounted_return, 1.0 + 1e-12);
      EXPECT_GE(rec.undiscounted_return, worst - 1e-12);
      EXPECT_GT(rec.env_steps, prev_steps);
      EXPECT_LE(rec.env_steps, prev_steps + c.env.horizon);
      prev_steps = rec.env_steps;
      EXPECT_LE(rec.epsilon, prev_eps + 1e-12);
      EXPECT_GE(rec.epsilon, c.agent.epsilon_end - 1e-12);
      prev_eps = rec.epsilon;
      EXPECT_FALSE(rec.has_backward_loss);
    }
    EXPECT_EQ(curve.training_env_steps, curve.episodes.back().env_steps);
    EXPECT_GE(curve.first_goal_episode, -1);
    EXPECT_LT(curve.first_goal_episode, 6);
  }
}

TEST(Harness, DeterministicRunsAreByteIdentical) {
  auto run_to = [](const std::string& tag) {
    fs::path dir = fresh_dir(tag);
    ExperimentConfig c = fbrl::parse_config_text(
        "environment = gridworld\nsize = 3\nmethod = fbrl\n" + tiny_suffix() +
        "imagination_steps = 3\nimagination_streams = 2\n"
        "output_path = " + dir.string() + "\n");
    fbrl::run_experiment(c);
    return slurp(dir / "trials.csv") + slurp(dir / "mean.csv");
  };
  EXPECT_EQ(run_to("det_a"), run_to("det_b"));
}

TEST(Harness, ParallelTrialsMatchSequentialByteForByte) {
  auto run_to = [](const std::string& tag, int workers) {
    fs::path dir = fresh_dir(tag);
    ExperimentConfig c = fbrl::parse_config_text(
        "environment = gridworld\nsize = 3\nmethod = ddqn\n" + tiny_suffix() +
        "parallel_trials = " + std::to_string(workers) + "\n"
        "output_path = " + dir.string() + "\n");
    fbrl::run_experiment(c);
    return slurp(dir / "trials.csv");
  };
  EXPECT_EQ(run_to("seq", 1), run_to("par", 2));
}

TEST(Harness, ImaginedTransitionCountIsExactInDeterministicMode) {
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\nsize = 3\nmethod = fbrl\n" + tiny_suffix() +
      "imagination_steps = 4\nimagination_streams = 2\n");
  ExperimentResult result = fbrl::run_experiment(c);
  for (const LearningCurve& curve : result.trials) {
    EXPECT_EQ(curve.imagined_transitions,
              static_cast<std::uint64_t>(curve.training_env_steps) * 4u * 2u);
    EXPECT_GT(curve.imagined_transitions, 0u);
  }
}

TEST(Harness, TrialsDifferFromEachOther) {
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\nsize = 3\nmethod = ddqn\n" + tiny_suffix());
  ExperimentResult result = fbrl::run_experiment(c);
  bool any_diff = false;
  for (std::size_t e = 0; e < result.trials[0].episodes.size() && !any_diff; ++e)
    any_diff = result.trials[0].episodes[e].undiscounted_return !=
               result.trials[1].episodes[e].undiscounted_return;
  EXPECT_TRUE(any_diff);
}

TEST(Harness, ShortBaselineRunLearnsTinyGrid) {
  ExperimentConfig c = fbrl::parse_config_text(
      "environment = gridworld\nsize = 3\nmethod = ddqn\n"
      "trials = 1\n"
      "total_episodes = 200\n"
      "warmup_samples = 400\n"
      "batch_size = 32\n"
      "seed = 5\n");
  ExperimentResult result = fbrl::run_experiment(c);
  EXPECT_GT(fbrl::final_window_mean(result, 40), 0.5);
  EXPECT_GE(result.trials[0].first_goal_episode, 0);
}

TEST(Analysis, MeanCurveAndAucOnSyntheticData) {
  ExperimentResult result;
  result.config.total_episodes = 3;
  LearningCurve a, b;
  auto rec = [](int trial, long long ep, double ret) {
    EpisodeRecord r;
    r.trial = trial;
    r.episode = ep;
    r.undiscounted_return = ret;
    return r;
  };
  a.episodes = {rec(0, 0, 1.0), rec(0, 1, 0.0), rec(0, 2, 0.5)};
  b.episodes = {rec(1, 0, 0.0), rec(1, 1, 1.0), rec(1, 2, 0.5)};
  a.first_goal_episode = 2;
  b.first_goal_episode = -1;
  result.trials = {a, b};

  std::vector<MeanPoint> curve = fbrl::mean_curve(result);
  ASSERT_EQ(curve.size(), 3u);
  EXPECT_DOUBLE_EQ(curve[0].mean_return, 0.5);
  EXPECT_DOUBLE_EQ(curve[1].mean_return, 0.5);
  EXPECT_DOUBLE_EQ(curve[2].mean_return, 0.5);
  // two samples: stderr = stddev/sqrt(2) with the n-1 divisor
  EXPECT_NEAR(curve[0].stderr_return, 0.5, 1e-12);
  EXPECT_NEAR(curve[2].stderr_return, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(fbrl::area_under_curve(curve), 1.5);

  EXPECT_DOUBLE_EQ(fbrl::final_window_mean(a, 2), 0.25);
  EXPECT_DOUBLE_EQ(fbrl::final_window_mean(result, 2), 0.5);
  EXPECT_DOUBLE_EQ(fbrl::final_window_mean(a, 50), 0.5);  // window caps at size

  // never-reached counts as the full budget; upper median of {2, 3} is 3
  EXPECT_EQ(fbrl::median_first_goal_episode(result), 3);
}

TEST(Analysis, SingleTrialHasZeroStderr) {
  ExperimentResult result;
  LearningCurve a;
  EpisodeRecord r;
  r.undiscounted_return = 0.7;
  a.episodes = {r};
  result.trials = {a};
  std::vector<MeanPoint> curve = fbrl::mean_curve(result);
  ASSERT_EQ(curve.size(), 1u);
  EXPECT_DOUBLE_EQ(curve[0].mean_return, 0.7);
  EXPECT_DOUBLE_EQ(curve[0].stderr_return, 0.0);
}

TEST(ExperimentConfigStruct, ValidateCatchesInconsistencies) {
  ExperimentConfig c = fbrl::make_default_config(fbrl::EnvKind::gridworld, 5, true);
  EXPECT_NO_THROW(c.validate());
  c.trials = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = fbrl::make_default_config(fbrl::EnvKind::gridworld, 5, false);
  c.total_episodes = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = fbrl::make_default_config(fbrl::EnvKind::gridworld, 5, false);
  c.buffer_capacity = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = fbrl::make_default_config(fbrl::EnvKind::hanoi, 3, true);
  c.model.variant = fbrl::DeltaVariant::continuous;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

}  // namespace
