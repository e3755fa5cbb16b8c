#pragma once

#include <Eigen/Core>

#include <memory>
#include <string>
#include <vector>

namespace lsfsac::env {

using Vec = Eigen::VectorXd;

struct EnvSpec {
  int n_agents = 0;
  int n_actions = 0;
  int obs_dim = 0;
  int state_dim = 0;
  int episode_limit = 0;
  double gamma = 0.99;

  void validate() const;
};

struct StepResult {
  double reward = 0.0;
  bool terminated = false;
  Vec next_state;
  std::vector<Vec> next_obs;                   // one per agent
  std::vector<std::vector<bool>> avail_actions;  // [agent][action]
};

struct ResetResult {
  Vec state;
  std::vector<Vec> obs;
  std::vector<std::vector<bool>> avail_actions;
};

// Dec-POMDP with a shared reward. Implementations are deterministic given the
// reset seed and the action sequence.
class Env {
public:
  virtual ~Env() = default;
  virtual const EnvSpec& spec() const = 0;
  virtual ResetResult reset(uint64_t seed) = 0;
  virtual StepResult step(const std::vector<int>& joint_action) = 0;
};

// One-step cooperative game with payoff
// [[8,-12,-12],[-12,0,0],[-12,0,0]]; state and observations are the constant
// vector [1].
class MatrixGame : public Env {
public:
  MatrixGame();
  const EnvSpec& spec() const override { return spec_; }
  ResetResult reset(uint64_t seed) override;
  StepResult step(const std::vector<int>& joint_action) override;

  static double payoff(int u1, int u2);

private:
  EnvSpec spec_;
  bool done_ = true;
};

// Two agents on parallel 5-cell corridors. A hidden bit selects which end is
// rewarded; only agent 0 observes it. Agent 1 terminates the episode by
// committing at either end: +10 for the hot end, -10 for the cold one,
// -0.1 per step. Each agent sees both positions, so agent 0 can signal by
// walking; agent 1's optimal values still depend on agent 0's private bit.
class SecretCorridor : public Env {
public:
  static constexpr int kCells = 5;
  static constexpr int kLeft = 0, kRight = 1, kStay = 2, kCommit = 3;

  SecretCorridor();
  const EnvSpec& spec() const override { return spec_; }
  ResetResult reset(uint64_t seed) override;
  StepResult step(const std::vector<int>& joint_action) override;

  int hot_side() const { return hot_side_; }  // 0 = left end, 1 = right end
  int position(int agent) const { return pos_[agent]; }
  int steps_taken() const { return t_; }

private:
  Vec make_state() const;
  Vec make_obs(int agent) const;
  std::vector<std::vector<bool>> make_avail() const;

  EnvSpec spec_;
  int pos_[2] = {2, 2};
  int hot_side_ = 0;
  int t_ = 0;
  bool done_ = true;
};

std::unique_ptr<Env> make_env(const std::string& name);

}  // namespace lsfsac::env
