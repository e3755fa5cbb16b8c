#include "lsfsac/env.hpp"

#include <cmath>
#include <stdexcept>

#include "lsfsac/rng.hpp"

namespace lsfsac::env {

void EnvSpec::validate() const {
  if (n_agents < 2) throw std::invalid_argument("EnvSpec: n_agents >= 2 required");
  if (n_actions < 2) throw std::invalid_argument("EnvSpec: n_actions >= 2 required");
  if (episode_limit < 1) throw std::invalid_argument("EnvSpec: episode_limit >= 1 required");
  if (gamma < 0.0 || gamma >= 1.0) throw std::invalid_argument("EnvSpec: gamma in [0,1) required");
}

namespace {

void check_actions(const EnvSpec& spec, const std::vector<int>& joint,
                   const std::vector<std::vector<bool>>& avail) {
  if (static_cast<int>(joint.size()) != spec.n_agents)
    throw std::invalid_argument("step: joint action size mismatch");
  for (int i = 0; i < spec.n_agents; ++i) {
    if (joint[i] < 0 || joint[i] >= spec.n_actions)
      throw std::invalid_argument("step: action id out of range");
    if (!avail[i][static_cast<size_t>(joint[i])])
      throw std::invalid_argument("step: unavailable action for agent " + std::to_string(i));
  }
}

}  // namespace

// ---- MatrixGame ----

MatrixGame::MatrixGame() {
  spec_.n_agents = 2;
  spec_.n_actions = 3;
  spec_.obs_dim = 1;
  spec_.state_dim = 1;
  spec_.episode_limit = 1;
  spec_.gamma = 0.99;
  spec_.validate();
}

double MatrixGame::payoff(int u1, int u2) {
  static const double kPayoff[3][3] = {
      {8.0, -12.0, -12.0}, {-12.0, 0.0, 0.0}, {-12.0, 0.0, 0.0}};
  if (u1 < 0 || u1 > 2 || u2 < 0 || u2 > 2)
    throw std::invalid_argument("MatrixGame::payoff: action out of range");
  return kPayoff[u1][u2];
}

ResetResult MatrixGame::reset(uint64_t) {
  done_ = false;
  ResetResult r;
  r.state = Vec::Ones(1);
  r.obs = {Vec::Ones(1), Vec::Ones(1)};
  r.avail_actions = {{true, true, true}, {true, true, true}};
  return r;
}

StepResult MatrixGame::step(const std::vector<int>& joint_action) {
  if (done_) throw std::logic_error("MatrixGame::step: episode already terminated");
  std::vector<std::vector<bool>> avail = {{true, true, true}, {true, true, true}};
  check_actions(spec_, joint_action, avail);
  done_ = true;
  StepResult s;
  s.reward = payoff(joint_action[0], joint_action[1]);
  s.terminated = true;
  s.next_state = Vec::Ones(1);
  s.next_obs = {Vec::Ones(1), Vec::Ones(1)};
  s.avail_actions = avail;
  return s;
}

// ---- SecretCorridor ----

SecretCorridor::SecretCorridor() {
  spec_.n_agents = 2;
  spec_.n_actions = 4;
  // own position one-hot, other position one-hot, hot-side one-hot (agent 0
  // only), agent id one-hot
  spec_.obs_dim = kCells + kCells + 2 + 2;
  spec_.state_dim = kCells + kCells + 2 + 1;
  spec_.episode_limit = 10;
  spec_.gamma = 0.99;
  spec_.validate();
}

Vec SecretCorridor::make_state() const {
  Vec s = Vec::Zero(spec_.state_dim);
  s[pos_[0]] = 1.0;
  s[kCells + pos_[1]] = 1.0;
  s[2 * kCells + hot_side_] = 1.0;
  s[2 * kCells + 2] = static_cast<double>(t_) / spec_.episode_limit;
  return s;
}

Vec SecretCorridor::make_obs(int agent) const {
  Vec o = Vec::Zero(spec_.obs_dim);
  o[pos_[agent]] = 1.0;
  o[kCells + pos_[1 - agent]] = 1.0;
  if (agent == 0) o[2 * kCells + hot_side_] = 1.0;
  o[2 * kCells + 2 + agent] = 1.0;
  return o;
}

std::vector<std::vector<bool>> SecretCorridor::make_avail() const {
  std::vector<std::vector<bool>> avail(2, std::vector<bool>(4, true));
  for (int i = 0; i < 2; ++i) {
    if (pos_[i] == 0) avail[i][kLeft] = false;
    if (pos_[i] == kCells - 1) avail[i][kRight] = false;
    // commit claims the end the agent stands on
    avail[i][kCommit] = (pos_[i] == 0 || pos_[i] == kCells - 1);
  }
  return avail;
}

ResetResult SecretCorridor::reset(uint64_t seed) {
  pos_[0] = 2;
  pos_[1] = 2;
  t_ = 0;
  hot_side_ = static_cast<int>(splitmix64(seed) & 1ULL);
  done_ = false;
  ResetResult r;
  r.state = make_state();
  r.obs = {make_obs(0), make_obs(1)};
  r.avail_actions = make_avail();
  return r;
}

StepResult SecretCorridor::step(const std::vector<int>& joint_action) {
  if (done_) throw std::logic_error("SecretCorridor::step: episode already terminated");
  check_actions(spec_, joint_action, make_avail());

  double reward = -0.1;
  bool terminated = false;

  for (int i = 0; i < 2; ++i) {
    int a = joint_action[i];
    if (a == kLeft) pos_[i] -= 1;
    else if (a == kRight) pos_[i] += 1;
  }
  // agent 1's commit ends the episode; agent 0's commit is a no-op signal
  if (joint_action[1] == kCommit) {
    int claimed = (pos_[1] == 0) ? 0 : 1;
    reward += (claimed == hot_side_) ? 10.0 : -10.0;
    terminated = true;
  }
  ++t_;
  if (t_ >= spec_.episode_limit) terminated = true;
  done_ = terminated;

  StepResult s;
  s.reward = reward;
  s.terminated = terminated;
  s.next_state = make_state();
  s.next_obs = {make_obs(0), make_obs(1)};
  s.avail_actions = make_avail();
  return s;
}

std::unique_ptr<Env> make_env(const std::string& name) {
  if (name == "matrix") return std::make_unique<MatrixGame>();
  if (name == "corridor") return std::make_unique<SecretCorridor>();
  throw std::invalid_argument("unknown environment: " + name);
}

}  // namespace lsfsac::env
