#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "lsfsac/autodiff.hpp"
#include "lsfsac/rng.hpp"

namespace lsfsac::nets {

using ad::Graph;
using ad::Mat;
using ad::Var;

// ---- parameter containers ----

struct Linear {
  Mat W;  // in x out
  Mat b;  // 1 x out
};

struct GruCell {
  Mat Wxr, Whr, br;
  Mat Wxz, Whz, bz;
  Mat Wxn, Whn, bxn, bhn;
  int input_dim() const { return static_cast<int>(Wxr.rows()); }
  int hidden_dim() const { return static_cast<int>(Wxr.cols()); }
};

struct ActorNet {
  GruCell gru;
  Linear head;  // hidden -> n_actions, zero-initialized
};

struct CriticNet {
  GruCell gru;
  Linear fuse;  // [hidden, inbound] -> hidden
  Linear head;  // hidden -> n_actions
};

struct EncoderNet {
  GruCell gru;
  Linear head;  // hidden -> msg_dim
};

struct DecoderNet {
  GruCell gru;
  Linear fuse;  // [hidden, inbound] -> hidden
  Linear head;  // hidden -> n_actions
};

struct PriorParams {
  bool learned = false;
  Mat mu;       // 1 x msg_dim
  Mat log_var;  // 1 x msg_dim
};

// Hypernetwork-generated monotonic mixer. Weights produced from the global
// state pass through |.| so Q_tot is non-decreasing in every q_i.
struct MixerNet {
  Linear hyper_w1;   // state -> n_agents*h_mix
  Linear hyper_b1;   // state -> h_mix
  Linear hyper_w2;   // state -> h_mix
  Linear hyper_b2a;  // state -> h_mix
  Linear hyper_b2b;  // h_mix -> 1
  int n_agents = 0;
  int h_mix = 0;
};

struct CriticBundle {
  CriticNet critic;
  MixerNet mixer;
};

struct NetConfig {
  int n_agents = 2;
  int n_actions = 3;
  int obs_dim = 1;
  int state_dim = 1;
  int hidden_dim = 64;
  int msg_dim = 4;
  int mix_hidden = 32;
  bool messages_on = true;
  bool learned_prior = false;
  bool double_q = false;
  double alpha_init = 1.0;
  int input_dim() const { return obs_dim + n_actions; }
  int inbound_dim() const { return n_agents * msg_dim; }
};

struct ParameterSet {
  NetConfig cfg;
  ActorNet actor;
  std::vector<CriticBundle> critics;  // size 1, or 2 when double_q
  EncoderNet encoder;
  DecoderNet decoder;
  PriorParams prior;
  Mat log_alpha;  // 1x1
  std::vector<CriticBundle> target_critics;
  EncoderNet target_encoder;
};

ParameterSet init_params(const NetConfig& cfg, Rng rng);

// Hard copy of critic bundles and encoder into the target slots.
void sync_target(ParameterSet& ps);

enum class Group { Actor, Critic, Encoder, Decoder, Prior, LogAlpha, TargetCritic, TargetEncoder };

using ParamRefs = std::vector<std::pair<std::string, Mat*>>;

ParamRefs group_params(ParameterSet& ps, Group g);
ParamRefs all_params(ParameterSet& ps);  // online + targets, stable names

// ---- graph-level forward builders ----

// Binds parameter matrices into a graph exactly once each.
class Binder {
public:
  explicit Binder(Graph& g) : g_(&g) {}
  Var bind(const Mat& m, bool requires_grad);
  // Zero matrix when the param never entered the graph or got no gradient.
  Mat grad_for(const Mat& m) const;
  Graph& graph() { return *g_; }

private:
  Graph* g_;
  std::unordered_map<const Mat*, Var> cache_;
};

Var linear_fw(Binder& b, const Linear& lin, Var x, bool rg);
Var gru_fw(Binder& b, const GruCell& cell, Var x, Var h, bool rg);
// Trunk over a padded sequence; xs[t] is ((B*n) x input_dim). Returns hidden
// state after consuming xs[t], for every t.
std::vector<Var> gru_unroll(Binder& b, const GruCell& cell, const std::vector<Mat>& xs, bool rg);

// m_out rows are ordered r = b*n_agents + i. Produces ((B*n) x n*d_m) rows of
// the full message concatenation <m_1 ... m_n>, identical for every agent of a
// batch entry.
Var build_inbound(Var m_out, int n_agents);

Var actor_logits_fw(Binder& b, const ActorNet& net, Var hidden, bool rg);
Var critic_q_fw(Binder& b, const CriticNet& net, Var hidden, Var inbound, bool rg);
Var decoder_logits_fw(Binder& b, const DecoderNet& net, Var hidden, Var inbound, bool rg);
Var encoder_mu_fw(Binder& b, const EncoderNet& net, Var hidden, bool rg);

struct MixVars {
  Var w1;  // B x (n*h_mix), non-negative
  Var b1;  // B x h_mix
  Var w2;  // B x h_mix, non-negative
  Var b2;  // B x 1
};
MixVars mixer_weights_fw(Binder& b, const MixerNet& net, const Mat& state, bool rg);
// q: B x n_agents -> Q_tot: B x 1
Var mix_fw(const MixVars& w, Var q, int n_agents, int h_mix, bool identity_activation = false);

// ---- value-level operations ----

struct ActorOutput {
  Eigen::VectorXd logits;
  Eigen::VectorXd probs;      // masked, normalized; exactly 0 where unavailable
  Eigen::VectorXd log_probs;  // finite only where available
};

struct RecurrentState {
  Mat h;  // 1 x hidden
};
RecurrentState initial_state(int hidden_dim);

// One recurrent step of the actor for a single agent.
ActorOutput actor_step(const ActorNet& net, const Eigen::VectorXd& obs,
                       const Eigen::VectorXd& prev_action_onehot, RecurrentState& state,
                       const std::vector<bool>& avail);

// Full-history forward (used where the history is materialized up front).
ActorOutput actor_forward(const ActorNet& net, const Mat& obs_seq, const Mat& prev_act_seq,
                          const std::vector<bool>& avail);

struct MessageBundle {
  Mat mu;       // n x d_m
  Mat noise;    // n x d_m
  Mat m_out;    // mu + noise
  Mat inbound;  // n x (n*d_m); row i is agent i's concatenated view
};
MessageBundle encode_messages(const EncoderNet& net, const std::vector<Mat>& obs_seqs,
                              const std::vector<Mat>& prev_act_seqs, Rng& noise_rng);

Eigen::VectorXd local_q_forward(const CriticNet& net, const Mat& obs_seq, const Mat& prev_act_seq,
                                const Eigen::VectorXd& inbound);

Eigen::VectorXd decoder_forward(const DecoderNet& net, const Mat& obs_seq, const Mat& prev_act_seq,
                                const Eigen::VectorXd& messages, const std::vector<bool>& avail);

double prior_logprob(const PriorParams& prior, const Eigen::VectorXd& m);

// Spec-level mixer weights for a single state (absolute value already applied).
struct MixerWeights {
  Mat w1;  // n_agents x h_mix, non-negative
  Mat b1;  // 1 x h_mix
  Mat w2;  // h_mix x 1, non-negative
  Mat b2;  // 1 x 1
};
MixerWeights mixer_weights(const MixerNet& net, const Eigen::VectorXd& state);
double mix_value(const MixerWeights& w, const Eigen::VectorXd& q_chosen,
                 bool identity_activation = false);
double mix(const MixerNet& net, const Eigen::VectorXd& q_chosen, const Eigen::VectorXd& state);

}  // namespace lsfsac::nets
