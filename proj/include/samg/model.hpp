#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "samg/errors.hpp"

namespace samg {

using ValueTable = std::vector<double>;  // one value per true state

// A finite state-adversarial Markov game. States and actions live as dense
// 0-based indices everywhere; the declared names are kept for i/o only.
// Canonical ordering is declaration order.
struct SamgModel {
  int agents = 0;
  std::vector<std::string> states;
  std::vector<std::vector<std::string>> actions;  // [agent][action]
  double gamma = 0.0;

  // Joint actions are mixed-radix encoded, agent 0 most significant.
  std::vector<std::vector<std::vector<double>>> transition;  // [s][joint_a][s']
  std::vector<std::vector<double>> reward;                   // [s][joint_a]

  // Admissible perceived states per (agent, true state), in enumeration
  // order; always contains the true state itself.
  std::vector<std::vector<std::vector<int>>> perturb;  // [agent][s] -> states

  std::vector<double> init;  // start-state distribution

  int num_states() const { return static_cast<int>(states.size()); }
  int num_actions(int agent) const { return static_cast<int>(actions[agent].size()); }
  long num_joint_actions() const;

  long joint_action_index(const std::vector<int>& a) const;
  void decode_joint_action(long index, std::vector<int>& a) const;

  // -1 when the name is unknown
  int state_index(const std::string& name) const;
  int action_index(int agent, const std::string& name) const;

  double max_abs_reward() const;
};

// Per-agent behavioral policy: pi[agent][perceived_state][action].
struct AgentPolicy {
  std::vector<std::vector<std::vector<double>>> pi;
};

// Per-agent state perturbation: chi[agent][true_state][shown_state], stored
// over the full state set with zeros outside the admissible set.
struct AdversaryPolicy {
  std::vector<std::vector<std::vector<double>>> chi;
};

// --- model text format ------------------------------------------------------
//
// Line-oriented, whitespace tokens, '#' starts a comment. Directives:
//   samg 1
//   agents <n>
//   states <id...>
//   actions <agent> <id...>          (agent indices are 1-based in files)
//   gamma <g>
//   transition <s> <a1..an> <s'> <p> (omitted entries are 0)
//   reward <s> <a1..an> <r>          (omitted entries are 0)
//   perturb <agent> <s> <member...>  (omitted pairs default to {s})
//   init <s> <p>                     (omitted section = uniform)
// Unknown directives are errors. Probability rows must sum to 1 within 1e-12
// and are then renormalized exactly.

SamgModel parse_model(const std::string& text);
std::string serialize_model(const SamgModel& m);

// Structural checks; empty result means the model is valid. parse_model,
// builtin_game and random_game only ever hand out models that pass.
std::vector<std::string> validate_model(const SamgModel& m);

// "fig4": two-agent coordination game where adversaries can trap the agents;
// "fig5": same game with the s1 transitions swapped, which makes the two
// states want contradictory behavior.
SamgModel builtin_game(const std::string& name);

// Deterministic in seed: transition rows are normalized uniform draws,
// rewards uniform in [-1, 1], each admissible set holds the true state plus
// perturb_size - 1 distinct others, gamma fixed at 0.9, uniform init.
SamgModel random_game(std::uint64_t seed, int agents, int states, int actions_per_agent,
                      int perturb_size);

// --- policy construction ----------------------------------------------------

AgentPolicy uniform_policy(const SamgModel& m);
// choice[agent][perceived_state] -> action index
AgentPolicy deterministic_policy(const SamgModel& m, const std::vector<std::vector<int>>& choice);

AdversaryPolicy identity_adversary(const SamgModel& m);
AdversaryPolicy uniform_adversary(const SamgModel& m);  // uniform over each admissible set
// shown[agent][true_state] -> perceived state index (must be admissible)
AdversaryPolicy deterministic_adversary(const SamgModel& m, const std::vector<std::vector<int>>& shown);

std::vector<std::string> validate_agent_policy(const SamgModel& m, const AgentPolicy& pi);
std::vector<std::string> validate_adversary_policy(const SamgModel& m, const AdversaryPolicy& chi);

// --- policy text format -----------------------------------------------------
//
// Same lexical rules as the model format. Rows:
//   policy agent <i> <rho> <action> <p>
//   adversary <i> <s> <rho> <p>
// A file may carry agent rows, adversary rows, or both; whichever kind is
// present must cover every row of its table.

struct PolicyFile {
  std::optional<AgentPolicy> pi;
  std::optional<AdversaryPolicy> chi;
};

PolicyFile parse_policies(const SamgModel& m, const std::string& text);
std::string serialize_policies(const SamgModel& m, const AgentPolicy* pi, const AdversaryPolicy* chi);

}  // namespace samg
