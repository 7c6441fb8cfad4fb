#pragma once

#include <vector>

#include "samg/model.hpp"

namespace samg {

// MDP the joint adversary faces once the agent policy is frozen: an action
// at state s is a joint perception assignment, rewards are the negated agent
// reward under the induced action lottery.
struct AdversaryMdp {
  double gamma = 0.0;
  // actions[s][k] lists the k-th joint perception (one perceived state per
  // agent), enumerated lexicographically in per-agent admissible-set order.
  std::vector<std::vector<std::vector<int>>> actions;
  std::vector<std::vector<double>> reward;                   // [s][k]
  std::vector<std::vector<std::vector<double>>> transition;  // [s][k][s']
  int num_states() const { return static_cast<int>(actions.size()); }
};

AdversaryMdp build_adversary_mdp(const SamgModel& m, const AgentPolicy& pi);

struct MdpSolution {
  ValueTable v;             // value-iteration estimate of the optimum
  std::vector<int> greedy;  // per-state greedy action, ties to the lowest index
  long iterations = 0;
  double residual = 0.0;
};

// Value iteration until the max-norm step drops to tol * (1 - gamma) /
// (2 gamma), which certifies the greedy policy to within tol.
MdpSolution solve_mdp(const AdversaryMdp& mdp, double tol);

struct WorstCase {
  ValueTable v_bar;     // agent-side worst-case values (sign restored)
  AdversaryPolicy chi;  // deterministic minimizing adversary
  long iterations = 0;
  double residual = 0.0;
};

WorstCase optimal_adversary(const SamgModel& m, const AgentPolicy& pi, double tol);

struct AdversaryEnumeration {
  ValueTable pointwise_min;  // per-state minimum over all deterministic adversaries
  AdversaryPolicy minimizer;
  // True when a single adversary attains the minimum at every state at once;
  // otherwise minimizer is the enumeration-first adversary with the lowest
  // expected value under the start distribution.
  bool simultaneous = false;
  long count = 0;
};

// Exhaustive sweep over all deterministic adversaries (capped at 1e6).
AdversaryEnumeration enumerate_deterministic_adversaries(const SamgModel& m, const AgentPolicy& pi);

}  // namespace samg
