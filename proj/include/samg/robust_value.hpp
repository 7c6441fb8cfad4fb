#pragma once

#include <vector>

#include "samg/model.hpp"

namespace samg {

// Payoff table for one agent's stage problem at one state: g[k][a] is the
// continuation value of playing action a after being shown the k-th
// admissible perceived state, with every other agent and adversary already
// marginalized out.
struct StagePayoff {
  int agent = 0;
  int state = 0;
  std::vector<int> rho_set;            // admissible perceived states, in order
  std::vector<std::vector<double>> g;  // [rho][action]
};

// pi and chi carry the full profile; the rows belonging to `agent` and its
// adversary are ignored here.
StagePayoff stage_payoff(const SamgModel& m, int agent, int s, const ValueTable& v,
                         const AgentPolicy& pi, const AdversaryPolicy& chi);

// Same, reusing a precomputed q row (q[ja] = r(s,ja) + gamma sum p v).
StagePayoff stage_payoff_from_q(const SamgModel& m, int agent, int s,
                                const std::vector<double>& q_row, const AgentPolicy& pi,
                                const AdversaryPolicy& chi);

struct StageDecision {
  double value = 0.0;
  std::vector<int> action_per_rho;  // greedy action per perceived state
  int worst_rho = 0;                // index into rho_set minimizing the row max
};

// The stage maximin reduces to min over perceived states of the best action
// payoff: the agent picks rows independently, the adversary then picks the
// row. Ties go to the lowest enumerated index on both sides.
StageDecision stage_maximin(const StagePayoff& payoff);

// One sweep of the per-agent robust Bellman operator over every state.
ValueTable robust_operator(const SamgModel& m, int agent, const AgentPolicy& pi,
                           const AdversaryPolicy& chi, const ValueTable& v);

struct RobustFixedPoint {
  ValueTable v;
  std::vector<StageDecision> greedy;  // stage strategies at convergence, per state
  long iterations = 0;
  double residual = 0.0;
};

// Iterates the robust operator from zero until the max-norm step drops to
// tol * (1 - gamma) / (2 gamma). The operator is a gamma-contraction, so the
// fixed point is unique regardless of the start table.
RobustFixedPoint robust_fixed_point(const SamgModel& m, int agent, const AgentPolicy& pi,
                                    const AdversaryPolicy& chi, double tol);

}  // namespace samg
