#pragma once

#include <cstdint>
#include <vector>

#include "samg/model.hpp"

namespace samg {

// Markov chain over true states induced by freezing one (policy, adversary)
// pair: P[s][s'] and r[s] fold the perception and action lotteries away.
struct InducedChain {
  std::vector<std::vector<double>> P;
  std::vector<double> r;
};

InducedChain induced_chain(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi);

// Fixed-pair state values: V = r + gamma P V, solved directly for small
// state sets and by fixed-point iteration beyond that, to a max-norm Bellman
// residual of 1e-10. Validates both policies first.
ValueTable evaluate(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi);

// Same computation without the simplex checks. Gradient probes evaluate at
// deliberately off-simplex tables, so they need this entry point.
ValueTable evaluate_raw(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi);

// One application of the fixed-pair Bellman operator to an arbitrary table.
ValueTable bellman_backup(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi,
                          const ValueTable& v);

// Start-state aggregation sum_s Pr(s0 = s) v(s).
double expected_value(const SamgModel& m, const ValueTable& v);

// Discounted state occupancy d = init + gamma P^T d; total mass 1/(1-gamma).
ValueTable occupancy(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi);

// Q[s][joint_a] = r(s,a) + gamma sum_s' p(s'|s,a) v(s').
std::vector<std::vector<double>> q_from_v(const SamgModel& m, const ValueTable& v);

struct SimulationResult {
  double mean = 0.0;
  double standard_error = 0.0;
  long episodes = 0;
  long horizon = 0;
};

// Monte-Carlo estimate of the discounted return. Episode k draws from a
// stream derived from (seed, k), so results do not depend on scheduling.
SimulationResult simulate(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi,
                          long episodes, long horizon, std::uint64_t seed);

}  // namespace samg
