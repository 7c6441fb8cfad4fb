#pragma once

#include <cstdint>
#include <vector>

#include "samg/model.hpp"

namespace samg {

// J(pi, chi) under the start distribution.
double objective(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi);

// F(pi) = min over adversaries of J(pi, chi), via the optimal adversary.
double worst_case_objective(const SamgModel& m, const AgentPolicy& pi, double tol);

// Exact partials of J with the probability tables treated as unconstrained
// coordinates. Entries of d_chi outside the admissible sets stay zero.
struct Gradients {
  std::vector<std::vector<std::vector<double>>> d_pi;   // [agent][rho][action]
  std::vector<std::vector<std::vector<double>>> d_chi;  // [agent][s][rho]
  double value = 0.0;                                   // J at the input pair
};

Gradients objective_gradients(const SamgModel& m, const AgentPolicy& pi,
                              const AdversaryPolicy& chi);

// Euclidean projection onto the probability simplex, in place.
void project_simplex(std::vector<double>& v);

struct SolveReport {
  AgentPolicy pi;
  AdversaryPolicy chi;
  long iterations = 0;
  std::vector<double> objective_trace;  // length iterations + 1
  std::vector<double> residual_trace;   // max-norm step per iteration, leading 0
  double final_objective = 0.0;         // F at the returned policy
  long best_iteration = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
};

// Simultaneous projected gradient ascent (agents) / descent (adversaries) on
// J. Adversary rows are zeroed outside the admissible set before projecting.
// The trace records J; no convergence claim.
SolveReport gda_solve(const SamgModel& m, const AgentPolicy& pi0, const AdversaryPolicy& chi0,
                      double eta_pi, double eta_chi, long iters, std::uint64_t seed);

// Projected supergradient ascent on F itself: each iterate rebuilds the
// exact optimal adversary, then steps pi along the J gradient at that pair.
// The trace records F and the best iterate is returned.
SolveReport subgradient_solve(const SamgModel& m, const AgentPolicy& pi0, double eta, long iters,
                              double tol);

struct PolicyEnumeration {
  double best_value = 0.0;  // max of F over deterministic policies
  AgentPolicy argmax;       // lowest lexicographic witness
  std::vector<double> values;  // F per policy, lexicographic order
  long count = 0;
};

// Exhaustive worst-case scoring of every deterministic policy (capped at 1e6).
PolicyEnumeration enumerate_deterministic_policies(const SamgModel& m, double tol = 1e-8);

}  // namespace samg
