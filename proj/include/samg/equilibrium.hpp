#pragma once

#include <vector>

#include "samg/model.hpp"
#include "samg/robust_value.hpp"

namespace samg {

// Auxiliary 2n-player game at one state. Players 0..n-1 are the agents;
// player n+i is agent i's adversary. An agent's pure action assigns one
// action to every admissible perceived state (mixed-radix encoded, first
// perceived state most significant); an adversary's pure action picks one
// admissible perceived state. Utilities anchor continuation play at the
// per-agent robust value tables computed from the context profile.
struct StageGame {
  int state = 0;
  int agents = 0;
  std::vector<ValueTable> anchor;              // [agent] robust value tables
  std::vector<std::vector<double>> agent_q;    // [agent][joint_a] anchored q rows at `state`
  std::vector<std::vector<int>> rho_sets;      // [agent] admissible perceived states
  std::vector<long> agent_pure_counts;         // [agent] |A_i| ^ |rho_set_i|
};

// A (possibly mixed) strategy profile of the stage game.
struct StageProfile {
  std::vector<std::vector<double>> agent_sigma;      // [agent][pure action]
  std::vector<std::vector<double>> adversary_sigma;  // [agent][rho index]
};

// Computes the per-agent robust anchors from the context profile and wires
// them into the utility tables. Guard: every agent's pure-action count must
// stay at or below 4096.
StageGame build_stage_game(const SamgModel& m, int s, const AgentPolicy& pi,
                           const AdversaryPolicy& chi, double tol);
// Same with anchors the caller already has (one robust fixed point per agent).
StageGame build_stage_game(const SamgModel& m, int s, const std::vector<ValueTable>& anchors);

// Product-form embedding of a behavioral profile into stage strategies.
StageProfile embed_profile(const SamgModel& m, const StageGame& g, const AgentPolicy& pi,
                           const AdversaryPolicy& chi);

// Utilities of all 2n players; u[n+i] = -u[i] by construction.
std::vector<double> stage_utilities(const SamgModel& m, const StageGame& g,
                                    const StageProfile& sigma);

struct BestResponse {
  double value = 0.0;
  long pure_action = 0;  // ties resolved toward the lowest index
};

// Exhaustive pure best response for one player against sigma's other rows.
BestResponse stage_best_response(const SamgModel& m, const StageGame& g, int player,
                                 const StageProfile& sigma);

// gap[p] = best-response value - current value, one entry per player.
std::vector<double> stage_exploitability(const SamgModel& m, const StageGame& g,
                                         const StageProfile& sigma);

struct VerifyReport {
  bool satisfied = false;
  double max_gap = 0.0;
  std::vector<std::vector<double>> gaps;  // [state][player]
};

// Checks the profile state by state: satisfied iff no player improves by
// more than eps in any stage game.
VerifyReport robust_nash_verify(const SamgModel& m, const AgentPolicy& pi,
                                const AdversaryPolicy& chi, double eps, double tol);

struct ScanResult {
  double min_max_gap = 0.0;  // smallest max-state gap over the whole grid
  AgentPolicy pi;            // witness attaining it
  AdversaryPolicy chi;
  long profiles = 0;
  bool found_within_eps = false;
};

// Exhaustive grid search for an approximate equilibrium: agent rows range
// over the simplex lattice with `grid_resolution` points per coordinate,
// adversary rows over every deterministic admissible choice plus uniform.
// Total grid size is capped at 1e7 profiles.
ScanResult nonexistence_scan(const SamgModel& m, int grid_resolution, double eps,
                             double tol = 1e-8);

}  // namespace samg
