#include "samg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "samg/enumeration.hpp"
#include "samg/numeric.hpp"
#include "samg/parallel.hpp"

namespace samg {

namespace {

constexpr long kAgentPureCap = 4096;
constexpr double kScanProfileCap = 1e7;

long agent_pure_count(const SamgModel& m, int agent, std::size_t rho_count) {
  double p = 1.0;
  for (std::size_t k = 0; k < rho_count; ++k) {
    p *= m.num_actions(agent);
    if (p > static_cast<double>(kAgentPureCap)) {
      throw SizeGuardError("agent " + std::to_string(agent + 1) + " has more than " +
                           std::to_string(kAgentPureCap) + " pure stage actions");
    }
  }
  return static_cast<long>(p);
}

// Decode a pure stage action of one agent into its per-perceived-state
// choices; the first perceived state is the most significant digit.
void decode_pure(long index, int n_actions, std::vector<int>& digits) {
  for (int k = static_cast<int>(digits.size()) - 1; k >= 0; --k) {
    digits[k] = static_cast<int>(index % n_actions);
    index /= n_actions;
  }
}

std::vector<double> q_row_for_state(const SamgModel& m, int s, const ValueTable& v) {
  const long JA = m.num_joint_actions();
  std::vector<double> q(JA, 0.0);
  for (long ja = 0; ja < JA; ++ja) {
    double acc = m.reward[s][ja];
    const auto& row = m.transition[s][ja];
    for (int sp = 0; sp < m.num_states(); ++sp) acc += m.gamma * row[sp] * v[sp];
    q[ja] = acc;
  }
  return q;
}

// Behavioral view of a stage profile: one action row per admissible
// perceived state and one perception row per adversary.
struct Behavioral {
  std::vector<std::vector<std::vector<double>>> agent_rows;  // [agent][k][action]
  std::vector<std::vector<double>> adv_rows;                 // [agent][k]
};

Behavioral to_behavioral(const SamgModel& m, const StageGame& g, const StageProfile& sigma) {
  const int n = g.agents;
  Behavioral b;
  b.agent_rows.resize(n);
  b.adv_rows.resize(n);
  std::vector<int> digits;
  for (int i = 0; i < n; ++i) {
    const int A = m.num_actions(i);
    const int R = static_cast<int>(g.rho_sets[i].size());
    if (static_cast<long>(sigma.agent_sigma[i].size()) != g.agent_pure_counts[i] ||
        static_cast<int>(sigma.adversary_sigma[i].size()) != R) {
      throw ValidationError("stage profile dimensions do not match the stage game");
    }
    b.agent_rows[i].assign(R, std::vector<double>(A, 0.0));
    digits.assign(R, 0);
    for (long t = 0; t < g.agent_pure_counts[i]; ++t) {
      const double w = sigma.agent_sigma[i][t];
      if (w != 0.0) {
        decode_pure(t, A, digits);
        for (int k = 0; k < R; ++k) b.agent_rows[i][k][digits[k]] += w;
      }
    }
    b.adv_rows[i] = sigma.adversary_sigma[i];
  }
  return b;
}

// Marginal payoff table of one agent: everything except that agent's own
// perception and action is folded in. g_i[k][a] mirrors the robust stage
// payoff but sourced from stage strategies.
std::vector<std::vector<double>> marginal_table(const SamgModel& m, const StageGame& g, int agent,
                                                const Behavioral& b) {
  const int n = g.agents;
  const int A = m.num_actions(agent);
  const int R = static_cast<int>(g.rho_sets[agent].size());
  std::vector<std::vector<double>> out(R, std::vector<double>(A, 0.0));
  const auto& q = g.agent_q[agent];

  std::vector<int> rho_radix(n), a_radix(n);
  for (int i = 0; i < n; ++i) {
    rho_radix[i] = static_cast<int>(g.rho_sets[i].size());
    a_radix[i] = m.num_actions(i);
  }

  std::vector<int> rho_digits(n, 0), a(n);
  do {
    double w_chi = 1.0;
    for (int i = 0; i < n; ++i) {
      if (i == agent) continue;
      w_chi *= b.adv_rows[i][rho_digits[i]];
    }
    if (w_chi == 0.0) continue;

    std::fill(a.begin(), a.end(), 0);
    do {
      double w = w_chi;
      for (int i = 0; i < n; ++i) {
        if (i == agent) continue;
        w *= b.agent_rows[i][rho_digits[i]][a[i]];
      }
      if (w == 0.0) continue;
      out[rho_digits[agent]][a[agent]] += w * q[m.joint_action_index(a)];
    } while (odometer_next(a, a_radix));
  } while (odometer_next(rho_digits, rho_radix));

  return out;
}

double utility_from_marginal(const std::vector<std::vector<double>>& gi,
                             const std::vector<std::vector<double>>& agent_rows,
                             const std::vector<double>& adv_row) {
  double u = 0.0;
  for (std::size_t k = 0; k < adv_row.size(); ++k) {
    double inner = 0.0;
    for (std::size_t a = 0; a < gi[k].size(); ++a) inner += agent_rows[k][a] * gi[k][a];
    u += adv_row[k] * inner;
  }
  return u;
}

BestResponse agent_best_response(const std::vector<std::vector<double>>& gi,
                                 const std::vector<double>& adv_row, int n_actions,
                                 long pure_count) {
  BestResponse br;
  br.value = -std::numeric_limits<double>::infinity();
  const int R = static_cast<int>(adv_row.size());
  std::vector<int> digits(R, 0);
  for (long t = 0; t < pure_count; ++t) {
    decode_pure(t, n_actions, digits);
    double v = 0.0;
    for (int k = 0; k < R; ++k) v += adv_row[k] * gi[k][digits[k]];
    if (v > br.value) {
      br.value = v;
      br.pure_action = t;
    }
  }
  return br;
}

BestResponse adversary_best_response(const std::vector<std::vector<double>>& gi,
                                     const std::vector<std::vector<double>>& agent_rows) {
  BestResponse br;
  br.value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < gi.size(); ++k) {
    double inner = 0.0;
    for (std::size_t a = 0; a < gi[k].size(); ++a) inner += agent_rows[k][a] * gi[k][a];
    if (-inner > br.value) {
      br.value = -inner;
      br.pure_action = static_cast<long>(k);
    }
  }
  return br;
}

}  // namespace

StageGame build_stage_game(const SamgModel& m, int s, const std::vector<ValueTable>& anchors) {
  if (static_cast<int>(anchors.size()) != m.agents) {
    throw ValidationError("build_stage_game needs one anchor table per agent");
  }
  StageGame g;
  g.state = s;
  g.agents = m.agents;
  g.anchor = anchors;
  g.rho_sets.resize(m.agents);
  g.agent_q.resize(m.agents);
  g.agent_pure_counts.resize(m.agents);
  for (int i = 0; i < m.agents; ++i) {
    g.rho_sets[i] = m.perturb[i][s];
    g.agent_pure_counts[i] = agent_pure_count(m, i, g.rho_sets[i].size());
    g.agent_q[i] = q_row_for_state(m, s, anchors[i]);
  }
  return g;
}

StageGame build_stage_game(const SamgModel& m, int s, const AgentPolicy& pi,
                           const AdversaryPolicy& chi, double tol) {
  std::vector<ValueTable> anchors(m.agents);
  for (int i = 0; i < m.agents; ++i) {
    anchors[i] = robust_fixed_point(m, i, pi, chi, tol).v;
  }
  return build_stage_game(m, s, anchors);
}

StageProfile embed_profile(const SamgModel& m, const StageGame& g, const AgentPolicy& pi,
                           const AdversaryPolicy& chi) {
  const int n = g.agents;
  StageProfile sigma;
  sigma.agent_sigma.resize(n);
  sigma.adversary_sigma.resize(n);
  std::vector<int> digits;
  for (int i = 0; i < n; ++i) {
    const int A = m.num_actions(i);
    const int R = static_cast<int>(g.rho_sets[i].size());
    sigma.agent_sigma[i].assign(g.agent_pure_counts[i], 0.0);
    digits.assign(R, 0);
    for (long t = 0; t < g.agent_pure_counts[i]; ++t) {
      decode_pure(t, A, digits);
      double w = 1.0;
      for (int k = 0; k < R; ++k) w *= pi.pi[i][g.rho_sets[i][k]][digits[k]];
      sigma.agent_sigma[i][t] = w;
    }
    sigma.adversary_sigma[i].assign(R, 0.0);
    for (int k = 0; k < R; ++k) sigma.adversary_sigma[i][k] = chi.chi[i][g.state][g.rho_sets[i][k]];
  }
  return sigma;
}

std::vector<double> stage_utilities(const SamgModel& m, const StageGame& g,
                                    const StageProfile& sigma) {
  const int n = g.agents;
  Behavioral b = to_behavioral(m, g, sigma);
  std::vector<double> u(2 * n, 0.0);
  for (int i = 0; i < n; ++i) {
    auto gi = marginal_table(m, g, i, b);
    u[i] = utility_from_marginal(gi, b.agent_rows[i], b.adv_rows[i]);
    u[n + i] = -u[i];
  }
  return u;
}

BestResponse stage_best_response(const SamgModel& m, const StageGame& g, int player,
                                 const StageProfile& sigma) {
  const int n = g.agents;
  if (player < 0 || player >= 2 * n) throw ValidationError("stage player index out of range");
  Behavioral b = to_behavioral(m, g, sigma);
  const int i = player < n ? player : player - n;
  auto gi = marginal_table(m, g, i, b);
  if (player < n) {
    return agent_best_response(gi, b.adv_rows[i], m.num_actions(i), g.agent_pure_counts[i]);
  }
  return adversary_best_response(gi, b.agent_rows[i]);
}

std::vector<double> stage_exploitability(const SamgModel& m, const StageGame& g,
                                         const StageProfile& sigma) {
  const int n = g.agents;
  Behavioral b = to_behavioral(m, g, sigma);
  std::vector<double> gap(2 * n, 0.0);
  for (int i = 0; i < n; ++i) {
    auto gi = marginal_table(m, g, i, b);
    const double u = utility_from_marginal(gi, b.agent_rows[i], b.adv_rows[i]);
    const auto br_agent = agent_best_response(gi, b.adv_rows[i], m.num_actions(i),
                                              g.agent_pure_counts[i]);
    const auto br_adv = adversary_best_response(gi, b.agent_rows[i]);
    gap[i] = br_agent.value - u;
    gap[n + i] = br_adv.value - (-u);
  }
  return gap;
}

VerifyReport robust_nash_verify(const SamgModel& m, const AgentPolicy& pi,
                                const AdversaryPolicy& chi, double eps, double tol) {
  {
    auto bad = validate_agent_policy(m, pi);
    auto more = validate_adversary_policy(m, chi);
    bad.insert(bad.end(), more.begin(), more.end());
    if (!bad.empty()) throw ValidationError(bad.front());
  }

  // The anchors do not depend on the state being verified, so compute the n
  // robust fixed points once.
  std::vector<ValueTable> anchors(m.agents);
  for (int i = 0; i < m.agents; ++i) anchors[i] = robust_fixed_point(m, i, pi, chi, tol).v;

  VerifyReport report;
  report.gaps.resize(m.num_states());
  report.max_gap = 0.0;
  for (int s = 0; s < m.num_states(); ++s) {
    StageGame g = build_stage_game(m, s, anchors);
    StageProfile sigma = embed_profile(m, g, pi, chi);
    report.gaps[s] = stage_exploitability(m, g, sigma);
    for (double d : report.gaps[s]) report.max_gap = std::max(report.max_gap, d);
  }
  report.satisfied = report.max_gap <= eps;
  return report;
}

// --- grid scan ----------------------------------------------------------------

namespace {

// All distributions over `dim` entries whose coordinates are multiples of
// 1/(resolution-1), in lexicographic order of the integer compositions.
std::vector<std::vector<double>> simplex_lattice(int dim, int resolution) {
  std::vector<std::vector<double>> points;
  const int steps = resolution - 1;
  std::vector<int> part(dim, 0);
  // iterative composition enumeration, first coordinate most significant
  std::function<void(int, int)> rec = [&](int coord, int left) {
    if (coord == dim - 1) {
      part[coord] = left;
      std::vector<double> row(dim);
      for (int j = 0; j < dim; ++j) row[j] = static_cast<double>(part[j]) / steps;
      normalize_exact(row);
      points.push_back(std::move(row));
      return;
    }
    for (int take = 0; take <= left; ++take) {
      part[coord] = take;
      rec(coord + 1, left - take);
    }
  };
  if (dim == 1) {
    points.push_back({1.0});
  } else {
    rec(0, steps);
  }
  return points;
}

struct ScanGrid {
  // slot layout: all agent rows (agent-major, perceived-state-minor), then
  // all adversary rows (agent-major, state-minor)
  std::vector<std::vector<std::vector<double>>> agent_options;  // [slot][option][action]
  std::vector<std::vector<std::vector<double>>> adv_options;    // [slot][option][full state row]
  std::vector<int> radix;                                       // option count per slot
  int agent_slots = 0;
  long total = 0;
};

ScanGrid make_grid(const SamgModel& m, int resolution) {
  ScanGrid grid;
  const int S = m.num_states();
  for (int i = 0; i < m.agents; ++i) {
    const auto lattice = simplex_lattice(m.num_actions(i), resolution);
    for (int rho = 0; rho < S; ++rho) {
      grid.agent_options.push_back(lattice);
      grid.radix.push_back(static_cast<int>(lattice.size()));
    }
  }
  grid.agent_slots = static_cast<int>(grid.agent_options.size());
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < S; ++s) {
      const auto& set = m.perturb[i][s];
      std::vector<std::vector<double>> options;
      for (int rho : set) {
        std::vector<double> row(S, 0.0);
        row[rho] = 1.0;
        options.push_back(std::move(row));
      }
      if (set.size() > 1) {
        std::vector<double> row(S, 0.0);
        for (int rho : set) row[rho] = 1.0 / set.size();
        normalize_exact(row);
        options.push_back(std::move(row));
      }
      grid.adv_options.push_back(std::move(options));
      grid.radix.push_back(static_cast<int>(grid.adv_options.back().size()));
    }
  }
  const double total = radix_product(grid.radix);
  if (total > kScanProfileCap) {
    throw SizeGuardError("scan grid of " + fmt17(total) + " profiles exceeds " +
                         fmt17(kScanProfileCap));
  }
  grid.total = static_cast<long>(total);
  return grid;
}

void decode_profile(const ScanGrid& grid, long index, std::vector<int>& digits) {
  digits.resize(grid.radix.size());
  for (int k = static_cast<int>(grid.radix.size()) - 1; k >= 0; --k) {
    digits[k] = static_cast<int>(index % grid.radix[k]);
    index /= grid.radix[k];
  }
}

void materialize(const SamgModel& m, const ScanGrid& grid, const std::vector<int>& digits,
                 AgentPolicy& pi, AdversaryPolicy& chi) {
  const int S = m.num_states();
  int slot = 0;
  for (int i = 0; i < m.agents; ++i) {
    for (int rho = 0; rho < S; ++rho, ++slot) {
      pi.pi[i][rho] = grid.agent_options[slot][digits[slot]];
    }
  }
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < S; ++s, ++slot) {
      chi.chi[i][s] = grid.adv_options[slot - grid.agent_slots][digits[slot]];
    }
  }
}

// Slots whose content feeds agent i's robust anchor: every slot not owned by
// agent i or its adversary.
std::vector<int> anchor_slots(const SamgModel& m, int agent) {
  const int S = m.num_states();
  std::vector<int> slots;
  int slot = 0;
  for (int i = 0; i < m.agents; ++i) {
    for (int rho = 0; rho < S; ++rho, ++slot) {
      if (i != agent) slots.push_back(slot);
    }
  }
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < S; ++s, ++slot) {
      if (i != agent) slots.push_back(slot);
    }
  }
  return slots;
}

double max_state_gap(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi,
                     const std::vector<ValueTable>& anchors) {
  double worst = 0.0;
  for (int s = 0; s < m.num_states(); ++s) {
    StageGame g = build_stage_game(m, s, anchors);
    StageProfile sigma = embed_profile(m, g, pi, chi);
    for (double d : stage_exploitability(m, g, sigma)) worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace

ScanResult nonexistence_scan(const SamgModel& m, int grid_resolution, double eps, double tol) {
  if (grid_resolution < 2) throw ValidationError("grid resolution must be at least 2");
  const ScanGrid grid = make_grid(m, grid_resolution);

  // Phase 1: robust anchors for every distinct context an agent can face.
  // The anchor ignores the agent's own rows, so it is a pure function of the
  // complement slots; enumerate those directly.
  std::vector<std::vector<int>> slots_of(m.agents);
  std::vector<std::vector<ValueTable>> anchors_of(m.agents);
  for (int i = 0; i < m.agents; ++i) {
    slots_of[i] = anchor_slots(m, i);
    std::vector<int> sub_radix;
    for (int slot : slots_of[i]) sub_radix.push_back(grid.radix[slot]);
    const long contexts = static_cast<long>(radix_product(sub_radix));
    anchors_of[i].resize(contexts);
    parallel_for(contexts, [&, i](long c) {
      std::vector<int> digits(grid.radix.size(), 0);
      long rest = c;
      for (int k = static_cast<int>(sub_radix.size()) - 1; k >= 0; --k) {
        digits[slots_of[i][k]] = static_cast<int>(rest % sub_radix[k]);
        rest /= sub_radix[k];
      }
      AgentPolicy pi = uniform_policy(m);
      AdversaryPolicy chi = identity_adversary(m);
      materialize(m, grid, digits, pi, chi);
      anchors_of[i][c] = robust_fixed_point(m, i, pi, chi, tol).v;
    });
  }

  // Phase 2: evaluate the exploitability of every grid profile.
  const long chunk = 4096;
  const long chunks = (grid.total + chunk - 1) / chunk;
  std::vector<double> chunk_min(chunks, std::numeric_limits<double>::infinity());
  std::vector<long> chunk_arg(chunks, -1);

  parallel_for(chunks, [&](long c) {
    const long begin = c * chunk;
    const long end = std::min(begin + chunk, grid.total);
    AgentPolicy pi = uniform_policy(m);
    AdversaryPolicy chi = identity_adversary(m);
    std::vector<int> digits;
    std::vector<ValueTable> anchors(m.agents);
    double best = std::numeric_limits<double>::infinity();
    long best_at = -1;
    for (long index = begin; index < end; ++index) {
      decode_profile(grid, index, digits);
      materialize(m, grid, digits, pi, chi);
      for (int i = 0; i < m.agents; ++i) {
        long context = 0;
        for (int slot : slots_of[i]) context = context * grid.radix[slot] + digits[slot];
        anchors[i] = anchors_of[i][context];
      }
      const double gap = max_state_gap(m, pi, chi, anchors);
      if (gap < best) {
        best = gap;
        best_at = index;
      }
    }
    chunk_min[c] = best;
    chunk_arg[c] = best_at;
  });

  double best = std::numeric_limits<double>::infinity();
  long best_at = 0;
  for (long c = 0; c < chunks; ++c) {
    if (chunk_min[c] < best) {
      best = chunk_min[c];
      best_at = chunk_arg[c];
    }
  }

  ScanResult out;
  out.min_max_gap = best;
  out.profiles = grid.total;
  out.found_within_eps = best <= eps;
  out.pi = uniform_policy(m);
  out.chi = identity_adversary(m);
  std::vector<int> digits;
  decode_profile(grid, best_at, digits);
  materialize(m, grid, digits, out.pi, out.chi);
  return out;
}

}  // namespace samg
