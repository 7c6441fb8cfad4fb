#include "samg/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <vector>

#include "samg/adversary.hpp"
#include "samg/equilibrium.hpp"
#include "samg/errors.hpp"
#include "samg/eval.hpp"
#include "samg/maximin.hpp"
#include "samg/model.hpp"
#include "samg/numeric.hpp"
#include "samg/rng.hpp"
#include "samg/robust_value.hpp"

namespace samg {

namespace {

std::string g3(double x) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

CheckResult run_check(const std::string& name, const std::function<bool(std::string&)>& body) {
  CheckResult r;
  r.name = name;
  const double t0 = now_seconds();
  try {
    r.pass = body(r.detail);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = now_seconds() - t0;
  return r;
}

bool within_budget(double seconds, double budget, std::string& detail) {
  if (seconds <= budget) return true;
  detail += " [took " + g3(seconds) + " s, budget " + g3(budget) + " s]";
  return false;
}

// --- fixture policies on the two-state builtin games -------------------------

// both agents pick whatever keeps the reward flowing: same at s1, different at s2
AgentPolicy coordination_policy(const SamgModel& m) {
  return deterministic_policy(m, {{0, 0}, {0, 1}});
}

AgentPolicy always_same_policy(const SamgModel& m) {
  return deterministic_policy(m, {{0, 0}, {0, 0}});
}

AgentPolicy always_differ_policy(const SamgModel& m) {
  return deterministic_policy(m, {{0, 0}, {1, 1}});
}

SamgModel with_delta_s2_init(SamgModel m) {
  std::fill(m.init.begin(), m.init.end(), 0.0);
  m.init.back() = 1.0;
  return m;
}

AgentPolicy mix_toward_uniform(const SamgModel& m, const AgentPolicy& base, double keep) {
  AgentPolicy out = base;
  for (int i = 0; i < m.agents; ++i) {
    for (auto& row : out.pi[i]) {
      const double u = (1.0 - keep) / row.size();
      for (double& p : row) p = keep * p + u;
      normalize_exact(row);
    }
  }
  return out;
}

AgentPolicy random_interior_policy(const SamgModel& m, std::uint64_t seed) {
  Rng rng(seed);
  AgentPolicy out = uniform_policy(m);
  for (int i = 0; i < m.agents; ++i) {
    for (auto& row : out.pi[i]) {
      for (double& p : row) p = rng.uniform01() + 0.1;
      normalize_exact(row);
    }
  }
  return out;
}

AdversaryPolicy random_interior_adversary(const SamgModel& m, std::uint64_t seed) {
  Rng rng(seed);
  AdversaryPolicy out = uniform_adversary(m);
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < m.num_states(); ++s) {
      std::vector<double> row(m.num_states(), 0.0);
      for (int rho : m.perturb[i][s]) row[rho] = rng.uniform01() + 0.1;
      normalize_exact(row);
      out.chi[i][s] = row;
    }
  }
  return out;
}

std::vector<SamgModel> gate_games() {
  std::vector<SamgModel> games;
  games.push_back(builtin_game("fig4"));
  games.push_back(builtin_game("fig5"));
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    games.push_back(random_game(seed, 2, 3, 2, 2));
  }
  return games;
}

// One shared state, one shared reward: 1 when the two agents match. The
// adversaries are powerless by construction, so a stage equilibrium exists.
SamgModel matching_game() {
  SamgModel m;
  m.agents = 2;
  m.states = {"s1"};
  m.actions = {{"a1", "a2"}, {"a1", "a2"}};
  m.gamma = 0.9;
  m.transition.assign(1, std::vector<std::vector<double>>(4, {1.0}));
  m.reward.assign(1, {1.0, 0.0, 0.0, 1.0});
  m.perturb.assign(2, {{0}});
  m.init = {1.0};
  return m;
}

// Relabel every state through a bijection, keeping the agents' tables as
// they are: rewards and transitions move with the state names and the
// perception sets collapse to the true state.
SamgModel relabeled_game(const SamgModel& m, const std::vector<int>& perm) {
  SamgModel out = m;
  const int S = m.num_states();
  const long JA = m.num_joint_actions();
  for (int s = 0; s < S; ++s) {
    for (long ja = 0; ja < JA; ++ja) {
      out.reward[perm[s]][ja] = m.reward[s][ja];
      for (int sp = 0; sp < S; ++sp) {
        out.transition[perm[s]][ja][perm[sp]] = m.transition[s][ja][sp];
      }
    }
    out.init[perm[s]] = m.init[s];
  }
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < S; ++s) out.perturb[i][s] = {s};
  }
  return out;
}

// --- brute-force stage maximin over simplex grids ----------------------------

// every distribution over `dim` actions with coordinates in k/steps
std::vector<std::vector<double>> grid_points(int dim, int steps) {
  std::vector<std::vector<double>> pts;
  std::vector<int> part(dim, 0);
  std::function<void(int, int)> rec = [&](int coord, int left) {
    if (coord == dim - 1) {
      part[coord] = left;
      std::vector<double> row(dim);
      for (int j = 0; j < dim; ++j) row[j] = static_cast<double>(part[j]) / steps;
      pts.push_back(std::move(row));
      return;
    }
    for (int take = 0; take <= left; ++take) {
      part[coord] = take;
      rec(coord + 1, left - take);
    }
  };
  if (dim == 1) {
    pts.push_back({1.0});
  } else {
    rec(0, steps);
  }
  return pts;
}

// Exhaustive maximin of one stage table: the agent strategy ranges over a
// product of simplex grids (one row per perceived state), the adversary over
// the perceived states themselves (the minimum of a linear function sits at
// a vertex, so that side is exact).
double grid_stage_maximin(const std::vector<std::vector<double>>& g, int points_per_simplex) {
  const int R = static_cast<int>(g.size());
  const int A = static_cast<int>(g[0].size());
  const auto pts = grid_points(A, points_per_simplex - 1);

  double combos = 1.0;
  for (int k = 0; k < R; ++k) combos *= pts.size();
  if (combos > 1e7) throw SizeGuardError("stage grid too large to enumerate");

  std::vector<int> pick(R, 0);
  double best = -std::numeric_limits<double>::infinity();
  while (true) {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k < R; ++k) {
      double row = 0.0;
      for (int a = 0; a < A; ++a) row += pts[pick[k]][a] * g[k][a];
      worst = std::min(worst, row);
    }
    best = std::max(best, worst);
    int k = R - 1;
    while (k >= 0 && pick[k] + 1 == static_cast<int>(pts.size())) pick[k--] = 0;
    if (k < 0) break;
    ++pick[k];
  }
  return best;
}

// --- finite-difference probe of the exact gradients ---------------------------

double raw_objective(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  return expected_value(m, evaluate_raw(m, pi, chi));
}

bool gradients_match_fd(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi,
                        double& worst_seen) {
  const double h = 1e-6;
  const Gradients g = objective_gradients(m, pi, chi);
  const double allow = std::max(1e-4, 1e-3 * std::abs(g.value));

  bool ok = true;
  for (int i = 0; i < m.agents; ++i) {
    for (int rho = 0; rho < m.num_states(); ++rho) {
      for (int a = 0; a < m.num_actions(i); ++a) {
        AgentPolicy up = pi, dn = pi;
        up.pi[i][rho][a] += h;
        dn.pi[i][rho][a] -= h;
        const double fd = (raw_objective(m, up, chi) - raw_objective(m, dn, chi)) / (2 * h);
        const double err = std::abs(fd - g.d_pi[i][rho][a]);
        worst_seen = std::max(worst_seen, err);
        ok = ok && err <= allow;
      }
    }
    for (int s = 0; s < m.num_states(); ++s) {
      for (int rho : m.perturb[i][s]) {
        AdversaryPolicy up = chi, dn = chi;
        up.chi[i][s][rho] += h;
        dn.chi[i][s][rho] -= h;
        const double fd = (raw_objective(m, pi, up) - raw_objective(m, pi, dn)) / (2 * h);
        const double err = std::abs(fd - g.d_chi[i][s][rho]);
        worst_seen = std::max(worst_seen, err);
        ok = ok && err <= allow;
      }
    }
  }
  return ok;
}

// ==============================================================================
// counterexample checks
// ==============================================================================

CheckResult check_coordination_collapse() {
  return run_check("coordination collapses under the optimal adversary", [](std::string& d) {
    const SamgModel m = builtin_game("fig4");
    const AgentPolicy pi = coordination_policy(m);
    const ValueTable v = evaluate(m, pi, identity_adversary(m));
    const ValueTable vb = optimal_adversary(m, pi, 1e-8).v_bar;
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x - 100.0));
    for (double x : vb) worst = std::max(worst, std::abs(x - 0.0));
    d = "unperturbed 100, adversarial 0, deviation " + g3(worst);
    return worst <= 1e-4;
  });
}

CheckResult check_stochastic_floor() {
  return run_check("uniform mixing secures 50 in every state", [](std::string& d) {
    const SamgModel m = builtin_game("fig4");
    const ValueTable vb = optimal_adversary(m, uniform_policy(m), 1e-8).v_bar;
    double worst = 0.0;
    for (double x : vb) worst = std::max(worst, std::abs(x - 50.0));
    d = "worst-case values " + g3(vb[0]) + ", " + g3(vb[1]);
    return worst <= 1e-4;
  });
}

CheckResult check_deterministic_classes() {
  return run_check("deterministic policies fall into three value classes", [](std::string& d) {
    const SamgModel m = builtin_game("fig4");
    const double hi = 1.0 / (1.0 - 0.99 * 0.99);
    const double lo = 0.99 / (1.0 - 0.99 * 0.99);
    const std::vector<std::vector<double>> classes = {{0.0, 0.0}, {0.0, 100.0}, {hi, lo}};
    std::vector<int> counts(3, 0);
    for (int idx = 0; idx < 16; ++idx) {
      std::vector<std::vector<int>> choice = {{(idx >> 3) & 1, (idx >> 2) & 1},
                                              {(idx >> 1) & 1, idx & 1}};
      const ValueTable vb = optimal_adversary(m, deterministic_policy(m, choice), 1e-8).v_bar;
      int hits = 0;
      for (int c = 0; c < 3; ++c) {
        if (std::abs(vb[0] - classes[c][0]) <= 1e-4 && std::abs(vb[1] - classes[c][1]) <= 1e-4) {
          ++counts[c];
          ++hits;
        }
      }
      if (hits != 1) {
        d = "policy " + std::to_string(idx) + " has worst case (" + g3(vb[0]) + ", " + g3(vb[1]) +
            "), outside every class";
        return false;
      }
    }
    d = "class sizes " + std::to_string(counts[0]) + "/" + std::to_string(counts[1]) + "/" +
        std::to_string(counts[2]);
    return counts[0] == 12 && counts[1] == 2 && counts[2] == 2;
  });
}

CheckResult check_no_dominating_policy() {
  return run_check("neither candidate policy dominates in both states", [](std::string& d) {
    const SamgModel m = builtin_game("fig4");
    const ValueTable differ = optimal_adversary(m, always_differ_policy(m), 1e-8).v_bar;
    const ValueTable mixed = optimal_adversary(m, uniform_policy(m), 1e-8).v_bar;
    double worst = std::abs(differ[0] - 0.0);
    worst = std::max(worst, std::abs(differ[1] - 100.0));
    worst = std::max(worst, std::abs(mixed[0] - 50.0));
    worst = std::max(worst, std::abs(mixed[1] - 50.0));
    d = "s1: " + g3(mixed[0]) + " vs " + g3(differ[0]) + ", s2: " + g3(differ[1]) + " vs " +
        g3(mixed[1]);
    return worst <= 1e-4 && mixed[0] > differ[0] && differ[1] > mixed[1];
  });
}

CheckResult check_conflicting_stage_requirements() {
  return run_check("shifted game rejects both coordination profiles", [](std::string& d) {
    const SamgModel m = builtin_game("fig5");
    const AdversaryPolicy chi = identity_adversary(m);

    const VerifyReport same = robust_nash_verify(m, always_same_policy(m), chi, 1e-4, 1e-8);
    const VerifyReport differ = robust_nash_verify(m, always_differ_policy(m), chi, 1e-4, 1e-8);

    // matching at one state forces a defection at the other, with a full
    // unit of stage value on the table
    const double same_off = *std::max_element(same.gaps[0].begin(), same.gaps[0].end());
    const double same_hit = *std::max_element(same.gaps[1].begin(), same.gaps[1].end());
    const double differ_hit = *std::max_element(differ.gaps[0].begin(), differ.gaps[0].end());
    const double differ_off = *std::max_element(differ.gaps[1].begin(), differ.gaps[1].end());

    d = "same profile gap " + g3(same_hit) + " at s2, differ profile gap " + g3(differ_hit) +
        " at s1";
    return !same.satisfied && !differ.satisfied && std::abs(same_hit - 1.0) <= 1e-4 &&
           std::abs(differ_hit - 1.0) <= 1e-4 && same_off <= 1e-4 && differ_off <= 1e-4;
  });
}

// ==============================================================================
// release-gate checks
// ==============================================================================

CheckResult gate_coordination_values() {
  return run_check("coordination policy: unperturbed and worst-case values", [](std::string& d) {
    const double t0 = now_seconds();
    const SamgModel m = builtin_game("fig4");
    const AgentPolicy pi = coordination_policy(m);
    const ValueTable v = evaluate(m, pi, identity_adversary(m));
    const ValueTable vb = optimal_adversary(m, pi, 1e-8).v_bar;
    double worst = 0.0;
    for (double x : v) worst = std::max(worst, std::abs(x - 100.0));
    for (double x : vb) worst = std::max(worst, std::abs(x - 0.0));
    d = "deviation " + g3(worst);
    return worst <= 1e-6 && within_budget(now_seconds() - t0, 1.0, d);
  });
}

CheckResult gate_stochastic_worst_case() {
  return run_check("uniform policy: worst-case value 50", [](std::string& d) {
    const double t0 = now_seconds();
    const SamgModel m = builtin_game("fig4");
    const ValueTable vb = optimal_adversary(m, uniform_policy(m), 1e-8).v_bar;
    double worst = 0.0;
    for (double x : vb) worst = std::max(worst, std::abs(x - 50.0));
    d = "deviation " + g3(worst);
    return worst <= 1e-6 && within_budget(now_seconds() - t0, 1.0, d);
  });
}

CheckResult gate_deterministic_class_values() {
  return run_check("matched and mismatched deterministic values", [](std::string& d) {
    const double t0 = now_seconds();
    const SamgModel m = builtin_game("fig4");
    const ValueTable same = evaluate(m, always_same_policy(m), identity_adversary(m));
    const ValueTable differ = optimal_adversary(m, always_differ_policy(m), 1e-8).v_bar;
    const double hi = 1.0 / (1.0 - 0.99 * 0.99);
    const double lo = 0.99 / (1.0 - 0.99 * 0.99);
    double worst = std::abs(same[0] - hi);
    worst = std::max(worst, std::abs(same[1] - lo));
    worst = std::max(worst, std::abs(differ[0] - 0.0));
    worst = std::max(worst, std::abs(differ[1] - 100.0));
    d = "deviation " + g3(worst);
    return worst <= 1e-6 && within_budget(now_seconds() - t0, 1.0, d);
  });
}

CheckResult gate_state_tradeoff() {
  return run_check("per-state trade-off between the two candidates", [](std::string& d) {
    const SamgModel m = builtin_game("fig4");
    const ValueTable differ = optimal_adversary(m, always_differ_policy(m), 1e-8).v_bar;
    const ValueTable mixed = optimal_adversary(m, uniform_policy(m), 1e-8).v_bar;
    double worst = std::abs(mixed[0] - 50.0);
    worst = std::max(worst, std::abs(differ[0] - 0.0));
    worst = std::max(worst, std::abs(differ[1] - 100.0));
    worst = std::max(worst, std::abs(mixed[1] - 50.0));
    d = "deviation " + g3(worst);
    return worst <= 1e-6 && mixed[0] > differ[0] && differ[1] > mixed[1];
  });
}

CheckResult gate_adversary_optimality() {
  return run_check("solved adversary matches exhaustive enumeration", [](std::string& d) {
    const double t0 = now_seconds();
    double worst = 0.0;
    int games = 0;
    for (const SamgModel& m : gate_games()) {
      std::vector<AgentPolicy> policies;
      policies.push_back(random_interior_policy(m, 500 + games));
      {
        Rng rng(900 + games);
        std::vector<std::vector<int>> choice(m.agents);
        for (int i = 0; i < m.agents; ++i) {
          for (int s = 0; s < m.num_states(); ++s) {
            choice[i].push_back(rng.uniform_int(m.num_actions(i)));
          }
        }
        policies.push_back(deterministic_policy(m, choice));
      }
      for (const AgentPolicy& pi : policies) {
        const ValueTable vb = optimal_adversary(m, pi, 1e-8).v_bar;
        const AdversaryEnumeration en = enumerate_deterministic_adversaries(m, pi);
        for (int s = 0; s < m.num_states(); ++s) {
          worst = std::max(worst, std::abs(vb[s] - en.pointwise_min[s]));
        }
      }
      ++games;
    }
    d = std::to_string(games) + " games, largest gap to enumeration " + g3(worst);
    return worst <= 1e-6 && within_budget(now_seconds() - t0, 30.0, d);
  });
}

CheckResult gate_contraction_and_uniqueness() {
  return run_check("robust operator contracts and has one fixed point", [](std::string& d) {
    double worst_excess = -std::numeric_limits<double>::infinity();
    double worst_split = 0.0;
    const double tol = 1e-8;
    int game_idx = 0;
    for (const SamgModel& m : gate_games()) {
      const AgentPolicy pi = uniform_policy(m);
      const AdversaryPolicy chi = uniform_adversary(m);
      Rng rng(6000 + game_idx);
      for (int k = 0; k < 100; ++k) {
        const int agent = k % m.agents;
        ValueTable v(m.num_states()), z(m.num_states());
        for (double& x : v) x = rng.uniform(-100.0, 100.0);
        for (double& x : z) x = rng.uniform(-100.0, 100.0);
        const ValueTable pv = robust_operator(m, agent, pi, chi, v);
        const ValueTable pz = robust_operator(m, agent, pi, chi, z);
        double lhs = 0.0, rhs = 0.0;
        for (int s = 0; s < m.num_states(); ++s) {
          lhs = std::max(lhs, std::abs(pv[s] - pz[s]));
          rhs = std::max(rhs, std::abs(v[s] - z[s]));
        }
        worst_excess = std::max(worst_excess, lhs - m.gamma * rhs);
        if (lhs > m.gamma * rhs + 1e-12) {
          d = "contraction violated by " + g3(lhs - m.gamma * rhs);
          return false;
        }
      }
      // second start high above any reachable value; both runs must land on
      // the same table
      for (int agent = 0; agent < m.agents; ++agent) {
        const ValueTable lo = robust_fixed_point(m, agent, pi, chi, tol).v;
        const double threshold = tol * (1.0 - m.gamma) / (2.0 * m.gamma);
        ValueTable hi(m.num_states(), m.max_abs_reward() / (1.0 - m.gamma));
        for (long it = 0; it < 200000; ++it) {
          const ValueTable next = robust_operator(m, agent, pi, chi, hi);
          double step = 0.0;
          for (int s = 0; s < m.num_states(); ++s) step = std::max(step, std::abs(next[s] - hi[s]));
          hi = next;
          if (step <= threshold) break;
        }
        for (int s = 0; s < m.num_states(); ++s) {
          worst_split = std::max(worst_split, std::abs(lo[s] - hi[s]));
        }
      }
      ++game_idx;
    }
    d = "largest contraction slack " + g3(-worst_excess) + ", start split " + g3(worst_split);
    return worst_split <= 2.0 * tol;
  });
}

CheckResult gate_stage_maximin_oracle() {
  return run_check("stage maximin agrees with grid search", [](std::string& d) {
    double worst = 0.0;
    long problems = 0;
    for (const SamgModel& m : gate_games()) {
      const AgentPolicy pi = uniform_policy(m);
      const AdversaryPolicy chi = uniform_adversary(m);
      for (int i = 0; i < m.agents; ++i) {
        std::vector<ValueTable> tables;
        tables.emplace_back(m.num_states(), 0.0);
        tables.push_back(robust_fixed_point(m, i, pi, chi, 1e-8).v);
        for (int s = 0; s < m.num_states(); ++s) {
          if (static_cast<long>(m.perturb[i][s].size()) * m.num_actions(i) > 16) continue;
          for (const ValueTable& v : tables) {
            const StagePayoff payoff = stage_payoff(m, i, s, v, pi, chi);
            const double reduced = stage_maximin(payoff).value;
            const double gridded = grid_stage_maximin(payoff.g, 201);
            worst = std::max(worst, std::abs(reduced - gridded));
            ++problems;
          }
        }
      }
    }
    d = std::to_string(problems) + " stage problems, largest split " + g3(worst);
    return worst <= 1e-6;
  });
}

CheckResult gate_equilibrium_scan() {
  return run_check("equilibrium scan: gap floor and gap-free profile", [](std::string& d) {
    const ScanResult shifted = nonexistence_scan(builtin_game("fig5"), 11, 1e-3, 1e-8);
    const ScanResult matched = nonexistence_scan(matching_game(), 11, 1e-6, 1e-8);
    d = "shifted floor " + g3(shifted.min_max_gap) + " over " +
        std::to_string(shifted.profiles) + " profiles, matching best " +
        g3(matched.min_max_gap);
    return shifted.min_max_gap > 1e-3 && !shifted.found_within_eps &&
           matched.min_max_gap <= 1e-6 && matched.found_within_eps;
  });
}

CheckResult gate_policy_optimum() {
  return run_check("worst-case optimum: enumeration and ascent agree", [](std::string& d) {
    const double t0 = now_seconds();
    const SamgModel m = with_delta_s2_init(builtin_game("fig4"));
    const PolicyEnumeration en = enumerate_deterministic_policies(m, 1e-8);
    const AgentPolicy differ = always_differ_policy(m);
    bool witness_ok = std::abs(en.best_value - 100.0) <= 1e-6;
    for (int i = 0; i < m.agents && witness_ok; ++i) {
      for (int s = 0; s < m.num_states() && witness_ok; ++s) {
        witness_ok = en.argmax.pi[i][s] == differ.pi[i][s];
      }
    }

    const AgentPolicy start = mix_toward_uniform(m, differ, 0.95);
    // exact gradients carry the full discounted-occupancy scale (roughly
    // 1/(1-gamma)^2 here), so the step size has to be small to stay off the
    // simplex walls; 1e-6 climbs smoothly while 1e-5 already overshoots
    const SolveReport report = subgradient_solve(m, start, 1e-6, 10000, 1e-8);

    d = "enumerated optimum " + g3(en.best_value) + ", ascent reached " +
        g3(report.final_objective) + " at iteration " + std::to_string(report.best_iteration);
    return witness_ok && report.final_objective >= 99.0 &&
           within_budget(now_seconds() - t0, 60.0, d);
  });
}

CheckResult gate_gradient_check() {
  return run_check("exact gradients match finite differences", [](std::string& d) {
    double worst = 0.0;
    bool ok = true;
    int game_idx = 0;
    for (const SamgModel& m : gate_games()) {
      ok = ok && gradients_match_fd(m, uniform_policy(m), uniform_adversary(m), worst);
      ok = ok && gradients_match_fd(m, random_interior_policy(m, 1000 + game_idx),
                                    random_interior_adversary(m, 2000 + game_idx), worst);
      ++game_idx;
    }
    {
      const SamgModel m = builtin_game("fig4");
      ok = ok && gradients_match_fd(m, uniform_policy(m), identity_adversary(m), worst);
    }
    d = "largest coordinate error " + g3(worst);
    return ok;
  });
}

CheckResult gate_simulation_consistency() {
  return run_check("simulation agrees with exact evaluation", [](std::string& d) {
    const SamgModel m = builtin_game("fig4");
    const double tail = std::pow(m.gamma, 2000) * m.max_abs_reward() / (1.0 - m.gamma);

    struct Pair {
      AgentPolicy pi;
      AdversaryPolicy chi;
    };
    std::vector<Pair> pairs;
    pairs.push_back({coordination_policy(m), identity_adversary(m)});
    pairs.push_back({coordination_policy(m), optimal_adversary(m, coordination_policy(m), 1e-8).chi});
    pairs.push_back({uniform_policy(m), identity_adversary(m)});
    pairs.push_back({always_same_policy(m), identity_adversary(m)});
    pairs.push_back({always_differ_policy(m), identity_adversary(m)});

    double worst_margin = -std::numeric_limits<double>::infinity();
    std::uint64_t seed = 11000;
    for (const Pair& p : pairs) {
      const double exact = expected_value(m, evaluate(m, p.pi, p.chi));
      const SimulationResult sim = simulate(m, p.pi, p.chi, 10000, 2000, seed++);
      const double err = std::abs(sim.mean - exact);
      const double allow = 3.0 * sim.standard_error + tail + 1e-9;
      worst_margin = std::max(worst_margin, err - allow);
      if (err > allow) {
        d = "estimate " + g3(sim.mean) + " vs exact " + g3(exact) + " exceeds allowance " +
            g3(allow);
        return false;
      }
    }
    d = std::to_string(pairs.size()) + " pairs, worst margin " + g3(worst_margin);
    return true;
  });
}

CheckResult gate_relabeling_reduction() {
  return run_check("swapping state labels commutes with evaluation", [](std::string& d) {
    const SamgModel m = builtin_game("fig4");
    const std::vector<int> perm = {1, 0};
    const SamgModel rel = relabeled_game(m, perm);
    const AdversaryPolicy swap_chi = deterministic_adversary(m, {{1, 0}, {1, 0}});
    const AdversaryPolicy rel_chi = identity_adversary(rel);

    std::vector<AgentPolicy> policies = {coordination_policy(m), uniform_policy(m),
                                         random_interior_policy(m, 1200)};
    double worst = 0.0;
    for (const AgentPolicy& pi : policies) {
      const ValueTable direct = evaluate(m, pi, swap_chi);
      const ValueTable moved = evaluate(rel, pi, rel_chi);
      for (int s = 0; s < m.num_states(); ++s) {
        worst = std::max(worst, std::abs(direct[s] - moved[perm[s]]));
      }
    }
    d = "largest split " + g3(worst);
    return worst <= 1e-10;
  });
}

}  // namespace

std::vector<CheckResult> counterexample_checks() {
  std::vector<CheckResult> out;
  out.push_back(check_coordination_collapse());
  out.push_back(check_stochastic_floor());
  out.push_back(check_deterministic_classes());
  out.push_back(check_no_dominating_policy());
  out.push_back(check_conflicting_stage_requirements());
  return out;
}

std::vector<CheckResult> acceptance_checks() {
  std::vector<CheckResult> out;
  out.push_back(gate_coordination_values());
  out.push_back(gate_stochastic_worst_case());
  out.push_back(gate_deterministic_class_values());
  out.push_back(gate_state_tradeoff());
  out.push_back(gate_adversary_optimality());
  out.push_back(gate_contraction_and_uniqueness());
  out.push_back(gate_stage_maximin_oracle());
  out.push_back(gate_equilibrium_scan());
  out.push_back(gate_policy_optimum());
  out.push_back(gate_gradient_check());
  out.push_back(gate_simulation_consistency());
  out.push_back(gate_relabeling_reduction());
  return out;
}

std::vector<CheckResult> full_acceptance_suite() {
  std::vector<CheckResult> out = counterexample_checks();
  std::vector<CheckResult> gate = acceptance_checks();
  out.insert(out.end(), gate.begin(), gate.end());
  return out;
}

}  // namespace samg
