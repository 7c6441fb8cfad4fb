#include "samg/maximin.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "samg/adversary.hpp"
#include "samg/enumeration.hpp"
#include "samg/errors.hpp"
#include "samg/eval.hpp"
#include "samg/numeric.hpp"
#include "samg/parallel.hpp"

namespace samg {

namespace {

constexpr double kJointEnumerationCap = 1e7;
constexpr double kDeterministicPolicyCap = 1e6;
constexpr double kFinalWorstCaseTol = 1e-8;

void require_valid(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  auto bad = validate_agent_policy(m, pi);
  auto more = validate_adversary_policy(m, chi);
  bad.insert(bad.end(), more.begin(), more.end());
  if (!bad.empty()) throw ValidationError(bad.front());
}

double max_abs_delta(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

}  // namespace

double objective(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  return expected_value(m, evaluate(m, pi, chi));
}

double worst_case_objective(const SamgModel& m, const AgentPolicy& pi, double tol) {
  return expected_value(m, optimal_adversary(m, pi, tol).v_bar);
}

Gradients objective_gradients(const SamgModel& m, const AgentPolicy& pi,
                              const AdversaryPolicy& chi) {
  const int n = m.agents;
  const int S = m.num_states();

  const ValueTable v = evaluate(m, pi, chi);
  const ValueTable d = occupancy(m, pi, chi);
  const auto q = q_from_v(m, v);

  Gradients g;
  g.value = expected_value(m, v);
  g.d_pi.resize(n);
  g.d_chi.resize(n);
  for (int i = 0; i < n; ++i) {
    g.d_pi[i].assign(S, std::vector<double>(m.num_actions(i), 0.0));
    g.d_chi[i].assign(S, std::vector<double>(S, 0.0));
  }

  std::vector<int> rho_radix(n), a_radix(n), rho_digits(n), a(n);
  std::vector<double> chi_factor(n), pi_factor(n);
  for (int s = 0; s < S; ++s) {
    double combos = 1.0;
    for (int i = 0; i < n; ++i) {
      rho_radix[i] = static_cast<int>(m.perturb[i][s].size());
      a_radix[i] = m.num_actions(i);
      combos *= rho_radix[i] * a_radix[i];
    }
    if (combos > kJointEnumerationCap) {
      throw SizeGuardError("joint perception/action space at state " + m.states[s] +
                           " exceeds the enumeration cap");
    }

    std::fill(rho_digits.begin(), rho_digits.end(), 0);
    do {
      double chi_all = 1.0;
      for (int i = 0; i < n; ++i) {
        chi_factor[i] = chi.chi[i][s][m.perturb[i][s][rho_digits[i]]];
        chi_all *= chi_factor[i];
      }

      std::fill(a.begin(), a.end(), 0);
      do {
        double pi_all = 1.0;
        for (int i = 0; i < n; ++i) {
          pi_factor[i] = pi.pi[i][m.perturb[i][s][rho_digits[i]]][a[i]];
          pi_all *= pi_factor[i];
        }
        const double dq = d[s] * q[s][m.joint_action_index(a)];
        if (dq == 0.0) continue;
        for (int i = 0; i < n; ++i) {
          // leave-one-out products, never formed by division
          double loo_chi = 1.0, loo_pi = 1.0;
          for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            loo_chi *= chi_factor[j];
            loo_pi *= pi_factor[j];
          }
          const int rho_state = m.perturb[i][s][rho_digits[i]];
          g.d_pi[i][rho_state][a[i]] += dq * chi_all * loo_pi;
          g.d_chi[i][s][rho_state] += dq * loo_chi * pi_all;
        }
      } while (odometer_next(a, a_radix));
    } while (odometer_next(rho_digits, rho_radix));
  }
  return g;
}

void project_simplex(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> sorted(v);
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  for (double& x : v) x = std::max(0.0, x - theta);
}

namespace {

// Project an adversary row onto the simplex restricted to the admissible
// perceived states; everything else is forced to zero.
void project_adversary_row(std::vector<double>& row, const std::vector<int>& admissible) {
  std::vector<double> sub(admissible.size());
  for (std::size_t k = 0; k < admissible.size(); ++k) sub[k] = row[admissible[k]];
  project_simplex(sub);
  std::fill(row.begin(), row.end(), 0.0);
  for (std::size_t k = 0; k < admissible.size(); ++k) row[admissible[k]] = sub[k];
}

}  // namespace

SolveReport gda_solve(const SamgModel& m, const AgentPolicy& pi0, const AdversaryPolicy& chi0,
                      double eta_pi, double eta_chi, long iters, std::uint64_t seed) {
  if (eta_pi <= 0.0 || eta_chi <= 0.0) throw ValidationError("step sizes must be positive");
  if (iters < 0) throw ValidationError("iteration count must be nonnegative");
  require_valid(m, pi0, chi0);

  const auto start = std::chrono::steady_clock::now();
  const int n = m.agents;
  const int S = m.num_states();

  AgentPolicy pi = pi0;
  AdversaryPolicy chi = chi0;

  SolveReport report;
  report.seed = seed;
  report.iterations = iters;
  report.residual_trace.push_back(0.0);

  Gradients g = objective_gradients(m, pi, chi);
  report.objective_trace.push_back(g.value);

  std::vector<double> row;
  for (long it = 1; it <= iters; ++it) {
    double step = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int rho = 0; rho < S; ++rho) {
        row = pi.pi[i][rho];
        for (int a = 0; a < m.num_actions(i); ++a) row[a] += eta_pi * g.d_pi[i][rho][a];
        project_simplex(row);
        normalize_exact(row);
        step = std::max(step, max_abs_delta(row, pi.pi[i][rho]));
        pi.pi[i][rho] = row;
      }
      for (int s = 0; s < S; ++s) {
        row = chi.chi[i][s];
        for (int rho = 0; rho < S; ++rho) row[rho] -= eta_chi * g.d_chi[i][s][rho];
        project_adversary_row(row, m.perturb[i][s]);
        normalize_exact(row);
        step = std::max(step, max_abs_delta(row, chi.chi[i][s]));
        chi.chi[i][s] = row;
      }
    }
    g = objective_gradients(m, pi, chi);
    report.objective_trace.push_back(g.value);
    report.residual_trace.push_back(step);
  }

  report.pi = pi;
  report.chi = chi;
  report.best_iteration = iters;
  report.final_objective = worst_case_objective(m, pi, kFinalWorstCaseTol);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

SolveReport subgradient_solve(const SamgModel& m, const AgentPolicy& pi0, double eta, long iters,
                              double tol) {
  if (eta <= 0.0) throw ValidationError("step size must be positive");
  if (iters < 0) throw ValidationError("iteration count must be nonnegative");
  {
    auto bad = validate_agent_policy(m, pi0);
    if (!bad.empty()) throw ValidationError(bad.front());
  }

  const auto start = std::chrono::steady_clock::now();
  const int n = m.agents;
  const int S = m.num_states();

  AgentPolicy pi = pi0;
  WorstCase wc = optimal_adversary(m, pi, tol);
  double f = expected_value(m, wc.v_bar);

  SolveReport report;
  report.seed = 0;
  report.iterations = iters;
  report.objective_trace.push_back(f);
  report.residual_trace.push_back(0.0);

  AgentPolicy best_pi = pi;
  AdversaryPolicy best_chi = wc.chi;
  double best_f = f;
  long best_it = 0;

  std::vector<double> row;
  for (long it = 1; it <= iters; ++it) {
    const Gradients g = objective_gradients(m, pi, wc.chi);
    double step = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int rho = 0; rho < S; ++rho) {
        row = pi.pi[i][rho];
        for (int a = 0; a < m.num_actions(i); ++a) row[a] += eta * g.d_pi[i][rho][a];
        project_simplex(row);
        normalize_exact(row);
        step = std::max(step, max_abs_delta(row, pi.pi[i][rho]));
        pi.pi[i][rho] = row;
      }
    }
    wc = optimal_adversary(m, pi, tol);
    f = expected_value(m, wc.v_bar);
    report.objective_trace.push_back(f);
    report.residual_trace.push_back(step);
    if (f > best_f) {
      best_f = f;
      best_pi = pi;
      best_chi = wc.chi;
      best_it = it;
    }
  }

  report.pi = best_pi;
  report.chi = best_chi;
  report.final_objective = best_f;
  report.best_iteration = best_it;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

PolicyEnumeration enumerate_deterministic_policies(const SamgModel& m, double tol) {
  const int n = m.agents;
  const int S = m.num_states();

  std::vector<int> radix;
  for (int i = 0; i < n; ++i) {
    for (int rho = 0; rho < S; ++rho) radix.push_back(m.num_actions(i));
  }
  const double total = radix_product(radix);
  if (total > kDeterministicPolicyCap) {
    throw SizeGuardError("deterministic policy count " + fmt17(total) + " exceeds " +
                         fmt17(kDeterministicPolicyCap));
  }

  PolicyEnumeration out;
  out.count = static_cast<long>(total);
  out.values.assign(out.count, 0.0);

  parallel_for(out.count, [&](long index) {
    std::vector<std::vector<int>> choice(n, std::vector<int>(S, 0));
    long rest = index;
    for (int slot = static_cast<int>(radix.size()) - 1; slot >= 0; --slot) {
      choice[slot / S][slot % S] = static_cast<int>(rest % radix[slot]);
      rest /= radix[slot];
    }
    out.values[index] = worst_case_objective(m, deterministic_policy(m, choice), tol);
  });

  long best_at = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (long index = 0; index < out.count; ++index) {
    if (out.values[index] > best) {
      best = out.values[index];
      best_at = index;
    }
  }

  out.best_value = best;
  std::vector<std::vector<int>> choice(n, std::vector<int>(S, 0));
  long rest = best_at;
  for (int slot = static_cast<int>(radix.size()) - 1; slot >= 0; --slot) {
    choice[slot / S][slot % S] = static_cast<int>(rest % radix[slot]);
    rest /= radix[slot];
  }
  out.argmax = deterministic_policy(m, choice);
  return out;
}

}  // namespace samg
