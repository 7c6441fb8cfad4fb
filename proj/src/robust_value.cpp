#include "samg/robust_value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "samg/enumeration.hpp"
#include "samg/eval.hpp"
#include "samg/numeric.hpp"

namespace samg {

namespace {

constexpr double kJointEnumerationCap = 1e7;

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

}  // namespace

StagePayoff stage_payoff_from_q(const SamgModel& m, int agent, int s, const std::vector<double>& q_row,
                         const AgentPolicy& pi, const AdversaryPolicy& chi) {
  const int n = m.agents;
  StagePayoff out;
  out.agent = agent;
  out.state = s;
  out.rho_set = m.perturb[agent][s];
  const int A = m.num_actions(agent);
  out.g.assign(out.rho_set.size(), std::vector<double>(A, 0.0));

  std::vector<int> rho_radix(n), a_radix(n);
  for (int i = 0; i < n; ++i) {
    rho_radix[i] = static_cast<int>(m.perturb[i][s].size());
    a_radix[i] = m.num_actions(i);
  }
  if (radix_product(rho_radix) * radix_product(a_radix) > kJointEnumerationCap) {
    throw SizeGuardError("stage payoff enumeration at state " + m.states[s] + " exceeds " +
                         fmt17(kJointEnumerationCap) + " entries");
  }

  // Enumerate full joint (perception, action) combinations; the weight for
  // the anchored agent is left out so its own coordinates index the table.
  std::vector<int> rho_digits(n, 0), a(n);
  do {
    double w_chi = 1.0;
    for (int i = 0; i < n; ++i) {
      if (i == agent) continue;
      w_chi *= chi.chi[i][s][m.perturb[i][s][rho_digits[i]]];
    }
    if (w_chi == 0.0) continue;

    std::fill(a.begin(), a.end(), 0);
    do {
      double w = w_chi;
      for (int i = 0; i < n; ++i) {
        if (i == agent) continue;
        w *= pi.pi[i][m.perturb[i][s][rho_digits[i]]][a[i]];
      }
      if (w == 0.0) continue;
      out.g[rho_digits[agent]][a[agent]] += w * q_row[m.joint_action_index(a)];
    } while (odometer_next(a, a_radix));
  } while (odometer_next(rho_digits, rho_radix));

  return out;
}

StagePayoff stage_payoff(const SamgModel& m, int agent, int s, const ValueTable& v,
                         const AgentPolicy& pi, const AdversaryPolicy& chi) {
  return stage_payoff_from_q(m, agent, s, q_row_for_state(m, s, v), pi, chi);
}

StageDecision stage_maximin(const StagePayoff& payoff) {
  StageDecision d;
  const int R = static_cast<int>(payoff.rho_set.size());
  d.action_per_rho.assign(R, 0);
  double worst = std::numeric_limits<double>::infinity();
  d.worst_rho = 0;
  for (int k = 0; k < R; ++k) {
    const auto& row = payoff.g[k];
    int best_a = 0;
    for (int a = 1; a < static_cast<int>(row.size()); ++a) {
      if (row[a] > row[best_a]) best_a = a;
    }
    d.action_per_rho[k] = best_a;
    if (row[best_a] < worst) {
      worst = row[best_a];
      d.worst_rho = k;
    }
  }
  d.value = worst;
  return d;
}

ValueTable robust_operator(const SamgModel& m, int agent, const AgentPolicy& pi,
                           const AdversaryPolicy& chi, const ValueTable& v) {
  const int S = m.num_states();
  ValueTable out(S, 0.0);
  for (int s = 0; s < S; ++s) {
    out[s] = stage_maximin(stage_payoff_from_q(m, agent, s, q_row_for_state(m, s, v), pi, chi)).value;
  }
  return out;
}

RobustFixedPoint robust_fixed_point(const SamgModel& m, int agent, const AgentPolicy& pi,
                                    const AdversaryPolicy& chi, double tol) {
  if (!(tol > 0.0)) throw ValidationError("robust_fixed_point needs a positive tolerance");
  const int S = m.num_states();
  const double gamma = m.gamma;
  const double threshold = tol * (1.0 - gamma) / (2.0 * gamma);

  const double r_max = m.max_abs_reward();
  long cap = 64;
  if (r_max > threshold) {
    cap += static_cast<long>(std::ceil(std::log(threshold / r_max) / std::log(gamma)));
  }

  RobustFixedPoint fp;
  fp.v.assign(S, 0.0);
  fp.greedy.assign(S, StageDecision{});
  ValueTable next(S, 0.0);

  for (long it = 0; it < cap; ++it) {
    double residual = 0.0;
    for (int s = 0; s < S; ++s) {
      StageDecision d = stage_maximin(stage_payoff(m, agent, s, fp.v, pi, chi));
      next[s] = d.value;
      fp.greedy[s] = std::move(d);
      residual = std::max(residual, std::abs(next[s] - fp.v[s]));
    }
    fp.v.swap(next);
    fp.iterations = it + 1;
    fp.residual = residual;
    if (residual <= threshold) break;
  }
  return fp;
}

}  // namespace samg
