#include "samg/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "samg/enumeration.hpp"
#include "samg/eval.hpp"
#include "samg/numeric.hpp"
#include "samg/parallel.hpp"

namespace samg {

namespace {

constexpr double kPerStatePerceptionCap = 1e6;
constexpr double kDeterministicAdversaryCap = 1e6;

}  // namespace

AdversaryMdp build_adversary_mdp(const SamgModel& m, const AgentPolicy& pi) {
  {
    auto bad = validate_agent_policy(m, pi);
    if (!bad.empty()) throw ValidationError(bad.front());
  }
  const int S = m.num_states();
  AdversaryMdp mdp;
  mdp.gamma = m.gamma;
  mdp.actions.resize(S);
  mdp.reward.resize(S);
  mdp.transition.resize(S);

  std::vector<int> digits(m.agents), a(m.agents), a_radix(m.agents);
  for (int i = 0; i < m.agents; ++i) a_radix[i] = m.num_actions(i);

  for (int s = 0; s < S; ++s) {
    std::vector<int> radix(m.agents);
    for (int i = 0; i < m.agents; ++i) radix[i] = static_cast<int>(m.perturb[i][s].size());
    if (radix_product(radix) > kPerStatePerceptionCap) {
      throw SizeGuardError("joint perception enumeration at state " + m.states[s] + " exceeds " +
                           fmt17(kPerStatePerceptionCap) + " entries");
    }

    std::fill(digits.begin(), digits.end(), 0);
    do {
      std::vector<int> shown(m.agents);
      for (int i = 0; i < m.agents; ++i) shown[i] = m.perturb[i][s][digits[i]];

      // Marginalize the agents' action lottery under this perception.
      double r_hat = 0.0;
      std::vector<double> row(S, 0.0);
      std::fill(a.begin(), a.end(), 0);
      do {
        double w = 1.0;
        for (int i = 0; i < m.agents; ++i) w *= pi.pi[i][shown[i]][a[i]];
        if (w == 0.0) continue;
        const long ja = m.joint_action_index(a);
        r_hat -= w * m.reward[s][ja];
        const auto& p = m.transition[s][ja];
        for (int sp = 0; sp < S; ++sp) row[sp] += w * p[sp];
      } while (odometer_next(a, a_radix));

      mdp.actions[s].push_back(std::move(shown));
      mdp.reward[s].push_back(r_hat);
      mdp.transition[s].push_back(std::move(row));
    } while (odometer_next(digits, radix));
  }
  return mdp;
}

MdpSolution solve_mdp(const AdversaryMdp& mdp, double tol) {
  if (!(tol > 0.0)) throw ValidationError("solve_mdp needs a positive tolerance");
  const int S = mdp.num_states();
  const double gamma = mdp.gamma;
  const double threshold = tol * (1.0 - gamma) / (2.0 * gamma);

  double r_max = 0.0;
  for (const auto& row : mdp.reward) {
    for (double r : row) r_max = std::max(r_max, std::abs(r));
  }
  long cap = 64;
  if (r_max > threshold) {
    cap += static_cast<long>(std::ceil(std::log(threshold / r_max) / std::log(gamma)));
  }

  MdpSolution sol;
  sol.v.assign(S, 0.0);
  sol.greedy.assign(S, 0);
  ValueTable next(S, 0.0);

  for (long it = 0; it < cap; ++it) {
    double residual = 0.0;
    for (int s = 0; s < S; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_k = 0;
      const int K = static_cast<int>(mdp.actions[s].size());
      for (int k = 0; k < K; ++k) {
        double acc = mdp.reward[s][k];
        const auto& row = mdp.transition[s][k];
        for (int sp = 0; sp < S; ++sp) acc += gamma * row[sp] * sol.v[sp];
        if (acc > best) {
          best = acc;
          best_k = k;
        }
      }
      next[s] = best;
      sol.greedy[s] = best_k;
      residual = std::max(residual, std::abs(best - sol.v[s]));
    }
    sol.v.swap(next);
    sol.iterations = it + 1;
    sol.residual = residual;
    if (residual <= threshold) break;
  }
  return sol;
}

WorstCase optimal_adversary(const SamgModel& m, const AgentPolicy& pi, double tol) {
  AdversaryMdp mdp = build_adversary_mdp(m, pi);
  MdpSolution sol = solve_mdp(mdp, tol);

  const int S = m.num_states();
  WorstCase wc;
  wc.iterations = sol.iterations;
  wc.residual = sol.residual;
  wc.v_bar.assign(S, 0.0);
  for (int s = 0; s < S; ++s) wc.v_bar[s] = -sol.v[s];

  std::vector<std::vector<int>> shown(m.agents, std::vector<int>(S, 0));
  for (int s = 0; s < S; ++s) {
    const auto& joint = mdp.actions[s][sol.greedy[s]];
    for (int i = 0; i < m.agents; ++i) shown[i][s] = joint[i];
  }
  wc.chi = deterministic_adversary(m, shown);
  return wc;
}

AdversaryEnumeration enumerate_deterministic_adversaries(const SamgModel& m,
                                                         const AgentPolicy& pi) {
  {
    auto bad = validate_agent_policy(m, pi);
    if (!bad.empty()) throw ValidationError(bad.front());
  }
  const int S = m.num_states();

  // One slot per (agent, state), agent-major; each slot picks an admissible
  // perceived state.
  std::vector<int> radix;
  radix.reserve(static_cast<std::size_t>(m.agents) * S);
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < S; ++s) radix.push_back(static_cast<int>(m.perturb[i][s].size()));
  }
  const double total = radix_product(radix);
  if (total > kDeterministicAdversaryCap) {
    throw SizeGuardError("deterministic adversary enumeration of " + fmt17(total) +
                         " candidates exceeds " + fmt17(kDeterministicAdversaryCap));
  }
  const long count = static_cast<long>(total);

  std::vector<ValueTable> values(count);
  parallel_for(count, [&](long index) {
    std::vector<int> digits(radix.size());
    long rest = index;
    for (int k = static_cast<int>(radix.size()) - 1; k >= 0; --k) {
      digits[k] = static_cast<int>(rest % radix[k]);
      rest /= radix[k];
    }
    std::vector<std::vector<int>> shown(m.agents, std::vector<int>(S));
    for (int i = 0; i < m.agents; ++i) {
      for (int s = 0; s < S; ++s) shown[i][s] = m.perturb[i][s][digits[i * S + s]];
    }
    values[index] = evaluate(m, pi, deterministic_adversary(m, shown));
  });

  AdversaryEnumeration out;
  out.count = count;
  out.pointwise_min.assign(S, std::numeric_limits<double>::infinity());
  for (long c = 0; c < count; ++c) {
    for (int s = 0; s < S; ++s) out.pointwise_min[s] = std::min(out.pointwise_min[s], values[c][s]);
  }

  // Prefer a single adversary matching the pointwise minimum everywhere;
  // fall back to the lowest expected value. Enumeration order breaks ties.
  long simultaneous_at = -1;
  long best_at = 0;
  double best_expected = std::numeric_limits<double>::infinity();
  for (long c = 0; c < count; ++c) {
    bool everywhere = true;
    for (int s = 0; s < S; ++s) {
      if (values[c][s] > out.pointwise_min[s]) {
        everywhere = false;
        break;
      }
    }
    if (everywhere && simultaneous_at < 0) simultaneous_at = c;
    double expected = expected_value(m, values[c]);
    if (expected < best_expected) {
      best_expected = expected;
      best_at = c;
    }
  }
  out.simultaneous = simultaneous_at >= 0;
  const long pick = out.simultaneous ? simultaneous_at : best_at;

  std::vector<int> digits(radix.size());
  long rest = pick;
  for (int k = static_cast<int>(radix.size()) - 1; k >= 0; --k) {
    digits[k] = static_cast<int>(rest % radix[k]);
    rest /= radix[k];
  }
  std::vector<std::vector<int>> shown(m.agents, std::vector<int>(S));
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < S; ++s) shown[i][s] = m.perturb[i][s][digits[i * S + s]];
  }
  out.minimizer = deterministic_adversary(m, shown);
  return out;
}

}  // namespace samg
