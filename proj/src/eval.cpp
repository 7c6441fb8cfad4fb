#include "samg/eval.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "samg/enumeration.hpp"
#include "samg/numeric.hpp"
#include "samg/parallel.hpp"
#include "samg/rng.hpp"

namespace samg {

namespace {

constexpr double kSolveResidual = 1e-10;
constexpr double kJointEnumerationCap = 1e7;  // per-state |P_s| * |A| budget
constexpr int kDirectSolveLimit = 2000;

void check_dimensions(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  const int S = m.num_states();
  if (static_cast<int>(pi.pi.size()) != m.agents || static_cast<int>(chi.chi.size()) != m.agents) {
    throw ValidationError("dimension mismatch between policies and model");
  }
  for (int i = 0; i < m.agents; ++i) {
    if (static_cast<int>(pi.pi[i].size()) != S || static_cast<int>(chi.chi[i].size()) != S) {
      throw ValidationError("dimension mismatch between policies and model");
    }
    for (int s = 0; s < S; ++s) {
      if (static_cast<int>(pi.pi[i][s].size()) != m.num_actions(i) ||
          static_cast<int>(chi.chi[i][s].size()) != S) {
        throw ValidationError("dimension mismatch between policies and model");
      }
    }
  }
}

void check_valid(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  check_dimensions(m, pi, chi);
  auto bad = validate_agent_policy(m, pi);
  auto more = validate_adversary_policy(m, chi);
  bad.insert(bad.end(), more.begin(), more.end());
  if (!bad.empty()) throw ValidationError(bad.front());
}

void guard_joint_enumeration(const SamgModel& m, int s) {
  std::vector<int> radix;
  for (int i = 0; i < m.agents; ++i) radix.push_back(static_cast<int>(m.perturb[i][s].size()));
  for (int i = 0; i < m.agents; ++i) radix.push_back(m.num_actions(i));
  if (radix_product(radix) > kJointEnumerationCap) {
    throw SizeGuardError("joint perception/action enumeration at state " + m.states[s] +
                         " exceeds " + fmt17(kJointEnumerationCap) + " entries");
  }
}

// Solve V = r + gamma P V by LU when the state set is small and by damped
// sweeps otherwise; either way polish until the Bellman residual clears
// kSolveResidual.
std::vector<double> solve_bellman(const std::vector<std::vector<double>>& P,
                                  const std::vector<double>& r, double gamma, double r_max) {
  const int S = static_cast<int>(r.size());
  std::vector<double> v(S, 0.0);

  if (S <= kDirectSolveLimit) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(S, S);
    Eigen::VectorXd b(S);
    for (int s = 0; s < S; ++s) {
      b(s) = r[s];
      for (int sp = 0; sp < S; ++sp) A(s, sp) -= gamma * P[s][sp];
    }
    Eigen::VectorXd x = A.partialPivLu().solve(b);
    for (int s = 0; s < S; ++s) v[s] = x(s);
  }

  // Iteration cap from the contraction rate; also serves as the polish bound
  // after a direct solve (where one sweep normally suffices).
  long cap = 64;
  if (r_max > 0.0) {
    cap += static_cast<long>(
        std::ceil(std::log(kSolveResidual * (1.0 - gamma) / r_max) / std::log(gamma)));
  }
  std::vector<double> next(S);
  for (long it = 0; it < cap; ++it) {
    double residual = 0.0;
    for (int s = 0; s < S; ++s) {
      double acc = r[s];
      for (int sp = 0; sp < S; ++sp) acc += gamma * P[s][sp] * v[sp];
      next[s] = acc;
      residual = std::max(residual, std::abs(acc - v[s]));
    }
    v.swap(next);
    if (residual <= kSolveResidual) break;
  }
  return v;
}

ValueTable evaluate_impl(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  InducedChain chain = induced_chain(m, pi, chi);
  return solve_bellman(chain.P, chain.r, m.gamma, m.max_abs_reward());
}

}  // namespace

InducedChain induced_chain(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  const int S = m.num_states();
  InducedChain chain;
  chain.P.assign(S, std::vector<double>(S, 0.0));
  chain.r.assign(S, 0.0);

  std::vector<int> a(m.agents), rho_digits(m.agents);
  for (int s = 0; s < S; ++s) {
    guard_joint_enumeration(m, s);
    std::vector<int> rho_radix(m.agents);
    for (int i = 0; i < m.agents; ++i) rho_radix[i] = static_cast<int>(m.perturb[i][s].size());

    std::fill(rho_digits.begin(), rho_digits.end(), 0);
    do {
      double w_chi = 1.0;
      for (int i = 0; i < m.agents; ++i) {
        w_chi *= chi.chi[i][s][m.perturb[i][s][rho_digits[i]]];
      }
      if (w_chi == 0.0) continue;

      std::vector<int> a_radix(m.agents);
      for (int i = 0; i < m.agents; ++i) a_radix[i] = m.num_actions(i);
      std::fill(a.begin(), a.end(), 0);
      do {
        double w = w_chi;
        for (int i = 0; i < m.agents; ++i) {
          w *= pi.pi[i][m.perturb[i][s][rho_digits[i]]][a[i]];
        }
        if (w == 0.0) continue;
        const long ja = m.joint_action_index(a);
        chain.r[s] += w * m.reward[s][ja];
        const auto& row = m.transition[s][ja];
        for (int sp = 0; sp < S; ++sp) chain.P[s][sp] += w * row[sp];
      } while (odometer_next(a, a_radix));
    } while (odometer_next(rho_digits, rho_radix));
  }
  return chain;
}

ValueTable evaluate(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  check_valid(m, pi, chi);
  return evaluate_impl(m, pi, chi);
}

ValueTable evaluate_raw(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  check_dimensions(m, pi, chi);
  return evaluate_impl(m, pi, chi);
}

ValueTable bellman_backup(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi,
                          const ValueTable& v) {
  check_dimensions(m, pi, chi);
  InducedChain chain = induced_chain(m, pi, chi);
  const int S = m.num_states();
  ValueTable out(S, 0.0);
  for (int s = 0; s < S; ++s) {
    double acc = chain.r[s];
    for (int sp = 0; sp < S; ++sp) acc += m.gamma * chain.P[s][sp] * v[sp];
    out[s] = acc;
  }
  return out;
}

double expected_value(const SamgModel& m, const ValueTable& v) {
  double acc = 0.0;
  for (int s = 0; s < m.num_states(); ++s) acc += m.init[s] * v[s];
  return acc;
}

ValueTable occupancy(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi) {
  check_valid(m, pi, chi);
  InducedChain chain = induced_chain(m, pi, chi);
  const int S = m.num_states();

  // d = init + gamma P^T d is the same solve with the chain transposed and a
  // mass bound of 1/(1-gamma) in place of the reward scale.
  std::vector<std::vector<double>> Pt(S, std::vector<double>(S));
  for (int s = 0; s < S; ++s) {
    for (int sp = 0; sp < S; ++sp) Pt[s][sp] = chain.P[sp][s];
  }
  return solve_bellman(Pt, m.init, m.gamma, 1.0);
}

std::vector<std::vector<double>> q_from_v(const SamgModel& m, const ValueTable& v) {
  const int S = m.num_states();
  const long JA = m.num_joint_actions();
  std::vector<std::vector<double>> q(S, std::vector<double>(JA, 0.0));
  for (int s = 0; s < S; ++s) {
    for (long ja = 0; ja < JA; ++ja) {
      double acc = m.reward[s][ja];
      const auto& row = m.transition[s][ja];
      for (int sp = 0; sp < S; ++sp) acc += m.gamma * row[sp] * v[sp];
      q[s][ja] = acc;
    }
  }
  return q;
}

SimulationResult simulate(const SamgModel& m, const AgentPolicy& pi, const AdversaryPolicy& chi,
                          long episodes, long horizon, std::uint64_t seed) {
  check_valid(m, pi, chi);
  if (episodes < 1 || horizon < 1) {
    throw ValidationError("simulate needs at least one episode and one step");
  }

  std::vector<double> returns(episodes, 0.0);
  parallel_for(episodes, [&](long e) {
    Rng rng = episode_rng(seed, static_cast<std::uint64_t>(e));
    int s = rng.categorical(m.init);
    double discount = 1.0;
    double acc = 0.0;
    std::vector<int> a(m.agents);
    for (long t = 0; t < horizon; ++t) {
      for (int i = 0; i < m.agents; ++i) {
        int rho = rng.categorical(chi.chi[i][s]);
        a[i] = rng.categorical(pi.pi[i][rho]);
      }
      const long ja = m.joint_action_index(a);
      acc += discount * m.reward[s][ja];
      discount *= m.gamma;
      s = rng.categorical(m.transition[s][ja]);
    }
    returns[e] = acc;
  });

  SimulationResult res;
  res.episodes = episodes;
  res.horizon = horizon;
  double mean = 0.0;
  for (double x : returns) mean += x;
  mean /= static_cast<double>(episodes);
  res.mean = mean;
  if (episodes > 1) {
    double ss = 0.0;
    for (double x : returns) ss += (x - mean) * (x - mean);
    res.standard_error = std::sqrt(ss / (static_cast<double>(episodes - 1))) /
                         std::sqrt(static_cast<double>(episodes));
  }
  return res;
}

}  // namespace samg
