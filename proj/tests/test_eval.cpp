#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "samg/eval.hpp"
#include "samg/model.hpp"

using namespace samg;

namespace {

// the pair of policies that keeps fig4 paying out forever
AgentPolicy coordination_policy(const SamgModel& m) {
  return deterministic_policy(m, {{0, 0}, {0, 1}});
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("fig4 closed-form values") {
  const SamgModel m = builtin_game("fig4");
  const double g = m.gamma;

  SUBCASE("coordination against the honest adversary earns 1 every step") {
    const ValueTable v = evaluate(m, coordination_policy(m), identity_adversary(m));
    CHECK(v[0] == doctest::Approx(1.0 / (1.0 - g)).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(1.0 / (1.0 - g)).epsilon(1e-12));
  }

  SUBCASE("swapping both agents' perceptions starves the same policy") {
    const AdversaryPolicy swap = deterministic_adversary(m, {{1, 0}, {1, 0}});
    const ValueTable v = evaluate(m, coordination_policy(m), swap);
    CHECK(v[0] == doctest::Approx(0.0));
    CHECK(v[1] == doctest::Approx(0.0));
  }

  SUBCASE("playing a1 everywhere alternates pay and wait") {
    const AgentPolicy same = deterministic_policy(m, {{0, 0}, {0, 0}});
    const ValueTable v = evaluate(m, same, identity_adversary(m));
    CHECK(v[0] == doctest::Approx(1.0 / (1.0 - g * g)).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(g / (1.0 - g * g)).epsilon(1e-12));
  }

  SUBCASE("the uniform policy earns half the stream whatever the adversary does") {
    const AgentPolicy u = uniform_policy(m);
    for (const AdversaryPolicy& chi :
         {identity_adversary(m), uniform_adversary(m),
          deterministic_adversary(m, {{1, 0}, {0, 1}})}) {
      const ValueTable v = evaluate(m, u, chi);
      CHECK(v[0] == doctest::Approx(0.5 / (1.0 - g)).epsilon(1e-10));
      CHECK(v[1] == doctest::Approx(0.5 / (1.0 - g)).epsilon(1e-10));
    }
  }
}

TEST_CASE("induced chain matches an independent fold") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const SamgModel m = random_game(seed, 2, 4, 3, 2);
    const AgentPolicy pi = uniform_policy(m);
    const AdversaryPolicy chi = uniform_adversary(m);
    const InducedChain got = induced_chain(m, pi, chi);
    const oracles::Chain want = oracles::chain(m, pi, chi);
    for (int s = 0; s < m.num_states(); ++s) {
      CHECK(got.r[s] == doctest::Approx(want.r[s]).epsilon(1e-14));
      for (int t = 0; t < m.num_states(); ++t) {
        CHECK(got.P[s][t] == doctest::Approx(want.P[s][t]).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("evaluate matches slow value iteration on random games") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const SamgModel m = random_game(seed, 3, 5, 2, 2);
    const AgentPolicy pi = uniform_policy(m);
    const AdversaryPolicy chi = uniform_adversary(m);
    const ValueTable fast = evaluate(m, pi, chi);
    const ValueTable slow = oracles::value(m, pi, chi);
    for (int s = 0; s < m.num_states(); ++s) {
      CHECK(fast[s] == doctest::Approx(slow[s]).epsilon(1e-9));
    }
  }
}

TEST_CASE("evaluate output is a Bellman fixed point") {
  const SamgModel m = random_game(21, 2, 6, 2, 3);
  const AgentPolicy pi = uniform_policy(m);
  const AdversaryPolicy chi = uniform_adversary(m);
  const ValueTable v = evaluate(m, pi, chi);
  const ValueTable w = bellman_backup(m, pi, chi, v);
  for (int s = 0; s < m.num_states(); ++s) {
    CHECK(std::abs(w[s] - v[s]) <= 1e-9);
  }
}

TEST_CASE("bellman backup is affine in the input table") {
  const SamgModel m = builtin_game("fig4");
  const AgentPolicy pi = uniform_policy(m);
  const AdversaryPolicy chi = identity_adversary(m);
  const ValueTable zero_in(m.num_states(), 0.0);
  const ValueTable base = bellman_backup(m, pi, chi, zero_in);
  const ValueTable ones = bellman_backup(m, pi, chi, ValueTable(m.num_states(), 1.0));
  for (int s = 0; s < m.num_states(); ++s) {
    // adding a constant c to v adds gamma * c to the backup
    CHECK(ones[s] == doctest::Approx(base[s] + m.gamma).epsilon(1e-14));
  }
}

TEST_CASE("expected_value dots the start distribution") {
  SamgModel m = builtin_game("fig4");
  CHECK(expected_value(m, {10.0, 30.0}) == doctest::Approx(20.0));
  m.init = {0.0, 1.0};
  CHECK(expected_value(m, {10.0, 30.0}) == doctest::Approx(30.0));
}

TEST_CASE("occupancy solves its defining equation") {
  for (std::uint64_t seed : {31u, 32u}) {
    const SamgModel m = random_game(seed, 2, 5, 2, 2);
    const AgentPolicy pi = uniform_policy(m);
    const AdversaryPolicy chi = uniform_adversary(m);
    const ValueTable d = occupancy(m, pi, chi);
    const InducedChain c = induced_chain(m, pi, chi);

    double mass = 0.0;
    for (int s = 0; s < m.num_states(); ++s) {
      double rhs = m.init[s];
      for (int t = 0; t < m.num_states(); ++t) rhs += m.gamma * c.P[t][s] * d[t];
      CHECK(d[s] == doctest::Approx(rhs).epsilon(1e-10));
      CHECK(d[s] >= 0.0);
      mass += d[s];
    }
    CHECK(mass == doctest::Approx(1.0 / (1.0 - m.gamma)).epsilon(1e-10));

    // occupancy-weighted reward equals the start-state objective
    double by_occupancy = 0.0;
    for (int s = 0; s < m.num_states(); ++s) by_occupancy += d[s] * c.r[s];
    CHECK(by_occupancy == doctest::Approx(expected_value(m, evaluate(m, pi, chi))).epsilon(1e-9));
  }
}

TEST_CASE("q_from_v expands one lookahead step") {
  const SamgModel m = builtin_game("fig4");
  const ValueTable v = {2.0, 5.0};
  const auto q = q_from_v(m, v);
  const long same = m.joint_action_index({0, 0});
  const long diff = m.joint_action_index({0, 1});
  CHECK(q[0][same] == doctest::Approx(1.0 + m.gamma * 5.0));
  CHECK(q[0][diff] == doctest::Approx(0.0 + m.gamma * 2.0));
  CHECK(q[1][diff] == doctest::Approx(1.0 + m.gamma * 5.0));
  CHECK(q[1][same] == doctest::Approx(0.0 + m.gamma * 2.0));
}

TEST_CASE("evaluate validates its inputs") {
  const SamgModel m = builtin_game("fig4");
  AgentPolicy pi = uniform_policy(m);
  pi.pi[0][1] = {0.9, 0.2};
  CHECK_THROWS_AS(evaluate(m, pi, identity_adversary(m)), ValidationError);

  AgentPolicy short_pi = uniform_policy(m);
  short_pi.pi.pop_back();
  CHECK_THROWS_AS(evaluate(m, short_pi, identity_adversary(m)), ValidationError);

  AdversaryPolicy chi = identity_adversary(m);
  chi.chi[1][0] = {0.5, 0.6};
  CHECK_THROWS_AS(evaluate(m, uniform_policy(m), chi), ValidationError);

  // evaluate_raw exists precisely to skip those checks
  CHECK_NOTHROW(evaluate_raw(m, pi, identity_adversary(m)));
}

TEST_CASE("simulate is deterministic in the seed") {
  const SamgModel m = builtin_game("fig4");
  const AgentPolicy pi = uniform_policy(m);
  const AdversaryPolicy chi = uniform_adversary(m);
  const SimulationResult a = simulate(m, pi, chi, 200, 50, 7);
  const SimulationResult b = simulate(m, pi, chi, 200, 50, 7);
  CHECK(a.mean == b.mean);
  CHECK(a.standard_error == b.standard_error);
  CHECK(a.episodes == 200);
  CHECK(a.horizon == 50);
  const SimulationResult c = simulate(m, pi, chi, 200, 50, 8);
  CHECK(a.mean != c.mean);
}

TEST_CASE("simulate reproduces a deterministic trajectory exactly") {
  // coordination play under the honest adversary has no randomness beyond the
  // start state, and both start states pay 1 every step
  const SamgModel m = builtin_game("fig4");
  const long horizon = 40;
  double truncated = 0.0;
  for (long t = 0; t < horizon; ++t) truncated += std::pow(m.gamma, double(t));
  const SimulationResult r =
      simulate(m, coordination_policy(m), identity_adversary(m), 50, horizon, 3);
  CHECK(r.mean == doctest::Approx(truncated).epsilon(1e-9));
  CHECK(r.standard_error <= 1e-12);
}

TEST_CASE("simulate agrees with evaluate within sampling error") {
  const SamgModel m = builtin_game("fig4");
  const AgentPolicy pi = uniform_policy(m);
  const AdversaryPolicy chi = uniform_adversary(m);
  const double exact = expected_value(m, evaluate(m, pi, chi));
  const long horizon = 2000;
  const SimulationResult r = simulate(m, pi, chi, 4000, horizon, 5);
  const double tail = std::pow(m.gamma, double(horizon)) * m.max_abs_reward() / (1.0 - m.gamma);
  CHECK(std::abs(r.mean - exact) <= 4.0 * r.standard_error + tail + 1e-9);
  CHECK(r.standard_error > 0.0);
}

}  // TEST_SUITE
