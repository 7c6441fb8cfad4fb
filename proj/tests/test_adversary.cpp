#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "samg/adversary.hpp"
#include "samg/eval.hpp"
#include "samg/model.hpp"

using namespace samg;

TEST_SUITE("adversary") {

TEST_CASE("adversary mdp tables on fig4 by hand") {
  const SamgModel m = builtin_game("fig4");

  SUBCASE("deterministic coordination play") {
    const AgentPolicy pi = deterministic_policy(m, {{0, 0}, {0, 1}});
    const AdversaryMdp mdp = build_adversary_mdp(m, pi);
    CHECK(mdp.gamma == m.gamma);
    REQUIRE(mdp.num_states() == 2);
    // both adversaries choose between two perceptions: 2 x 2 joint options
    REQUIRE(mdp.actions[0].size() == 4);
    REQUIRE(mdp.actions[1].size() == 4);
    CHECK(mdp.actions[0][0] == std::vector<int>{0, 0});
    CHECK(mdp.actions[0][1] == std::vector<int>{0, 1});
    CHECK(mdp.actions[0][2] == std::vector<int>{1, 0});
    CHECK(mdp.actions[0][3] == std::vector<int>{1, 1});

    // at s1, showing (s1, s1) makes the agents play (a1, a1): reward 1, so
    // the adversary books -1 and the chain moves to s2
    CHECK(mdp.reward[0][0] == doctest::Approx(-1.0));
    CHECK(mdp.transition[0][0][1] == doctest::Approx(1.0));
    // showing agent 2 the other state at s1 splits their actions: reward 0,
    // and the mismatch keeps the chain at s1
    CHECK(mdp.reward[0][1] == doctest::Approx(0.0));
    CHECK(mdp.transition[0][1][0] == doctest::Approx(1.0));
    // at s2, honest perceptions (s2, s2) produce (a1, a2): agent reward 1
    CHECK(mdp.reward[1][3] == doctest::Approx(-1.0));
    CHECK(mdp.transition[1][3][1] == doctest::Approx(1.0));
    // showing both s1 at s2 produces (a1, a1): reward 0, chain moves to s1
    CHECK(mdp.reward[1][0] == doctest::Approx(0.0));
    CHECK(mdp.transition[1][0][0] == doctest::Approx(1.0));
  }

  SUBCASE("stochastic play marginalizes the action lottery") {
    AgentPolicy pi = uniform_policy(m);
    pi.pi[0][0] = {0.25, 0.75};  // agent 1 seeing s1
    const AdversaryMdp mdp = build_adversary_mdp(m, pi);
    // at s1 with perceptions (s1, s1): agent 2 mixes evenly, so the match
    // probability is 0.25 * 0.5 + 0.75 * 0.5 = 0.5 whatever agent 1 leans
    CHECK(mdp.reward[0][0] == doctest::Approx(-0.5));
    CHECK(mdp.transition[0][0][1] == doctest::Approx(0.5));
    CHECK(mdp.transition[0][0][0] == doctest::Approx(0.5));
  }
}

TEST_CASE("perception options follow the admissible sets") {
  const SamgModel m = random_game(9, 2, 4, 2, 2);
  const AdversaryMdp mdp = build_adversary_mdp(m, uniform_policy(m));
  for (int s = 0; s < m.num_states(); ++s) {
    std::size_t expect = 1;
    for (int i = 0; i < m.agents; ++i) expect *= m.perturb[i][s].size();
    CHECK(mdp.actions[s].size() == expect);
    for (const auto& joint : mdp.actions[s]) {
      for (int i = 0; i < m.agents; ++i) {
        const auto& set = m.perturb[i][s];
        CHECK(std::find(set.begin(), set.end(), joint[i]) != set.end());
      }
    }
  }
}

TEST_CASE("solve_mdp pins the always-differ worst case on fig4") {
  const SamgModel m = builtin_game("fig4");
  // agent 1 plays a1 everywhere, agent 2 plays a2 everywhere: perceptions
  // change nothing, so the adversary inherits the fixed chain
  const AgentPolicy differ = deterministic_policy(m, {{0, 0}, {1, 1}});
  const MdpSolution sol = solve_mdp(build_adversary_mdp(m, differ), 1e-8);
  CHECK(sol.v[0] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(sol.v[1] == doctest::Approx(-100.0).epsilon(1e-6));
  CHECK(sol.iterations > 0);
  CHECK(sol.residual <= 1e-8 * (1.0 - m.gamma) / (2.0 * m.gamma));
}

TEST_CASE("optimal_adversary collapses coordination play to zero") {
  const SamgModel m = builtin_game("fig4");
  const AgentPolicy pi = deterministic_policy(m, {{0, 0}, {0, 1}});
  const WorstCase wc = optimal_adversary(m, pi, 1e-8);
  CHECK(wc.v_bar[0] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(wc.v_bar[1] == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(validate_adversary_policy(m, wc.chi).empty());

  // the returned adversary is deterministic and achieves what it promises
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < m.num_states(); ++s) {
      double top = *std::max_element(wc.chi.chi[i][s].begin(), wc.chi.chi[i][s].end());
      CHECK(top == 1.0);
    }
  }
  const ValueTable replay = evaluate(m, pi, wc.chi);
  CHECK(replay[0] == doctest::Approx(wc.v_bar[0]).epsilon(1e-6));
  CHECK(replay[1] == doctest::Approx(wc.v_bar[1]).epsilon(1e-6));
}

TEST_CASE("worst case lower-bounds every concrete adversary") {
  const SamgModel m = builtin_game("fig4");
  const AgentPolicy pi = uniform_policy(m);
  const WorstCase wc = optimal_adversary(m, pi, 1e-10);
  for (const AdversaryPolicy& chi :
       {identity_adversary(m), uniform_adversary(m),
        deterministic_adversary(m, {{1, 0}, {1, 0}})}) {
    const ValueTable v = evaluate(m, pi, chi);
    for (int s = 0; s < m.num_states(); ++s) {
      CHECK(wc.v_bar[s] <= v[s] + 1e-8);
    }
  }
}

TEST_CASE("enumeration agrees with the planner") {
  const SamgModel m = builtin_game("fig4");
  SUBCASE("coordination play") {
    const AgentPolicy pi = deterministic_policy(m, {{0, 0}, {0, 1}});
    const AdversaryEnumeration e = enumerate_deterministic_adversaries(m, pi);
    CHECK(e.count == 16);
    const WorstCase wc = optimal_adversary(m, pi, 1e-10);
    for (int s = 0; s < m.num_states(); ++s) {
      CHECK(e.pointwise_min[s] == doctest::Approx(wc.v_bar[s]).epsilon(1e-6));
    }
    const ValueTable direct = evaluate(m, pi, e.minimizer);
    if (e.simultaneous) {
      for (int s = 0; s < m.num_states(); ++s) {
        CHECK(direct[s] == doctest::Approx(e.pointwise_min[s]).epsilon(1e-9));
      }
    }
  }
  SUBCASE("random stochastic play") {
    const SamgModel g = random_game(17, 2, 3, 2, 2);
    const AgentPolicy pi = uniform_policy(g);
    const AdversaryEnumeration e = enumerate_deterministic_adversaries(g, pi);
    CHECK(e.count == 64);  // (2 choices per state)^3 states, per agent
    const WorstCase wc = optimal_adversary(g, pi, 1e-10);
    for (int s = 0; s < g.num_states(); ++s) {
      CHECK(e.pointwise_min[s] == doctest::Approx(wc.v_bar[s]).epsilon(1e-6));
    }
  }
}

TEST_CASE("greedy ties resolve to the lowest action index") {
  const SamgModel m = builtin_game("fig4");
  // uniform play makes every perception equally harmful, so all adversary
  // actions tie and the greedy pick must be action 0 everywhere
  const MdpSolution sol = solve_mdp(build_adversary_mdp(m, uniform_policy(m)), 1e-8);
  CHECK(sol.greedy[0] == 0);
  CHECK(sol.greedy[1] == 0);

  const WorstCase wc = optimal_adversary(m, uniform_policy(m), 1e-8);
  for (int i = 0; i < m.agents; ++i) {
    // joint perception 0 is (s1, s1) at s1 and (s1, s1) at s2... the first
    // admissible entry for each agent, which is state s1 in both cases
    CHECK(wc.chi.chi[i][0][0] == 1.0);
    CHECK(wc.chi.chi[i][1][0] == 1.0);
  }
}

TEST_CASE("identity perturbation sets leave the adversary powerless") {
  SamgModel m = builtin_game("fig4");
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < m.num_states(); ++s) m.perturb[i][s] = {s};
  }
  const AgentPolicy pi = deterministic_policy(m, {{0, 0}, {0, 1}});
  const WorstCase wc = optimal_adversary(m, pi, 1e-8);
  const ValueTable honest = evaluate(m, pi, identity_adversary(m));
  for (int s = 0; s < m.num_states(); ++s) {
    CHECK(wc.v_bar[s] == doctest::Approx(honest[s]).epsilon(1e-6));
  }
  const AdversaryEnumeration e = enumerate_deterministic_adversaries(m, pi);
  CHECK(e.count == 1);
  CHECK(e.simultaneous);
}

TEST_CASE("deterministic enumeration refuses oversized products") {
  // 2 agents x 10 states x 2 admissible choices: 2^20 adversaries
  const SamgModel m = random_game(23, 2, 10, 2, 2);
  CHECK_THROWS_AS(enumerate_deterministic_adversaries(m, uniform_policy(m)), SizeGuardError);
}

}  // TEST_SUITE
