#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "samg/equilibrium.hpp"
#include "samg/eval.hpp"
#include "samg/model.hpp"
#include "samg/robust_value.hpp"

using namespace samg;

namespace {

// one state, two agents, reward 1 when the actions agree, untouchable
// perceptions: the textbook case where a pure equilibrium exists
SamgModel matching_game() {
  return parse_model(R"(samg 1
agents 2
states only
actions 1 heads tails
actions 2 heads tails
gamma 0.9
transition only heads heads only 1
transition only heads tails only 1
transition only tails heads only 1
transition only tails tails only 1
reward only heads heads 1
reward only tails tails 1
)");
}

// decode an agent's pure stage action into one action per admissible
// perceived state, first perceived state most significant
std::vector<int> decode_pure(long b, int rho_count, int num_actions) {
  std::vector<int> out(rho_count);
  for (int k = rho_count - 1; k >= 0; --k) {
    out[k] = static_cast<int>(b % num_actions);
    b /= num_actions;
  }
  return out;
}

}  // namespace

TEST_SUITE("equilibrium") {

TEST_CASE("stage games expose the right pure action spaces") {
  const SamgModel m = builtin_game("fig4");
  const std::vector<ValueTable> anchors = {ValueTable(2, 0.0), ValueTable(2, 0.0)};
  const StageGame g = build_stage_game(m, 0, anchors);
  CHECK(g.state == 0);
  CHECK(g.agents == 2);
  REQUIRE(g.rho_sets.size() == 2);
  CHECK(g.rho_sets[0] == std::vector<int>{0, 1});
  CHECK(g.agent_pure_counts == std::vector<long>{4, 4});

  // anchored lookahead rows follow the one-step expansion
  const auto q = q_from_v(m, anchors[0]);
  for (long ja = 0; ja < m.num_joint_actions(); ++ja) {
    CHECK(g.agent_q[0][ja] == doctest::Approx(q[0][ja]).epsilon(1e-13));
  }
}

TEST_CASE("stage game construction rejects oversized pure action spaces") {
  // one agent, 13 fully perturbable states, 2 actions: 2^13 pure actions
  const SamgModel m = random_game(7, 1, 13, 2, 13);
  const std::vector<ValueTable> anchors = {ValueTable(13, 0.0)};
  CHECK_THROWS_AS(build_stage_game(m, 0, anchors), SizeGuardError);
}

TEST_CASE("context anchors are the per-agent robust fixed points") {
  const SamgModel m = builtin_game("fig4");
  const AgentPolicy pi = uniform_policy(m);
  const AdversaryPolicy chi = identity_adversary(m);
  const StageGame g = build_stage_game(m, 1, pi, chi, 1e-9);
  for (int i = 0; i < m.agents; ++i) {
    const RobustFixedPoint fp = robust_fixed_point(m, i, pi, chi, 1e-9);
    for (int s = 0; s < m.num_states(); ++s) {
      CHECK(g.anchor[i][s] == doctest::Approx(fp.v[s]).epsilon(1e-9));
    }
  }
}

TEST_CASE("embedding behavioral play is the product construction") {
  const SamgModel m = builtin_game("fig4");
  const std::vector<ValueTable> anchors = {ValueTable(2, 0.0), ValueTable(2, 0.0)};
  const StageGame g = build_stage_game(m, 0, anchors);

  const StageProfile u = embed_profile(m, g, uniform_policy(m), uniform_adversary(m));
  for (int i = 0; i < 2; ++i) {
    REQUIRE(u.agent_sigma[i].size() == 4);
    for (double w : u.agent_sigma[i]) CHECK(w == doctest::Approx(0.25));
    REQUIRE(u.adversary_sigma[i].size() == 2);
    for (double w : u.adversary_sigma[i]) CHECK(w == doctest::Approx(0.5));
  }

  // a1 everywhere encodes to pure index 0; (a1 at s1, a2 at s2) encodes to 1
  const StageProfile d = embed_profile(m, g, deterministic_policy(m, {{0, 0}, {0, 1}}),
                                       identity_adversary(m));
  CHECK(d.agent_sigma[0] == std::vector<double>{1.0, 0.0, 0.0, 0.0});
  CHECK(d.agent_sigma[1] == std::vector<double>{0.0, 1.0, 0.0, 0.0});
  // the identity adversary at state s1 puts all mass on showing s1
  CHECK(d.adversary_sigma[0] == std::vector<double>{1.0, 0.0});
  CHECK(d.adversary_sigma[1] == std::vector<double>{1.0, 0.0});
}

TEST_CASE("stage utilities match the full pure-profile expansion") {
  const SamgModel m = builtin_game("fig4");
  const std::vector<ValueTable> anchors = {{0.3, -0.2}, {1.5, 0.4}};
  for (int s = 0; s < 2; ++s) {
    const StageGame g = build_stage_game(m, s, anchors);

    StageProfile sigma;
    sigma.agent_sigma = {{0.1, 0.2, 0.3, 0.4}, {0.4, 0.3, 0.2, 0.1}};
    sigma.adversary_sigma = {{0.6, 0.4}, {0.25, 0.75}};

    const std::vector<double> u = stage_utilities(m, g, sigma);
    REQUIRE(u.size() == 4);

    // brute force: every pure stage action of both agents, every perception
    // pick of both adversaries
    double want[2] = {0.0, 0.0};
    for (long b1 = 0; b1 < 4; ++b1) {
      const std::vector<int> act1 = decode_pure(b1, 2, 2);
      for (long b2 = 0; b2 < 4; ++b2) {
        const std::vector<int> act2 = decode_pure(b2, 2, 2);
        for (int k1 = 0; k1 < 2; ++k1) {
          for (int k2 = 0; k2 < 2; ++k2) {
            const double w = sigma.agent_sigma[0][b1] * sigma.agent_sigma[1][b2] *
                             sigma.adversary_sigma[0][k1] * sigma.adversary_sigma[1][k2];
            const long ja = m.joint_action_index({act1[k1], act2[k2]});
            want[0] += w * g.agent_q[0][ja];
            want[1] += w * g.agent_q[1][ja];
          }
        }
      }
    }
    CHECK(u[0] == doctest::Approx(want[0]).epsilon(1e-12));
    CHECK(u[1] == doctest::Approx(want[1]).epsilon(1e-12));
    CHECK(u[2] == doctest::Approx(-want[0]).epsilon(1e-12));
    CHECK(u[3] == doctest::Approx(-want[1]).epsilon(1e-12));
  }
}

TEST_CASE("best responses dominate every pure alternative") {
  const SamgModel m = builtin_game("fig4");
  const std::vector<ValueTable> anchors = {{2.0, -1.0}, {0.0, 3.0}};
  const StageGame g = build_stage_game(m, 1, anchors);

  StageProfile sigma;
  sigma.agent_sigma = {{0.7, 0.1, 0.1, 0.1}, {0.25, 0.25, 0.25, 0.25}};
  sigma.adversary_sigma = {{0.5, 0.5}, {0.9, 0.1}};

  for (int player = 0; player < 4; ++player) {
    const BestResponse br = stage_best_response(m, g, player, sigma);
    const long options = player < 2 ? g.agent_pure_counts[player] : 2;
    double best_seen = -1e300;
    long best_index = -1;
    for (long choice = 0; choice < options; ++choice) {
      StageProfile probe = sigma;
      if (player < 2) {
        probe.agent_sigma[player].assign(options, 0.0);
        probe.agent_sigma[player][choice] = 1.0;
      } else {
        probe.adversary_sigma[player - 2].assign(options, 0.0);
        probe.adversary_sigma[player - 2][choice] = 1.0;
      }
      const double got = stage_utilities(m, g, probe)[player];
      CHECK(br.value >= got - 1e-12);
      if (got > best_seen + 1e-15) {
        best_seen = got;
        best_index = choice;
      }
    }
    CHECK(br.value == doctest::Approx(best_seen).epsilon(1e-12));
    CHECK(br.pure_action == best_index);
  }

  const std::vector<double> gaps = stage_exploitability(m, g, sigma);
  REQUIRE(gaps.size() == 4);
  const std::vector<double> u = stage_utilities(m, g, sigma);
  for (int player = 0; player < 4; ++player) {
    CHECK(gaps[player] >= -1e-12);
    const BestResponse br = stage_best_response(m, g, player, sigma);
    CHECK(gaps[player] == doctest::Approx(br.value - u[player]).epsilon(1e-10));
  }
}

TEST_CASE("verification accepts the matching equilibrium") {
  const SamgModel m = matching_game();
  const AgentPolicy both_tails = deterministic_policy(m, {{1}, {1}});
  const VerifyReport r =
      robust_nash_verify(m, both_tails, identity_adversary(m), 1e-6, 1e-8);
  CHECK(r.satisfied);
  CHECK(r.max_gap <= 1e-6);
  REQUIRE(r.gaps.size() == 1);
  REQUIRE(r.gaps[0].size() == 4);
}

TEST_CASE("verification measures the one-state deviation precisely") {
  // on the swapped builtin both pure classes fail: constant play leaves
  // exactly one unit on the table at one state and nothing at the other
  const SamgModel m = builtin_game("fig5");

  SUBCASE("constant matching play fails at the second state") {
    const AgentPolicy same = deterministic_policy(m, {{0, 0}, {0, 0}});
    const VerifyReport r = robust_nash_verify(m, same, identity_adversary(m), 1e-3, 1e-8);
    CHECK(!r.satisfied);
    CHECK(r.max_gap == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(*std::max_element(r.gaps[0].begin(), r.gaps[0].end()) <= 1e-4);
    CHECK(*std::max_element(r.gaps[1].begin(), r.gaps[1].end()) ==
          doctest::Approx(1.0).epsilon(1e-4));
  }

  SUBCASE("constant mismatching play fails at the first state") {
    const AgentPolicy differ = deterministic_policy(m, {{0, 0}, {1, 1}});
    const VerifyReport r = robust_nash_verify(m, differ, identity_adversary(m), 1e-3, 1e-8);
    CHECK(!r.satisfied);
    CHECK(*std::max_element(r.gaps[0].begin(), r.gaps[0].end()) ==
          doctest::Approx(1.0).epsilon(1e-4));
    CHECK(*std::max_element(r.gaps[1].begin(), r.gaps[1].end()) <= 1e-4);
  }
}

TEST_CASE("the original builtin rejects mismatching play at the first state") {
  const SamgModel m = builtin_game("fig4");
  const AgentPolicy differ = deterministic_policy(m, {{0, 0}, {1, 1}});
  const VerifyReport r = robust_nash_verify(m, differ, identity_adversary(m), 1e-3, 1e-8);
  CHECK(!r.satisfied);
  CHECK(*std::max_element(r.gaps[0].begin(), r.gaps[0].end()) ==
        doctest::Approx(1.0).epsilon(1e-4));
  CHECK(*std::max_element(r.gaps[1].begin(), r.gaps[1].end()) <= 1e-4);
}

TEST_CASE("verification validates the profile first") {
  const SamgModel m = builtin_game("fig4");
  AgentPolicy broken = uniform_policy(m);
  broken.pi[0][0] = {0.6, 0.6};
  CHECK_THROWS_AS(robust_nash_verify(m, broken, identity_adversary(m), 1e-3, 1e-8),
                  ValidationError);
}

TEST_CASE("the grid scan finds the matching equilibrium at once") {
  const SamgModel m = matching_game();
  const ScanResult r = nonexistence_scan(m, 11, 1e-6, 1e-8);
  CHECK(r.profiles == 121);
  CHECK(r.min_max_gap <= 1e-6);
  CHECK(r.found_within_eps);
  // the first lattice point already wins: both agents pure on the second
  // action, perception rows pinned to the only admissible choice
  for (int i = 0; i < 2; ++i) {
    CHECK(r.pi.pi[i][0] == std::vector<double>{0.0, 1.0});
    CHECK(r.chi.chi[i][0] == std::vector<double>{1.0});
  }
  // the witness satisfies the verifier it was scored by
  const VerifyReport check = robust_nash_verify(m, r.pi, r.chi, 1e-6, 1e-8);
  CHECK(check.satisfied);

  const ScanResult coarse = nonexistence_scan(m, 3, 1e-6, 1e-8);
  CHECK(coarse.profiles == 9);
  CHECK(coarse.found_within_eps);
}

TEST_CASE("the grid scan reports consistent fields on the builtin") {
  const SamgModel m = builtin_game("fig4");
  const ScanResult r = nonexistence_scan(m, 3, 1e-3, 1e-8);
  // 3 lattice rows per agent slot, 2 deterministic picks plus uniform per
  // adversary row: (3^4) * (3^4)
  CHECK(r.profiles == 6561);
  CHECK(r.min_max_gap >= 0.0);
  CHECK(validate_agent_policy(m, r.pi).empty());
  CHECK(validate_adversary_policy(m, r.chi).empty());
  const VerifyReport v = robust_nash_verify(m, r.pi, r.chi, 1e-3, 1e-8);
  double worst = 0.0;
  for (const auto& row : v.gaps) {
    for (double gap : row) worst = std::max(worst, gap);
  }
  CHECK(worst == doctest::Approx(r.min_max_gap).epsilon(1e-6));
}

TEST_CASE("scan guards") {
  const SamgModel m = builtin_game("fig4");
  CHECK_THROWS_AS(nonexistence_scan(m, 1, 1e-3, 1e-8), ValidationError);
  // 59^4 agent combinations alone break the profile budget
  CHECK_THROWS_AS(nonexistence_scan(m, 59, 1e-3, 1e-8), SizeGuardError);
}

}  // TEST_SUITE
