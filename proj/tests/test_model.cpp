#include <cmath>
#include <set>
#include <string>

#include "doctest.h"
#include "samg/model.hpp"
#include "samg/numeric.hpp"

using namespace samg;

TEST_SUITE("model") {

TEST_CASE("fig4 is wired the way the game is described") {
  const SamgModel m = builtin_game("fig4");
  REQUIRE(m.agents == 2);
  REQUIRE(m.num_states() == 2);
  CHECK(m.gamma == 0.99);
  CHECK(m.num_joint_actions() == 4);

  // matching actions pay off in s1, mismatched ones in s2
  CHECK(m.reward[0][m.joint_action_index({0, 0})] == 1.0);
  CHECK(m.reward[0][m.joint_action_index({1, 1})] == 1.0);
  CHECK(m.reward[0][m.joint_action_index({0, 1})] == 0.0);
  CHECK(m.reward[1][m.joint_action_index({0, 1})] == 1.0);
  CHECK(m.reward[1][m.joint_action_index({1, 0})] == 1.0);
  CHECK(m.reward[1][m.joint_action_index({0, 0})] == 0.0);

  // matching in s1 moves on, mismatching gets stuck; s2 mirrors it
  CHECK(m.transition[0][m.joint_action_index({0, 0})][1] == 1.0);
  CHECK(m.transition[0][m.joint_action_index({0, 1})][0] == 1.0);
  CHECK(m.transition[1][m.joint_action_index({0, 1})][1] == 1.0);
  CHECK(m.transition[1][m.joint_action_index({1, 1})][0] == 1.0);

  // adversaries may show either state, start states are a coin flip
  for (int i = 0; i < 2; ++i) {
    for (int s = 0; s < 2; ++s) {
      CHECK(m.perturb[i][s] == std::vector<int>{0, 1});
    }
  }
  CHECK(m.init == std::vector<double>{0.5, 0.5});
  CHECK(validate_model(m).empty());
}

TEST_CASE("fig5 swaps only the s1 rows of fig4") {
  const SamgModel a = builtin_game("fig4");
  const SamgModel b = builtin_game("fig5");
  CHECK(b.transition[0][b.joint_action_index({0, 0})][0] == 1.0);
  CHECK(b.transition[0][b.joint_action_index({0, 1})][1] == 1.0);
  CHECK(a.transition[1] == b.transition[1]);
  CHECK(a.reward == b.reward);
  CHECK(validate_model(b).empty());
}

TEST_CASE("unknown builtin names are rejected") {
  CHECK_THROWS_AS(builtin_game("fig6"), ValidationError);
}

TEST_CASE("model text round trip is byte stable") {
  for (const char* name : {"fig4", "fig5"}) {
    const std::string once = serialize_model(builtin_game(name));
    const std::string twice = serialize_model(parse_model(once));
    CHECK(once == twice);
  }
  const std::string once = serialize_model(random_game(42, 2, 4, 3, 2));
  CHECK(once == serialize_model(parse_model(once)));
}

TEST_CASE("parser renormalizes near-miss rows to an exact sum") {
  // the s1 row is off by 4e-13, inside the acceptance window
  const std::string text = R"(samg 1
agents 1
states s1 s2
actions 1 a
gamma 0.9
transition s1 a s1 0.3330000000004
transition s1 a s2 0.667
transition s2 a s2 1
reward s1 a 1
)";
  const SamgModel m = parse_model(text);
  CHECK(row_sum(m.transition[0][0]) == 1.0);
  CHECK(m.transition[1][0][1] == 1.0);

  // a hundred times further out is a parse error naming the row
  const std::string bad = R"(samg 1
agents 1
states s1 s2
actions 1 a
gamma 0.9
transition s1 a s1 0.33300000004
transition s1 a s2 0.667
transition s2 a s2 1
reward s1 a 1
)";
  CHECK_THROWS_WITH_AS(parse_model(bad),
                       doctest::Contains("transition row for state s1"), ParseError);
}

TEST_CASE("parse errors carry line numbers and causes") {
  CHECK_THROWS_WITH_AS(parse_model("agents 2\n"), doctest::Contains("samg 1"), ParseError);
  CHECK_THROWS_WITH_AS(parse_model("samg 2\n"), doctest::Contains("line 1"), ParseError);

  const std::string base = "samg 1\nagents 1\nstates s1\nactions 1 a\ngamma 0.9\n";
  CHECK_THROWS_WITH_AS(parse_model(base + "transition s1 a s1 1\nreward s1 a 1\nbogus 3\n"),
                       doctest::Contains("bogus"), ParseError);
  CHECK_THROWS_WITH_AS(parse_model(base + "transition s1 a s9 1\n"),
                       doctest::Contains("unknown state"), ParseError);
  CHECK_THROWS_WITH_AS(parse_model(base + "transition s1 a s1 1\ntransition s1 a s1 0\n"),
                       doctest::Contains("duplicate"), ParseError);
  CHECK_THROWS_WITH_AS(parse_model(base + "transition s1 a s1 1.5x\n"),
                       doctest::Contains("line 6"), ParseError);
  CHECK_THROWS_WITH_AS(parse_model(base + "transition s1 a s1 -0.2\n"),
                       doctest::Contains("negative"), ParseError);
  // gamma outside [0, 1)
  CHECK_THROWS_AS(parse_model("samg 1\nagents 1\nstates s1\nactions 1 a\ngamma 1\n"
                              "transition s1 a s1 1\n"),
                  ParseError);
}

TEST_CASE("perturb sets must contain the true state") {
  const std::string text = R"(samg 1
agents 1
states s1 s2
actions 1 a
gamma 0.9
transition s1 a s2 1
transition s2 a s1 1
reward s1 a 1
perturb 1 s1 s2
)";
  CHECK_THROWS_WITH_AS(parse_model(text), doctest::Contains("true state"), ParseError);
}

TEST_CASE("omitted perturb and init take their defaults") {
  const std::string text = R"(samg 1
agents 2
states x y z
actions 1 l r
actions 2 l r
gamma 0.5
transition x l l y 1
transition y l l z 1
transition z l l x 1
transition x l r y 1
transition y l r z 1
transition z l r x 1
transition x r l y 1
transition y r l z 1
transition z r l x 1
transition x r r y 1
transition y r r z 1
transition z r r x 1
reward x l l 1
)";
  const SamgModel m = parse_model(text);
  for (int i = 0; i < 2; ++i) {
    for (int s = 0; s < 3; ++s) CHECK(m.perturb[i][s] == std::vector<int>{s});
  }
  CHECK(row_sum(m.init) == 1.0);
  CHECK(m.init[0] == m.init[2]);
  CHECK(validate_model(m).empty());
}

TEST_CASE("comments and blank lines are ignored") {
  std::string text = serialize_model(builtin_game("fig4"));
  text = "# header comment\n\n" + text + "\n# trailing\n";
  CHECK(serialize_model(parse_model(text)) == serialize_model(builtin_game("fig4")));
}

TEST_CASE("random games are valid and reproducible") {
  const SamgModel a = random_game(7, 2, 3, 2, 2);
  const SamgModel b = random_game(7, 2, 3, 2, 2);
  CHECK(serialize_model(a) == serialize_model(b));
  CHECK(serialize_model(a) != serialize_model(random_game(8, 2, 3, 2, 2)));
  CHECK(validate_model(a).empty());
  CHECK(a.gamma == 0.9);
  for (int i = 0; i < a.agents; ++i) {
    for (int s = 0; s < a.num_states(); ++s) {
      CHECK(a.perturb[i][s].size() == 2);
      CHECK(std::find(a.perturb[i][s].begin(), a.perturb[i][s].end(), s) !=
            a.perturb[i][s].end());
      CHECK(row_sum(a.transition[s][0]) == 1.0);
    }
  }
  for (int s = 0; s < a.num_states(); ++s) {
    for (long ja = 0; ja < a.num_joint_actions(); ++ja) {
      CHECK(std::abs(a.reward[s][ja]) <= 1.0);
    }
  }
}

TEST_CASE("joint action encoding round trips") {
  const SamgModel m = random_game(3, 3, 2, 3, 1);
  std::vector<int> a(3);
  for (long ja = 0; ja < m.num_joint_actions(); ++ja) {
    m.decode_joint_action(ja, a);
    CHECK(m.joint_action_index(a) == ja);
  }
  // agent 0 owns the most significant digit
  CHECK(m.joint_action_index({1, 0, 0}) == 9);
  CHECK(m.joint_action_index({0, 0, 1}) == 1);
}

TEST_CASE("policy constructors produce valid tables") {
  const SamgModel m = builtin_game("fig4");
  CHECK(validate_agent_policy(m, uniform_policy(m)).empty());
  CHECK(validate_agent_policy(m, deterministic_policy(m, {{0, 1}, {1, 0}})).empty());
  CHECK(validate_adversary_policy(m, identity_adversary(m)).empty());
  CHECK(validate_adversary_policy(m, uniform_adversary(m)).empty());
  CHECK(validate_adversary_policy(m, deterministic_adversary(m, {{1, 0}, {0, 1}})).empty());

  const AdversaryPolicy id = identity_adversary(m);
  for (int i = 0; i < 2; ++i) {
    CHECK(id.chi[i][0][0] == 1.0);
    CHECK(id.chi[i][1][1] == 1.0);
  }
}

TEST_CASE("validators catch broken tables") {
  const SamgModel m = builtin_game("fig4");

  AgentPolicy pi = uniform_policy(m);
  pi.pi[1][0][0] = 0.7;
  auto bad = validate_agent_policy(m, pi);
  REQUIRE(!bad.empty());
  CHECK(bad.front().find("agent 2") != std::string::npos);

  AgentPolicy shape = uniform_policy(m);
  shape.pi.pop_back();
  CHECK(!validate_agent_policy(m, shape).empty());

  AdversaryPolicy chi = identity_adversary(m);
  chi.chi[0][0] = {0.0, 1.0};  // admissible here, still a valid row
  CHECK(validate_adversary_policy(m, chi).empty());

  const SamgModel tight = random_game(1, 2, 3, 2, 1);  // singleton admissible sets
  AdversaryPolicy off = identity_adversary(tight);
  off.chi[0][0] = {0.0, 1.0, 0.0};
  bad = validate_adversary_policy(tight, off);
  REQUIRE(!bad.empty());
  CHECK(bad.front().find("admissible") != std::string::npos);
}

TEST_CASE("policy files round trip and enforce admissibility") {
  const SamgModel m = builtin_game("fig4");
  const AgentPolicy pi = deterministic_policy(m, {{0, 0}, {0, 1}});
  const AdversaryPolicy chi = uniform_adversary(m);

  const std::string text = serialize_policies(m, &pi, &chi);
  const PolicyFile parsed = parse_policies(m, text);
  REQUIRE(parsed.pi.has_value());
  REQUIRE(parsed.chi.has_value());
  CHECK(parsed.pi->pi == pi.pi);
  CHECK(parsed.chi->chi == chi.chi);
  CHECK(serialize_policies(m, &*parsed.pi, &*parsed.chi) == text);

  // the word "agent" after the policy directive is optional
  const PolicyFile spare = parse_policies(m, "policy 1 s1 a1 1\npolicy 1 s2 a1 1\n"
                                              "policy 2 s1 a1 1\npolicy 2 s2 a2 1\n");
  REQUIRE(spare.pi.has_value());
  CHECK(spare.pi->pi == pi.pi);
  CHECK(!spare.chi.has_value());

  const SamgModel tight = random_game(1, 2, 3, 2, 1);
  const std::string off = "adversary 1 " + tight.states[0] + " " + tight.states[1] + " 1\n";
  CHECK_THROWS_WITH_AS(parse_policies(tight, off), doctest::Contains("not admissible"),
                       ParseError);
}

TEST_CASE("partial policy files are incomplete rows, not defaults") {
  const SamgModel m = builtin_game("fig4");
  CHECK_THROWS_WITH_AS(parse_policies(m, "policy 1 s1 a1 1\n"), doctest::Contains("agent 1"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_policies(m, "policy 1 s1 a1 0.5\npolicy 1 s1 a2 0.6\n"
                                         "policy 1 s2 a1 1\npolicy 2 s1 a1 1\npolicy 2 s2 a1 1\n"),
                       doctest::Contains("sums to"), ParseError);
  CHECK_THROWS_WITH_AS(parse_policies(m, "policy 1 s1 a1 1\npolicy 1 s1 a1 0\n"),
                       doctest::Contains("duplicate"), ParseError);
  CHECK_THROWS_WITH_AS(parse_policies(m, "frobnicate 1\n"), doctest::Contains("unknown directive"),
                       ParseError);
}

TEST_CASE("normalize_exact repairs sums without touching exact rows") {
  std::vector<double> exact = {1.0, 0.0};
  normalize_exact(exact);
  CHECK(exact == std::vector<double>{1.0, 0.0});

  std::vector<double> thirds = {1.0 / 3.0, 2.0 / 3.0};
  normalize_exact(thirds);
  CHECK(row_sum(thirds) == 1.0);

  std::vector<double> off = {0.1, 0.2, 0.7000000000000004};
  normalize_exact(off);
  CHECK(row_sum(off) == 1.0);
  CHECK(off[0] == doctest::Approx(0.1).epsilon(1e-12));
}

}  // TEST_SUITE
