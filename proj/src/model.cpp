#include "samg/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <sstream>
#include <unordered_map>

#include "samg/numeric.hpp"
#include "samg/rng.hpp"

namespace samg {

namespace {

constexpr double kRowSumTolerance = 1e-12;

std::string brace_join(const std::vector<std::string>& parts) {
  std::string out = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out + ")";
}

// Names of the joint action behind a mixed-radix index, for error messages
// and serialization.
std::vector<std::string> joint_action_names(const SamgModel& m, long ja) {
  std::vector<int> a(m.agents);
  m.decode_joint_action(ja, a);
  std::vector<std::string> names(m.agents);
  for (int i = 0; i < m.agents; ++i) names[i] = m.actions[i][a[i]];
  return names;
}

struct Line {
  std::vector<std::string> tokens;
  int number = 0;
};

std::vector<Line> tokenize(const std::string& text) {
  std::vector<Line> lines;
  std::istringstream stream(text);
  std::string raw;
  int number = 0;
  while (std::getline(stream, raw)) {
    ++number;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ls(raw);
    Line line;
    line.number = number;
    std::string tok;
    while (ls >> tok) line.tokens.push_back(tok);
    if (!line.tokens.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ParseError("line " + std::to_string(line) + ": " + message);
}

double parse_number(const std::string& tok, int line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    fail(line, "expected a finite number, got '" + tok + "'");
  }
  return v;
}

long parse_long(const std::string& tok, int line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  long v = std::strtol(begin, &end, 10);
  if (end == begin || *end != '\0') fail(line, "expected an integer, got '" + tok + "'");
  return v;
}

double parse_probability(const std::string& tok, int line) {
  double v = parse_number(tok, line);
  if (v < 0.0) fail(line, "negative probability " + tok);
  return v;
}

}  // namespace

long SamgModel::num_joint_actions() const {
  long n = 1;
  for (int i = 0; i < agents; ++i) n *= num_actions(i);
  return n;
}

long SamgModel::joint_action_index(const std::vector<int>& a) const {
  long index = 0;
  for (int i = 0; i < agents; ++i) index = index * num_actions(i) + a[i];
  return index;
}

void SamgModel::decode_joint_action(long index, std::vector<int>& a) const {
  a.resize(agents);
  for (int i = agents - 1; i >= 0; --i) {
    a[i] = static_cast<int>(index % num_actions(i));
    index /= num_actions(i);
  }
}

int SamgModel::state_index(const std::string& name) const {
  for (int s = 0; s < num_states(); ++s) {
    if (states[s] == name) return s;
  }
  return -1;
}

int SamgModel::action_index(int agent, const std::string& name) const {
  for (int a = 0; a < num_actions(agent); ++a) {
    if (actions[agent][a] == name) return a;
  }
  return -1;
}

double SamgModel::max_abs_reward() const {
  double r = 0.0;
  for (const auto& row : reward) {
    for (double x : row) r = std::max(r, std::abs(x));
  }
  return r;
}

// --- parsing -----------------------------------------------------------------

SamgModel parse_model(const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty model text");

  SamgModel m;
  bool saw_version = false;
  bool saw_agents = false;
  bool saw_states = false;
  bool saw_gamma = false;
  bool saw_init = false;
  std::vector<bool> saw_actions;
  std::unordered_map<std::string, int> state_ix;
  std::vector<std::unordered_map<std::string, int>> action_ix;
  bool tables_ready = false;

  std::set<std::pair<long, int>> transition_seen;  // (s * JA + ja, s')
  std::set<long> reward_seen;                      // s * JA + ja
  std::set<std::pair<int, int>> perturb_seen;      // (agent, s)
  std::set<int> init_seen;

  auto require_tables = [&](int line) {
    if (tables_ready) return;
    if (!saw_agents || !saw_states) fail(line, "agents and states must be declared first");
    for (int i = 0; i < m.agents; ++i) {
      if (!saw_actions[i]) {
        fail(line, "actions for agent " + std::to_string(i + 1) + " must be declared first");
      }
    }
    const int S = m.num_states();
    const long JA = m.num_joint_actions();
    m.transition.assign(S, std::vector<std::vector<double>>(JA, std::vector<double>(S, 0.0)));
    m.reward.assign(S, std::vector<double>(JA, 0.0));
    m.perturb.assign(m.agents, std::vector<std::vector<int>>(S));
    m.init.assign(S, 0.0);
    tables_ready = true;
  };

  auto lookup_state = [&](const std::string& name, int line) {
    auto it = state_ix.find(name);
    if (it == state_ix.end()) fail(line, "unknown state '" + name + "'");
    return it->second;
  };

  auto lookup_agent = [&](const std::string& tok, int line) {
    long i = parse_long(tok, line);
    if (i < 1 || i > m.agents) fail(line, "agent index " + tok + " out of range");
    return static_cast<int>(i - 1);
  };

  // Read the joint action spelled out between the state tokens of a
  // transition/reward row.
  auto lookup_joint_action = [&](const std::vector<std::string>& tokens, std::size_t offset,
                                 int line) {
    std::vector<int> a(m.agents);
    for (int i = 0; i < m.agents; ++i) {
      auto it = action_ix[i].find(tokens[offset + i]);
      if (it == action_ix[i].end()) {
        fail(line, "unknown action '" + tokens[offset + i] + "' for agent " + std::to_string(i + 1));
      }
      a[i] = it->second;
    }
    return m.joint_action_index(a);
  };

  for (const Line& line : lines) {
    const auto& t = line.tokens;
    const std::string& d = t[0];
    const int ln = line.number;

    if (!saw_version) {
      if (d != "samg" || t.size() != 2 || t[1] != "1") fail(ln, "expected 'samg 1' header");
      saw_version = true;
      continue;
    }

    if (d == "samg") {
      fail(ln, "duplicate header");
    } else if (d == "agents") {
      if (saw_agents) fail(ln, "duplicate agents directive");
      if (t.size() != 2) fail(ln, "agents takes one count");
      long n = parse_long(t[1], ln);
      if (n < 1) fail(ln, "agent count must be at least 1");
      m.agents = static_cast<int>(n);
      m.actions.resize(m.agents);
      saw_actions.assign(m.agents, false);
      action_ix.resize(m.agents);
      saw_agents = true;
    } else if (d == "states") {
      if (saw_states) fail(ln, "duplicate states directive");
      if (t.size() < 2) fail(ln, "states needs at least one identifier");
      for (std::size_t k = 1; k < t.size(); ++k) {
        if (!state_ix.emplace(t[k], static_cast<int>(k - 1)).second) {
          fail(ln, "duplicate state '" + t[k] + "'");
        }
        m.states.push_back(t[k]);
      }
      saw_states = true;
    } else if (d == "actions") {
      if (!saw_agents) fail(ln, "agents must be declared before actions");
      if (t.size() < 3) fail(ln, "actions needs an agent index and at least one identifier");
      int agent = lookup_agent(t[1], ln);
      if (saw_actions[agent]) fail(ln, "duplicate actions for agent " + t[1]);
      for (std::size_t k = 2; k < t.size(); ++k) {
        if (!action_ix[agent].emplace(t[k], static_cast<int>(k - 2)).second) {
          fail(ln, "duplicate action '" + t[k] + "' for agent " + t[1]);
        }
        m.actions[agent].push_back(t[k]);
      }
      saw_actions[agent] = true;
    } else if (d == "gamma") {
      if (saw_gamma) fail(ln, "duplicate gamma directive");
      if (t.size() != 2) fail(ln, "gamma takes one value");
      m.gamma = parse_number(t[1], ln);
      if (!(m.gamma > 0.0 && m.gamma < 1.0)) fail(ln, "gamma must lie strictly between 0 and 1");
      saw_gamma = true;
    } else if (d == "transition") {
      require_tables(ln);
      if (t.size() != static_cast<std::size_t>(m.agents) + 4) {
        fail(ln, "transition needs state, one action per agent, next state, probability");
      }
      int s = lookup_state(t[1], ln);
      long ja = lookup_joint_action(t, 2, ln);
      int sp = lookup_state(t[2 + m.agents], ln);
      double p = parse_probability(t[3 + m.agents], ln);
      if (!transition_seen.emplace(static_cast<long>(s) * m.num_joint_actions() + ja, sp).second) {
        fail(ln, "duplicate transition entry for state " + t[1]);
      }
      m.transition[s][ja][sp] = p;
    } else if (d == "reward") {
      require_tables(ln);
      if (t.size() != static_cast<std::size_t>(m.agents) + 3) {
        fail(ln, "reward needs state, one action per agent, value");
      }
      int s = lookup_state(t[1], ln);
      long ja = lookup_joint_action(t, 2, ln);
      double r = parse_number(t[2 + m.agents], ln);
      if (!reward_seen.insert(static_cast<long>(s) * m.num_joint_actions() + ja).second) {
        fail(ln, "duplicate reward entry for state " + t[1]);
      }
      m.reward[s][ja] = r;
    } else if (d == "perturb") {
      require_tables(ln);
      if (t.size() < 4) fail(ln, "perturb needs agent, state, at least one member");
      int agent = lookup_agent(t[1], ln);
      int s = lookup_state(t[2], ln);
      if (!perturb_seen.emplace(agent, s).second) {
        fail(ln, "duplicate perturb entry for agent " + t[1] + ", state " + t[2]);
      }
      std::vector<int> members;
      for (std::size_t k = 3; k < t.size(); ++k) {
        int rho = lookup_state(t[k], ln);
        if (std::find(members.begin(), members.end(), rho) != members.end()) {
          fail(ln, "duplicate member '" + t[k] + "' in perturb set");
        }
        members.push_back(rho);
      }
      if (std::find(members.begin(), members.end(), s) == members.end()) {
        fail(ln, "perturb set for agent " + t[1] + ", state " + t[2] +
                     " must contain the true state");
      }
      m.perturb[agent][s] = std::move(members);
    } else if (d == "init") {
      require_tables(ln);
      if (t.size() != 3) fail(ln, "init takes a state and a probability");
      int s = lookup_state(t[1], ln);
      if (!init_seen.insert(s).second) fail(ln, "duplicate init entry for state " + t[1]);
      m.init[s] = parse_probability(t[2], ln);
      saw_init = true;
    } else {
      fail(ln, "unknown directive '" + d + "'");
    }
  }

  if (!saw_agents) throw ParseError("missing agents directive");
  if (!saw_states) throw ParseError("missing states directive");
  for (int i = 0; i < m.agents; ++i) {
    if (!saw_actions[i]) {
      throw ParseError("missing actions for agent " + std::to_string(i + 1));
    }
  }
  if (!saw_gamma) throw ParseError("missing gamma directive");
  require_tables(lines.back().number);

  // Admissible sets default to the degenerate {s}; missing init means uniform.
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < m.num_states(); ++s) {
      if (m.perturb[i][s].empty()) m.perturb[i][s] = {s};
    }
  }
  if (!saw_init) {
    m.init.assign(m.num_states(), 1.0 / m.num_states());
    normalize_exact(m.init);
  }

  // Semantic pass: probability rows must land on the simplex before the
  // exact renormalization is applied.
  for (int s = 0; s < m.num_states(); ++s) {
    for (long ja = 0; ja < m.num_joint_actions(); ++ja) {
      double sum = row_sum(m.transition[s][ja]);
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        throw ParseError("transition row for state " + m.states[s] + ", actions " +
                         brace_join(joint_action_names(m, ja)) + " sums to " + fmt17(sum));
      }
      normalize_exact(m.transition[s][ja]);
    }
  }
  double init_sum = row_sum(m.init);
  if (std::abs(init_sum - 1.0) > kRowSumTolerance) {
    throw ParseError("init distribution sums to " + fmt17(init_sum));
  }
  normalize_exact(m.init);

  return m;
}

std::string serialize_model(const SamgModel& m) {
  std::string out;
  out += "samg 1\n";
  out += "agents " + std::to_string(m.agents) + "\n";
  out += "states";
  for (const auto& s : m.states) out += " " + s;
  out += "\n";
  for (int i = 0; i < m.agents; ++i) {
    out += "actions " + std::to_string(i + 1);
    for (const auto& a : m.actions[i]) out += " " + a;
    out += "\n";
  }
  out += "gamma " + fmt17(m.gamma) + "\n";
  for (int s = 0; s < m.num_states(); ++s) {
    for (long ja = 0; ja < m.num_joint_actions(); ++ja) {
      const auto names = joint_action_names(m, ja);
      for (int sp = 0; sp < m.num_states(); ++sp) {
        if (m.transition[s][ja][sp] == 0.0) continue;
        out += "transition " + m.states[s];
        for (const auto& n : names) out += " " + n;
        out += " " + m.states[sp] + " " + fmt17(m.transition[s][ja][sp]) + "\n";
      }
    }
  }
  for (int s = 0; s < m.num_states(); ++s) {
    for (long ja = 0; ja < m.num_joint_actions(); ++ja) {
      if (m.reward[s][ja] == 0.0) continue;
      const auto names = joint_action_names(m, ja);
      out += "reward " + m.states[s];
      for (const auto& n : names) out += " " + n;
      out += " " + fmt17(m.reward[s][ja]) + "\n";
    }
  }
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < m.num_states(); ++s) {
      out += "perturb " + std::to_string(i + 1) + " " + m.states[s];
      for (int rho : m.perturb[i][s]) out += " " + m.states[rho];
      out += "\n";
    }
  }
  for (int s = 0; s < m.num_states(); ++s) {
    if (m.init[s] == 0.0) continue;
    out += "init " + m.states[s] + " " + fmt17(m.init[s]) + "\n";
  }
  return out;
}

std::vector<std::string> validate_model(const SamgModel& m) {
  std::vector<std::string> bad;
  if (m.agents < 1) bad.push_back("agent count must be at least 1");
  if (m.states.empty()) bad.push_back("state set is empty");
  if (static_cast<int>(m.actions.size()) != m.agents) {
    bad.push_back("action table does not cover every agent");
    return bad;
  }
  for (int i = 0; i < m.agents; ++i) {
    if (m.actions[i].empty()) bad.push_back("agent " + std::to_string(i + 1) + " has no actions");
  }
  if (!(m.gamma > 0.0 && m.gamma < 1.0)) bad.push_back("gamma must lie strictly between 0 and 1");
  if (!bad.empty()) return bad;

  const int S = m.num_states();
  const long JA = m.num_joint_actions();
  if (static_cast<int>(m.transition.size()) != S || static_cast<int>(m.reward.size()) != S ||
      static_cast<int>(m.perturb.size()) != m.agents || static_cast<int>(m.init.size()) != S) {
    bad.push_back("table dimensions do not match the declared states/agents");
    return bad;
  }

  for (int s = 0; s < S; ++s) {
    if (static_cast<long>(m.transition[s].size()) != JA ||
        static_cast<long>(m.reward[s].size()) != JA) {
      bad.push_back("state " + m.states[s] + " is missing joint-action rows");
      continue;
    }
    for (long ja = 0; ja < JA; ++ja) {
      if (static_cast<int>(m.transition[s][ja].size()) != S) {
        bad.push_back("transition row for state " + m.states[s] + " has wrong length");
        continue;
      }
      double sum = 0.0;
      bool negative = false;
      for (double p : m.transition[s][ja]) {
        sum += p;
        if (p < 0.0) negative = true;
      }
      if (negative) {
        bad.push_back("negative transition probability at state " + m.states[s] + ", actions " +
                      brace_join(joint_action_names(m, ja)));
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        bad.push_back("transition row for state " + m.states[s] + ", actions " +
                      brace_join(joint_action_names(m, ja)) + " sums to " + fmt17(sum));
      }
      if (!std::isfinite(m.reward[s][ja])) {
        bad.push_back("non-finite reward at state " + m.states[s]);
      }
    }
  }

  for (int i = 0; i < m.agents; ++i) {
    if (static_cast<int>(m.perturb[i].size()) != S) {
      bad.push_back("perturb table for agent " + std::to_string(i + 1) + " has wrong length");
      continue;
    }
    for (int s = 0; s < S; ++s) {
      const auto& set = m.perturb[i][s];
      if (set.empty()) {
        bad.push_back("empty admissible set for agent " + std::to_string(i + 1) + ", state " +
                      m.states[s]);
        continue;
      }
      bool has_self = false;
      std::set<int> distinct;
      for (int rho : set) {
        if (rho < 0 || rho >= S) {
          bad.push_back("admissible set for agent " + std::to_string(i + 1) + ", state " +
                        m.states[s] + " references an unknown state");
          break;
        }
        if (!distinct.insert(rho).second) {
          bad.push_back("duplicate member in admissible set for agent " + std::to_string(i + 1) +
                        ", state " + m.states[s]);
        }
        if (rho == s) has_self = true;
      }
      if (!has_self) {
        bad.push_back("admissible set for agent " + std::to_string(i + 1) + ", state " +
                      m.states[s] + " does not contain the true state");
      }
    }
  }

  double init_sum = 0.0;
  for (int s = 0; s < S; ++s) {
    if (m.init[s] < 0.0) bad.push_back("negative init probability at state " + m.states[s]);
    init_sum += m.init[s];
  }
  if (std::abs(init_sum - 1.0) > kRowSumTolerance) {
    bad.push_back("init distribution sums to " + fmt17(init_sum));
  }

  return bad;
}

// --- builtins ----------------------------------------------------------------

namespace {

// Common scaffold for the two hand-built games: two agents, two states, two
// actions, full admissible sets, uniform start.
SamgModel coordination_shell() {
  SamgModel m;
  m.agents = 2;
  m.states = {"s1", "s2"};
  m.actions = {{"a1", "a2"}, {"a1", "a2"}};
  m.gamma = 0.99;
  const long JA = m.num_joint_actions();
  m.transition.assign(2, std::vector<std::vector<double>>(JA, std::vector<double>(2, 0.0)));
  m.reward.assign(2, std::vector<double>(JA, 0.0));
  m.perturb.assign(2, std::vector<std::vector<int>>(2, {0, 1}));
  m.init = {0.5, 0.5};
  return m;
}

}  // namespace

SamgModel builtin_game(const std::string& name) {
  if (name != "fig4" && name != "fig5") {
    throw ValidationError("unknown builtin game '" + name + "'");
  }
  SamgModel m = coordination_shell();
  const long same_11 = m.joint_action_index({0, 0});
  const long same_22 = m.joint_action_index({1, 1});
  const long diff_12 = m.joint_action_index({0, 1});
  const long diff_21 = m.joint_action_index({1, 0});

  // Matching actions pay 1 at s1, mismatching actions pay 1 at s2.
  m.reward[0][same_11] = 1.0;
  m.reward[0][same_22] = 1.0;
  m.reward[1][diff_12] = 1.0;
  m.reward[1][diff_21] = 1.0;

  // At s2 both variants behave the same: mismatch stays, match moves to s1.
  for (long ja : {diff_12, diff_21}) m.transition[1][ja][1] = 1.0;
  for (long ja : {same_11, same_22}) m.transition[1][ja][0] = 1.0;

  if (name == "fig4") {
    // Match leaves s1, mismatch traps the agents there.
    for (long ja : {same_11, same_22}) m.transition[0][ja][1] = 1.0;
    for (long ja : {diff_12, diff_21}) m.transition[0][ja][0] = 1.0;
  } else {
    // fig5 swaps the s1 rows: match stays at the rewarding state.
    for (long ja : {same_11, same_22}) m.transition[0][ja][0] = 1.0;
    for (long ja : {diff_12, diff_21}) m.transition[0][ja][1] = 1.0;
  }
  return m;
}

SamgModel random_game(std::uint64_t seed, int agents, int states, int actions_per_agent,
                      int perturb_size) {
  if (agents < 1 || states < 1 || actions_per_agent < 1) {
    throw ValidationError("random_game needs at least one agent, state and action");
  }
  if (perturb_size < 1 || perturb_size > states) {
    throw ValidationError("perturb_size must lie in [1, states]");
  }

  SamgModel m;
  m.agents = agents;
  for (int s = 0; s < states; ++s) m.states.push_back("s" + std::to_string(s + 1));
  m.actions.resize(agents);
  for (int i = 0; i < agents; ++i) {
    for (int a = 0; a < actions_per_agent; ++a) {
      m.actions[i].push_back("a" + std::to_string(a + 1));
    }
  }
  m.gamma = 0.9;

  const long JA = m.num_joint_actions();
  Rng rng(seed);

  m.transition.assign(states, std::vector<std::vector<double>>(JA, std::vector<double>(states)));
  for (int s = 0; s < states; ++s) {
    for (long ja = 0; ja < JA; ++ja) {
      auto& row = m.transition[s][ja];
      for (int sp = 0; sp < states; ++sp) row[sp] = rng.uniform01() + 1e-9;
      normalize_exact(row);
    }
  }

  m.reward.assign(states, std::vector<double>(JA));
  for (int s = 0; s < states; ++s) {
    for (long ja = 0; ja < JA; ++ja) m.reward[s][ja] = rng.uniform(-1.0, 1.0);
  }

  m.perturb.assign(agents, std::vector<std::vector<int>>(states));
  for (int i = 0; i < agents; ++i) {
    for (int s = 0; s < states; ++s) {
      std::vector<int> members = {s};
      while (static_cast<int>(members.size()) < perturb_size) {
        int candidate = rng.uniform_int(states);
        if (std::find(members.begin(), members.end(), candidate) == members.end()) {
          members.push_back(candidate);
        }
      }
      std::sort(members.begin(), members.end());
      m.perturb[i][s] = std::move(members);
    }
  }

  m.init.assign(states, 1.0 / states);
  normalize_exact(m.init);
  return m;
}

// --- policy construction ------------------------------------------------------

AgentPolicy uniform_policy(const SamgModel& m) {
  AgentPolicy p;
  p.pi.resize(m.agents);
  for (int i = 0; i < m.agents; ++i) {
    const int A = m.num_actions(i);
    std::vector<double> row(A, 1.0 / A);
    normalize_exact(row);
    p.pi[i].assign(m.num_states(), row);
  }
  return p;
}

AgentPolicy deterministic_policy(const SamgModel& m, const std::vector<std::vector<int>>& choice) {
  AgentPolicy p;
  p.pi.resize(m.agents);
  for (int i = 0; i < m.agents; ++i) {
    p.pi[i].assign(m.num_states(), std::vector<double>(m.num_actions(i), 0.0));
    for (int rho = 0; rho < m.num_states(); ++rho) {
      int a = choice.at(i).at(rho);
      if (a < 0 || a >= m.num_actions(i)) {
        throw ValidationError("deterministic_policy: action index out of range");
      }
      p.pi[i][rho][a] = 1.0;
    }
  }
  return p;
}

AdversaryPolicy identity_adversary(const SamgModel& m) {
  AdversaryPolicy c;
  c.chi.resize(m.agents);
  for (int i = 0; i < m.agents; ++i) {
    c.chi[i].assign(m.num_states(), std::vector<double>(m.num_states(), 0.0));
    for (int s = 0; s < m.num_states(); ++s) c.chi[i][s][s] = 1.0;
  }
  return c;
}

AdversaryPolicy uniform_adversary(const SamgModel& m) {
  AdversaryPolicy c;
  c.chi.resize(m.agents);
  for (int i = 0; i < m.agents; ++i) {
    c.chi[i].assign(m.num_states(), std::vector<double>(m.num_states(), 0.0));
    for (int s = 0; s < m.num_states(); ++s) {
      const auto& set = m.perturb[i][s];
      for (int rho : set) c.chi[i][s][rho] = 1.0 / set.size();
      normalize_exact(c.chi[i][s]);
    }
  }
  return c;
}

AdversaryPolicy deterministic_adversary(const SamgModel& m,
                                        const std::vector<std::vector<int>>& shown) {
  AdversaryPolicy c;
  c.chi.resize(m.agents);
  for (int i = 0; i < m.agents; ++i) {
    c.chi[i].assign(m.num_states(), std::vector<double>(m.num_states(), 0.0));
    for (int s = 0; s < m.num_states(); ++s) {
      int rho = shown.at(i).at(s);
      const auto& set = m.perturb[i][s];
      if (std::find(set.begin(), set.end(), rho) == set.end()) {
        throw ValidationError("deterministic_adversary: state " + m.states[s] + " for agent " +
                              std::to_string(i + 1) + " cannot be shown as " +
                              (rho >= 0 && rho < m.num_states() ? m.states[rho] : "?"));
      }
      c.chi[i][s][rho] = 1.0;
    }
  }
  return c;
}

std::vector<std::string> validate_agent_policy(const SamgModel& m, const AgentPolicy& p) {
  std::vector<std::string> bad;
  if (static_cast<int>(p.pi.size()) != m.agents) {
    bad.push_back("policy does not cover every agent");
    return bad;
  }
  for (int i = 0; i < m.agents; ++i) {
    if (static_cast<int>(p.pi[i].size()) != m.num_states()) {
      bad.push_back("policy for agent " + std::to_string(i + 1) +
                    " does not cover every perceived state");
      continue;
    }
    for (int rho = 0; rho < m.num_states(); ++rho) {
      const auto& row = p.pi[i][rho];
      if (static_cast<int>(row.size()) != m.num_actions(i)) {
        bad.push_back("policy row for agent " + std::to_string(i + 1) + ", perceived state " +
                      m.states[rho] + " has wrong length");
        continue;
      }
      double sum = 0.0;
      for (double x : row) {
        if (x < 0.0) {
          bad.push_back("negative policy probability for agent " + std::to_string(i + 1) +
                        ", perceived state " + m.states[rho]);
          break;
        }
        sum += x;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        bad.push_back("policy row for agent " + std::to_string(i + 1) + ", perceived state " +
                      m.states[rho] + " sums to " + fmt17(sum));
      }
    }
  }
  return bad;
}

std::vector<std::string> validate_adversary_policy(const SamgModel& m, const AdversaryPolicy& c) {
  std::vector<std::string> bad;
  if (static_cast<int>(c.chi.size()) != m.agents) {
    bad.push_back("adversary does not cover every agent");
    return bad;
  }
  for (int i = 0; i < m.agents; ++i) {
    if (static_cast<int>(c.chi[i].size()) != m.num_states()) {
      bad.push_back("adversary for agent " + std::to_string(i + 1) +
                    " does not cover every true state");
      continue;
    }
    for (int s = 0; s < m.num_states(); ++s) {
      const auto& row = c.chi[i][s];
      if (static_cast<int>(row.size()) != m.num_states()) {
        bad.push_back("adversary row for agent " + std::to_string(i + 1) + ", state " +
                      m.states[s] + " has wrong length");
        continue;
      }
      const auto& set = m.perturb[i][s];
      double sum = 0.0;
      for (int rho = 0; rho < m.num_states(); ++rho) {
        double x = row[rho];
        if (x < 0.0) {
          bad.push_back("negative adversary probability for agent " + std::to_string(i + 1) +
                        ", state " + m.states[s]);
          break;
        }
        if (x > 0.0 && std::find(set.begin(), set.end(), rho) == set.end()) {
          bad.push_back("adversary for agent " + std::to_string(i + 1) + ", state " + m.states[s] +
                        " puts mass on inadmissible state " + m.states[rho]);
        }
        sum += x;
      }
      if (std::abs(sum - 1.0) > kRowSumTolerance) {
        bad.push_back("adversary row for agent " + std::to_string(i + 1) + ", state " +
                      m.states[s] + " sums to " + fmt17(sum));
      }
    }
  }
  return bad;
}

// --- policy text i/o -----------------------------------------------------------

PolicyFile parse_policies(const SamgModel& m, const std::string& text) {
  const std::vector<Line> lines = tokenize(text);
  const int S = m.num_states();

  bool saw_pi = false;
  bool saw_chi = false;
  AgentPolicy pi;
  AdversaryPolicy chi;
  pi.pi.resize(m.agents);
  chi.chi.resize(m.agents);
  for (int i = 0; i < m.agents; ++i) {
    pi.pi[i].assign(S, std::vector<double>(m.num_actions(i), 0.0));
    chi.chi[i].assign(S, std::vector<double>(S, 0.0));
  }
  std::set<std::tuple<int, int, int>> pi_seen, chi_seen;

  auto lookup_state = [&](const std::string& name, int ln) {
    int s = m.state_index(name);
    if (s < 0) fail(ln, "unknown state '" + name + "'");
    return s;
  };

  for (const Line& line : lines) {
    const auto& t = line.tokens;
    const int ln = line.number;
    if (t[0] == "policy") {
      // the literal word "agent" after the directive is optional
      std::size_t base = (t.size() > 1 && t[1] == "agent") ? 2 : 1;
      if (t.size() != base + 4) fail(ln, "policy row needs agent, state, action, probability");
      long i1 = parse_long(t[base], ln);
      if (i1 < 1 || i1 > m.agents) fail(ln, "agent index " + t[base] + " out of range");
      int i = static_cast<int>(i1 - 1);
      int rho = lookup_state(t[base + 1], ln);
      int a = m.action_index(i, t[base + 2]);
      if (a < 0) fail(ln, "unknown action '" + t[base + 2] + "' for agent " + t[base]);
      if (!pi_seen.emplace(i, rho, a).second) {
        fail(ln, "duplicate policy entry for agent " + t[base] + ", state " + t[base + 1]);
      }
      pi.pi[i][rho][a] = parse_probability(t[base + 3], ln);
      saw_pi = true;
    } else if (t[0] == "adversary") {
      if (t.size() != 5) fail(ln, "adversary row needs agent, state, shown state, probability");
      long i1 = parse_long(t[1], ln);
      if (i1 < 1 || i1 > m.agents) fail(ln, "agent index " + t[1] + " out of range");
      int i = static_cast<int>(i1 - 1);
      int s = lookup_state(t[2], ln);
      int rho = lookup_state(t[3], ln);
      const auto& set = m.perturb[i][s];
      if (std::find(set.begin(), set.end(), rho) == set.end()) {
        fail(ln, "state " + t[3] + " is not admissible for agent " + t[1] + " at state " + t[2]);
      }
      if (!chi_seen.emplace(i, s, rho).second) {
        fail(ln, "duplicate adversary entry for agent " + t[1] + ", state " + t[2]);
      }
      chi.chi[i][s][rho] = parse_probability(t[4], ln);
      saw_chi = true;
    } else {
      fail(ln, "unknown directive '" + t[0] + "'");
    }
  }

  PolicyFile out;
  if (saw_pi) {
    for (int i = 0; i < m.agents; ++i) {
      for (int rho = 0; rho < S; ++rho) {
        double sum = row_sum(pi.pi[i][rho]);
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
          throw ParseError("policy row for agent " + std::to_string(i + 1) +
                           ", perceived state " + m.states[rho] + " sums to " + fmt17(sum));
        }
        normalize_exact(pi.pi[i][rho]);
      }
    }
    out.pi = std::move(pi);
  }
  if (saw_chi) {
    for (int i = 0; i < m.agents; ++i) {
      for (int s = 0; s < S; ++s) {
        double sum = row_sum(chi.chi[i][s]);
        if (std::abs(sum - 1.0) > kRowSumTolerance) {
          throw ParseError("adversary row for agent " + std::to_string(i + 1) + ", state " +
                           m.states[s] + " sums to " + fmt17(sum));
        }
        normalize_exact(chi.chi[i][s]);
      }
    }
    out.chi = std::move(chi);
  }
  return out;
}

std::string serialize_policies(const SamgModel& m, const AgentPolicy* pi,
                               const AdversaryPolicy* chi) {
  std::string out;
  if (pi) {
    for (int i = 0; i < m.agents; ++i) {
      for (int rho = 0; rho < m.num_states(); ++rho) {
        for (int a = 0; a < m.num_actions(i); ++a) {
          double p = pi->pi[i][rho][a];
          if (p == 0.0) continue;
          out += "policy agent " + std::to_string(i + 1) + " " + m.states[rho] + " " +
                 m.actions[i][a] + " " + fmt17(p) + "\n";
        }
      }
    }
  }
  if (chi) {
    for (int i = 0; i < m.agents; ++i) {
      for (int s = 0; s < m.num_states(); ++s) {
        for (int rho = 0; rho < m.num_states(); ++rho) {
          double p = chi->chi[i][s][rho];
          if (p == 0.0) continue;
          out += "adversary " + std::to_string(i + 1) + " " + m.states[s] + " " + m.states[rho] +
                 " " + fmt17(p) + "\n";
        }
      }
    }
  }
  return out;
}

}  // namespace samg
