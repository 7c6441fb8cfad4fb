#include "samg/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "samg/acceptance.hpp"
#include "samg/adversary.hpp"
#include "samg/equilibrium.hpp"
#include "samg/errors.hpp"
#include "samg/eval.hpp"
#include "samg/maximin.hpp"
#include "samg/model.hpp"
#include "samg/numeric.hpp"
#include "samg/robust_value.hpp"

namespace samg::cli {

namespace {

// argv-level problems: wrong flags, unreadable paths. Distinct from model or
// policy content problems, which exit with 1 instead of 2.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

struct Options {
  std::string model_path;
  std::string builtin;
  std::string policy_path;
  std::string adversary_path;
  std::string out_path;
  std::string trace_path;
  double tol = 1e-8;
  double eps = 1e-6;
  double eta = 0.05;
  long iters = 10000;
  long episodes = 10000;
  long horizon = 2000;
  int grid = 11;
  std::uint64_t seed = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Ordered report rows. Machine output keeps every significant digit and
// skips anything timing-related so reruns stay byte-identical.
class Report {
 public:
  void text(const std::string& key, const std::string& value) { rows_.push_back({key, value, value, true}); }
  void number(const std::string& key, double value) {
    rows_.push_back({key, fmt17(value), fmt6(value), true});
  }
  void integer(const std::string& key, long value) {
    rows_.push_back({key, std::to_string(value), std::to_string(value), true});
  }
  void flag(const std::string& key, bool value) {
    rows_.push_back({key, value ? "1" : "0", value ? "yes" : "no", true});
  }
  void human_number(const std::string& key, double value) {
    rows_.push_back({key, "", fmt6(value), false});
  }

  void print_human(std::ostream& os) const {
    std::size_t width = 0;
    for (const Row& r : rows_) width = std::max(width, r.key.size());
    for (const Row& r : rows_) {
      os << r.key << std::string(width - r.key.size() + 2, ' ') << r.human << "\n";
    }
  }

  void write_machine(std::ostream& os) const {
    for (const Row& r : rows_) {
      if (r.in_machine) os << r.key << " = " << r.machine << "\n";
    }
  }

 private:
  struct Row {
    std::string key;
    std::string machine;
    std::string human;
    bool in_machine;
  };
  std::vector<Row> rows_;
};

void emit(const Report& report, const Options& opt) {
  report.print_human(std::cout);
  if (!opt.out_path.empty()) {
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw UsageError("cannot write file: " + opt.out_path);
    report.write_machine(out);
  }
}

void write_trace(const SolveReport& solve, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write file: " + path);
  out << "iter,objective,residual\n";
  for (std::size_t i = 0; i < solve.objective_trace.size(); ++i) {
    out << i << "," << fmt17(solve.objective_trace[i]) << ","
        << fmt17(solve.residual_trace[i]) << "\n";
  }
}

SamgModel load_model(const Options& opt) {
  if (opt.model_path.empty() == opt.builtin.empty()) {
    throw UsageError("exactly one of --model or --builtin is required");
  }
  if (!opt.builtin.empty()) return builtin_game(opt.builtin);
  return parse_model(read_file(opt.model_path));
}

AgentPolicy load_agent_policy(const SamgModel& m, const Options& opt) {
  if (opt.policy_path.empty()) return uniform_policy(m);
  const PolicyFile pf = parse_policies(m, read_file(opt.policy_path));
  if (!pf.pi) throw ValidationError("policy file contains no policy lines: " + opt.policy_path);
  return *pf.pi;
}

// --adversary wins over adversary lines in the --policy file; with neither,
// perception is left untouched
AdversaryPolicy load_adversary_policy(const SamgModel& m, const Options& opt) {
  if (!opt.adversary_path.empty()) {
    const PolicyFile pf = parse_policies(m, read_file(opt.adversary_path));
    if (!pf.chi) {
      throw ValidationError("adversary file contains no adversary lines: " + opt.adversary_path);
    }
    return *pf.chi;
  }
  if (!opt.policy_path.empty()) {
    const PolicyFile pf = parse_policies(m, read_file(opt.policy_path));
    if (pf.chi) return *pf.chi;
  }
  return identity_adversary(m);
}

std::string model_label(const Options& opt) {
  return opt.builtin.empty() ? opt.model_path : opt.builtin;
}

void add_policy_rows(Report& report, const std::string& prefix, const SamgModel& m,
                     const AgentPolicy& pi) {
  for (int i = 0; i < m.agents; ++i) {
    for (int rho = 0; rho < m.num_states(); ++rho) {
      for (int a = 0; a < m.num_actions(i); ++a) {
        report.number(prefix + ".agent" + std::to_string(i + 1) + "." + m.states[rho] + "." +
                          m.actions[i][a],
                      pi.pi[i][rho][a]);
      }
    }
  }
}

void add_adversary_rows(Report& report, const std::string& prefix, const SamgModel& m,
                        const AdversaryPolicy& chi) {
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < m.num_states(); ++s) {
      for (int rho : m.perturb[i][s]) {
        report.number(prefix + ".agent" + std::to_string(i + 1) + "." + m.states[s] + "." +
                          m.states[rho],
                      chi.chi[i][s][rho]);
      }
    }
  }
}

// --- one function per command -------------------------------------------------

int cmd_eval(const Options& opt) {
  const SamgModel m = load_model(opt);
  const ValueTable v = evaluate(m, load_agent_policy(m, opt), load_adversary_policy(m, opt));
  Report report;
  report.text("command", "eval");
  report.text("model", model_label(opt));
  for (int s = 0; s < m.num_states(); ++s) report.number("eval.V." + m.states[s], v[s]);
  report.number("eval.J", expected_value(m, v));
  emit(report, opt);
  return 0;
}

int cmd_worst_case(const Options& opt) {
  const SamgModel m = load_model(opt);
  const WorstCase wc = optimal_adversary(m, load_agent_policy(m, opt), opt.tol);
  Report report;
  report.text("command", "worst-case");
  report.text("model", model_label(opt));
  for (int s = 0; s < m.num_states(); ++s) report.number("worst_case.V." + m.states[s], wc.v_bar[s]);
  report.number("worst_case.F", expected_value(m, wc.v_bar));
  report.integer("worst_case.iterations", wc.iterations);
  report.number("worst_case.residual", wc.residual);
  add_adversary_rows(report, "worst_case.adversary", m, wc.chi);
  emit(report, opt);
  return 0;
}

int cmd_robust_value(const Options& opt) {
  const SamgModel m = load_model(opt);
  const AgentPolicy pi = load_agent_policy(m, opt);
  const AdversaryPolicy chi = load_adversary_policy(m, opt);
  Report report;
  report.text("command", "robust-value");
  report.text("model", model_label(opt));
  for (int i = 0; i < m.agents; ++i) {
    const RobustFixedPoint fp = robust_fixed_point(m, i, pi, chi, opt.tol);
    const std::string prefix = "robust_value.agent" + std::to_string(i + 1);
    for (int s = 0; s < m.num_states(); ++s) report.number(prefix + ".V." + m.states[s], fp.v[s]);
    report.integer(prefix + ".iterations", fp.iterations);
    report.number(prefix + ".residual", fp.residual);
  }
  emit(report, opt);
  return 0;
}

int cmd_nash_verify(const Options& opt) {
  const SamgModel m = load_model(opt);
  const VerifyReport vr = robust_nash_verify(m, load_agent_policy(m, opt),
                                             load_adversary_policy(m, opt), opt.eps, opt.tol);
  Report report;
  report.text("command", "nash-verify");
  report.text("model", model_label(opt));
  report.flag("nash_verify.satisfied", vr.satisfied);
  report.number("nash_verify.max_gap", vr.max_gap);
  report.number("nash_verify.eps", opt.eps);
  for (int s = 0; s < m.num_states(); ++s) {
    for (int p = 0; p < 2 * m.agents; ++p) {
      const std::string player = p < m.agents
                                     ? "agent" + std::to_string(p + 1)
                                     : "adversary" + std::to_string(p - m.agents + 1);
      report.number("nash_verify.gap." + m.states[s] + "." + player, vr.gaps[s][p]);
    }
  }
  emit(report, opt);
  return 0;
}

int cmd_scan(const Options& opt) {
  const SamgModel m = load_model(opt);
  const ScanResult sr = nonexistence_scan(m, opt.grid, opt.eps, opt.tol);
  Report report;
  report.text("command", "scan");
  report.text("model", model_label(opt));
  report.integer("scan.grid", opt.grid);
  report.number("scan.eps", opt.eps);
  report.integer("scan.profiles", sr.profiles);
  report.number("scan.min_max_gap", sr.min_max_gap);
  report.flag("scan.found_within_eps", sr.found_within_eps);
  add_policy_rows(report, "scan.witness.policy", m, sr.pi);
  add_adversary_rows(report, "scan.witness.adversary", m, sr.chi);
  emit(report, opt);
  return 0;
}

int cmd_gda(const Options& opt) {
  const SamgModel m = load_model(opt);
  const SolveReport solve = gda_solve(m, load_agent_policy(m, opt), load_adversary_policy(m, opt),
                                      opt.eta, opt.eta, opt.iters, opt.seed);
  Report report;
  report.text("command", "gda");
  report.text("model", model_label(opt));
  report.integer("gda.iterations", solve.iterations);
  report.number("gda.final_J", solve.objective_trace.back());
  report.number("gda.final_objective", solve.final_objective);
  report.integer("gda.seed", static_cast<long>(solve.seed));
  add_policy_rows(report, "gda.policy", m, solve.pi);
  add_adversary_rows(report, "gda.adversary", m, solve.chi);
  report.human_number("wall_seconds", solve.wall_seconds);
  emit(report, opt);
  if (!opt.trace_path.empty()) write_trace(solve, opt.trace_path);
  return 0;
}

int cmd_subgrad(const Options& opt) {
  const SamgModel m = load_model(opt);
  const SolveReport solve = subgradient_solve(m, load_agent_policy(m, opt), opt.eta, opt.iters,
                                              opt.tol);
  Report report;
  report.text("command", "subgrad");
  report.text("model", model_label(opt));
  report.integer("subgrad.iterations", solve.iterations);
  report.integer("subgrad.best_iteration", solve.best_iteration);
  report.number("subgrad.final_objective", solve.final_objective);
  add_policy_rows(report, "subgrad.policy", m, solve.pi);
  add_adversary_rows(report, "subgrad.adversary", m, solve.chi);
  report.human_number("wall_seconds", solve.wall_seconds);
  emit(report, opt);
  if (!opt.trace_path.empty()) write_trace(solve, opt.trace_path);
  return 0;
}

int cmd_enumerate(const Options& opt) {
  const SamgModel m = load_model(opt);
  const PolicyEnumeration en = enumerate_deterministic_policies(m, opt.tol);
  Report report;
  report.text("command", "enumerate");
  report.text("model", model_label(opt));
  report.integer("enumerate.count", en.count);
  report.number("enumerate.best_value", en.best_value);
  for (int i = 0; i < m.agents; ++i) {
    for (int s = 0; s < m.num_states(); ++s) {
      int chosen = 0;
      for (int a = 0; a < m.num_actions(i); ++a) {
        if (en.argmax.pi[i][s][a] == 1.0) chosen = a;
      }
      report.text("enumerate.witness.agent" + std::to_string(i + 1) + "." + m.states[s],
                  m.actions[i][chosen]);
    }
  }
  emit(report, opt);
  return 0;
}

int cmd_simulate(const Options& opt) {
  const SamgModel m = load_model(opt);
  const SimulationResult sim = simulate(m, load_agent_policy(m, opt),
                                        load_adversary_policy(m, opt), opt.episodes, opt.horizon,
                                        opt.seed);
  Report report;
  report.text("command", "simulate");
  report.text("model", model_label(opt));
  report.number("simulate.mean", sim.mean);
  report.number("simulate.standard_error", sim.standard_error);
  report.integer("simulate.episodes", sim.episodes);
  report.integer("simulate.horizon", sim.horizon);
  report.integer("simulate.seed", static_cast<long>(opt.seed));
  emit(report, opt);
  return 0;
}

int cmd_counterexamples(const Options& opt) {
  const std::vector<CheckResult> results = full_acceptance_suite();
  int passed = 0;
  for (const CheckResult& r : results) passed += r.pass ? 1 : 0;

  for (const CheckResult& r : results) {
    std::printf("%s  %-55s [%6.2f s]  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                r.detail.c_str());
  }
  std::printf("%d/%zu checks passed\n", passed, results.size());

  if (!opt.out_path.empty()) {
    Report report;
    report.text("command", "counterexamples");
    for (std::size_t k = 0; k < results.size(); ++k) {
      const std::string prefix = "counterexamples.check" + std::to_string(k + 1);
      report.text(prefix + ".name", results[k].name);
      report.flag(prefix + ".pass", results[k].pass);
      report.text(prefix + ".detail", results[k].detail);
    }
    report.integer("counterexamples.passed", passed);
    report.integer("counterexamples.total", static_cast<long>(results.size()));
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw UsageError("cannot write file: " + opt.out_path);
    report.write_machine(out);
  }
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"solver and verification toolkit for state-adversarial Markov games"};
  app.require_subcommand(1);

  Options opt;

  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--model", opt.model_path, "model file to load");
    cmd->add_option("--builtin", opt.builtin, "builtin game name (fig4, fig5)");
  };
  auto add_policy = [&](CLI::App* cmd) {
    cmd->add_option("--policy", opt.policy_path, "policy file (default: uniform)");
  };
  auto add_adversary = [&](CLI::App* cmd) {
    cmd->add_option("--adversary", opt.adversary_path, "adversary file (default: identity)");
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.out_path, "write a machine-readable report here");
  };
  auto add_tol = [&](CLI::App* cmd) {
    cmd->add_option("--tol", opt.tol, "solver tolerance")->check(CLI::PositiveNumber);
  };

  CLI::App* c_eval = app.add_subcommand("eval", "evaluate a fixed policy and adversary pair");
  add_model(c_eval), add_policy(c_eval), add_adversary(c_eval), add_out(c_eval);

  CLI::App* c_worst = app.add_subcommand("worst-case", "solve for the optimal adversary");
  add_model(c_worst), add_policy(c_worst), add_tol(c_worst), add_out(c_worst);

  CLI::App* c_robust = app.add_subcommand("robust-value", "per-agent robust value fixed points");
  add_model(c_robust), add_policy(c_robust), add_adversary(c_robust), add_tol(c_robust),
      add_out(c_robust);

  CLI::App* c_verify = app.add_subcommand("nash-verify", "stage-wise equilibrium check");
  add_model(c_verify), add_policy(c_verify), add_adversary(c_verify), add_tol(c_verify),
      add_out(c_verify);
  c_verify->add_option("--eps", opt.eps, "largest acceptable gap")->check(CLI::PositiveNumber);

  CLI::App* c_scan = app.add_subcommand("scan", "grid scan for low-gap profiles");
  add_model(c_scan), add_tol(c_scan), add_out(c_scan);
  c_scan->add_option("--grid", opt.grid, "points per simplex coordinate")
      ->check(CLI::Range(2, 1000000));
  c_scan->add_option("--eps", opt.eps, "gap threshold counted as found")
      ->check(CLI::PositiveNumber);
  c_scan->parse_complete_callback([&] {
    if (c_scan->count("--eps") == 0) opt.eps = 1e-3;
  });

  CLI::App* c_gda = app.add_subcommand("gda", "simultaneous gradient ascent-descent");
  add_model(c_gda), add_policy(c_gda), add_adversary(c_gda), add_out(c_gda);
  c_gda->add_option("--eta", opt.eta, "step size")->check(CLI::PositiveNumber);
  c_gda->add_option("--iters", opt.iters, "iterations")->check(CLI::NonNegativeNumber);
  c_gda->add_option("--seed", opt.seed, "report seed tag");
  c_gda->add_option("--trace", opt.trace_path, "write iter,objective,residual CSV here");

  CLI::App* c_sub = app.add_subcommand("subgrad", "ascent on the worst-case objective");
  add_model(c_sub), add_policy(c_sub), add_tol(c_sub), add_out(c_sub);
  c_sub->add_option("--eta", opt.eta, "step size")->check(CLI::PositiveNumber);
  c_sub->add_option("--iters", opt.iters, "iterations")->check(CLI::NonNegativeNumber);
  c_sub->add_option("--trace", opt.trace_path, "write iter,objective,residual CSV here");

  CLI::App* c_enum = app.add_subcommand("enumerate", "score every deterministic policy");
  add_model(c_enum), add_tol(c_enum), add_out(c_enum);

  CLI::App* c_sim = app.add_subcommand("simulate", "Monte-Carlo rollout of a policy pair");
  add_model(c_sim), add_policy(c_sim), add_adversary(c_sim), add_out(c_sim);
  c_sim->add_option("--episodes", opt.episodes, "episode count")->check(CLI::PositiveNumber);
  c_sim->add_option("--horizon", opt.horizon, "steps per episode")->check(CLI::PositiveNumber);
  c_sim->add_option("--seed", opt.seed, "stream seed");

  CLI::App* c_counter = app.add_subcommand("counterexamples", "run the verification suite");
  add_out(c_counter);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (c_eval->parsed()) return cmd_eval(opt);
    if (c_worst->parsed()) return cmd_worst_case(opt);
    if (c_robust->parsed()) return cmd_robust_value(opt);
    if (c_verify->parsed()) return cmd_nash_verify(opt);
    if (c_scan->parsed()) return cmd_scan(opt);
    if (c_gda->parsed()) return cmd_gda(opt);
    if (c_sub->parsed()) return cmd_subgrad(opt);
    if (c_enum->parsed()) return cmd_enumerate(opt);
    if (c_sim->parsed()) return cmd_simulate(opt);
    if (c_counter->parsed()) return cmd_counterexamples(opt);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const samg::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const samg::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const samg::SizeGuardError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace samg::cli
