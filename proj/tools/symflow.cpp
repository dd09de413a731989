#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "symflow/scenarios.hpp"

namespace {

using symflow::Json;
using symflow::Outcome;

struct Sink {
  std::ofstream file;
  std::ostream* out = &std::cout;
  bool pretty = false;

  void open(const std::string& path) {
    file.open(path);
    if (!file) throw symflow::schema_error(path, "cannot open output file");
    out = &file;
  }
  void write(const Json& j) { *out << (pretty ? j.dump(2) : j.dump()) << '\n'; }
};

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw symflow::schema_error(path, "cannot read file");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw symflow::schema_error(path, e.what());
  }
}

int fail(const std::exception& e, Outcome o) {
  std::cerr << "symflow: " << e.what() << '\n';
  return symflow::exit_code(o);
}

int run_scenarios(const std::vector<symflow::Scenario>& scenarios, Sink& sink, bool timing) {
  Outcome worst = Outcome::Pass;
  for (const auto& sc : scenarios) {
    symflow::ScenarioResult r = symflow::run_scenario(sc, timing);
    sink.write(r.report);
    worst = symflow::worse(worst, r.outcome);
  }
  return symflow::exit_code(worst);
}

int cmd_run(const std::string& path, const std::string& out, bool pretty, bool timing, double tol) {
  try {
    symflow::ScenarioFile f = symflow::parse_scenario_file(read_json(path), tol);
    Sink sink;
    sink.pretty = pretty || f.pretty.value_or(false);
    const std::string target = out.empty() ? f.out.value_or("") : out;
    if (!target.empty()) sink.open(target);
    return run_scenarios(f.scenarios, sink, timing || f.timing.value_or(false));
  } catch (const symflow::Error& e) {
    return fail(e, symflow::outcome_of(e.kind()));
  }
}

// The file holds the inputs of a single model scenario.
int cmd_model(const std::string& kind, const std::string& path, const std::string& out, bool pretty, double tol) {
  try {
    Json scenario{{"name", "model_" + kind}, {"op", "model_" + kind}, {"inputs", read_json(path)}};
    Sink sink;
    sink.pretty = pretty;
    if (!out.empty()) sink.open(out);
    return run_scenarios({symflow::parse_scenario(scenario, path, tol)}, sink, false);
  } catch (const symflow::Error& e) {
    return fail(e, symflow::outcome_of(e.kind()));
  }
}

void print_summary(std::ostream& os, const symflow::SuiteReport& r) {
  os << "== " << r.suite << ": " << r.tests << '\n';
  os << "   seed " << r.seed << ", " << r.count << " trials, " << r.draws << " draws\n";
  for (const auto& t : r.tallies) {
    os << "   " << (t.passed == t.total ? "ok  " : "FAIL") << ' ' << t.passed << '/' << t.total << "  " << t.identity
       << '\n';
    for (const auto& f : t.failures) os << "        " << f << '\n';
  }
  for (const auto& e : r.errors) os << "   error: " << e << '\n';
  if (r.resolution_failures > 0) os << "   resolution failures: " << r.resolution_failures << '\n';
  os << "   " << (r.pass() ? "PASS" : "FAIL") << '\n';
}

int cmd_verify(const std::string& suite, std::uint64_t seed, int count, bool json, const std::string& out) {
  std::vector<std::string> names;
  if (suite == "all") {
    names = symflow::suite_names();
  } else {
    const auto& all = symflow::suite_names();
    if (std::find(all.begin(), all.end(), suite) == all.end()) {
      std::cerr << "symflow: unknown suite '" << suite << "'\n";
      return symflow::exit_code(Outcome::InputError);
    }
    names = {suite};
  }
  Sink sink;
  if (!out.empty()) {
    try {
      sink.open(out);
    } catch (const symflow::Error& e) {
      return fail(e, Outcome::InputError);
    }
  }
  Outcome worst = Outcome::Pass;
  for (const auto& name : names) {
    symflow::SuiteReport r = symflow::run_suite(name, seed, count);
    if (json)
      sink.write(symflow::scenario_detail::suite_json(r));
    else
      print_summary(*sink.out, r);
    sink.out->flush();
    Outcome o = r.resolution_failures > 0 ? Outcome::ResolutionFailure
                : r.identities_hold()     ? Outcome::Pass
                                          : Outcome::IdentityFailure;
    worst = symflow::worse(worst, o);
  }
  return symflow::exit_code(worst);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symplectic invariants, spectral flow and a solvable model Dirac operator"};
  app.require_subcommand(1);
  double tol = -1.0;
  app.add_option("--tol", tol, "Numerical tolerance (overrides SYMFLOW_TOL and file settings)")
      ->check(CLI::PositiveNumber);

  std::string file, out;
  bool pretty = false, timing = false;
  auto* run = app.add_subcommand("run", "Run the scenarios in a JSON file, one report per line");
  run->add_option("file", file, "Scenario file")->required();
  run->add_option("--out", out, "Write reports to this file");
  run->add_flag("--pretty", pretty, "Indented JSON");
  run->add_flag("--timing", timing, "Add wall_time_ms to each report");

  std::string suite;
  std::uint64_t seed = 42;
  int count = 0;
  bool json = false;
  auto* verify = app.add_subcommand("verify", "Run seeded property suites");
  verify->add_option("suite", suite, "Suite name or 'all'")->required();
  verify->add_option("--seed", seed, "Random seed");
  verify->add_option("--count", count, "Trials per suite (default: each suite's own size)")->check(CLI::NonNegativeNumber);
  verify->add_flag("--json", json, "JSON summary, one line per suite");
  verify->add_option("--out", out, "Write the summary to this file");

  std::string kind;
  auto* model = app.add_subcommand("model", "Run one model computation on an inputs file");
  model->add_option("kind", kind, "spectrum, cauchy, stretch, glue, caldconst or modz")
      ->required()
      ->check(CLI::IsMember({"spectrum", "cauchy", "stretch", "glue", "caldconst", "modz"}));
  model->add_option("file", file, "Inputs file")->required();
  model->add_option("--out", out, "Write the report to this file");
  model->add_flag("--pretty", pretty, "Indented JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : symflow::exit_code(Outcome::InputError);
  }

  if (*run) return cmd_run(file, out, pretty, timing, tol);
  if (*verify) return cmd_verify(suite, seed, count, json, out);
  return cmd_model(kind, file, out, pretty, tol);
}
