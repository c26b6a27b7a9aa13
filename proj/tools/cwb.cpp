// cwb: command-line front end for the computability workbench.
//
//   cwb classify --states N --symbols M --budget B [--out report.csv]
//   cwb trio --fixtures DIR
//   cwb eval --program file.rf --name f --args "2,3" --fuel F
//   cwb demo falsify
//
// Exit codes: 0 success, 1 audit failure, 2 usage or input error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cwb/dsl.hpp"
#include "cwb/experiments.hpp"
#include "cwb/oracle.hpp"
#include "cwb/recfun.hpp"
#include "cwb/tm.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kAuditFailure = 1;
constexpr int kUsage = 2;

int classify(std::uint32_t states, std::uint32_t symbols, const cwb::ClassifyOptions& opt,
             const std::string& out) {
  const cwb::MachineClass cls{states, symbols};
  const auto rep = cwb::classify_all(cls, opt);
  const auto csv = cwb::to_csv(rep);
  const auto summary = cwb::summary_json(rep.summary, cls);
  if (out.empty()) {
    std::cout << csv;
    std::cerr << summary;
  } else {
    std::ofstream(out, std::ios::binary) << csv;
    std::ofstream(out + ".summary.json", std::ios::binary) << summary;
    std::cout << summary;
  }
  return rep.summary.audit_failures == 0 ? kOk : kAuditFailure;
}

int trio(const std::string& dir) {
  const auto rep = cwb::run_fixture_suite(dir);
  std::cout << cwb::to_csv(rep);
  for (const auto& r : rep.results)
    if (!r.ok()) std::cerr << "FAILED: " << r.record.name << '\n';
  return rep.all_ok() ? kOk : kAuditFailure;
}

int eval(const std::string& program, const std::string& name, const std::string& args,
         std::uint64_t fuel) {
  cwb::Program prog;
  try {
    prog = cwb::parse_program(cwb::read_file(program));
  } catch (const cwb::ParseError& e) {
    throw std::runtime_error(program + ":" + e.what());
  }
  const auto r = cwb::eval(prog.function(name), cwb::parse_naturals(args), fuel);
  if (const auto* v = std::get_if<cwb::Value>(&r))
    std::cout << v->v << '\n';
  else
    std::cout << "fuel exhausted after " << std::get<cwb::FuelExhausted>(r).consumed << " units\n";
  return kOk;
}

// Right-runner at increasing budgets: never halts, never repeats an ID, so
// the oracle can only ever answer "budget exceeded".
int falsify(std::uint64_t max_budget) {
  const auto m = cwb::machines::right_runner();
  std::cout << "budget,outcome,steps,history_entries,non_blank_cells,monotone\n";
  bool ok = true;
  for (std::uint64_t b = 100; b <= max_budget; b *= 10) {
    cwb::OracleRun run(m, {});
    std::size_t prev = run.simulator().tape().non_blank();
    bool monotone = true;
    std::optional<cwb::RunOutcome> v;
    for (std::uint64_t s = 0; s < b && !v; ++s) {
      v = run.advance(1);
      const auto now = run.simulator().tape().non_blank();
      monotone = monotone && now > prev;
      prev = now;
    }
    const bool budget = !v;
    ok = ok && budget && monotone;
    std::cout << b << ',' << (budget ? "budget" : cwb::outcome_name(*v)) << ',' << run.steps()
              << ',' << run.history().size() << ',' << prev << ','
              << (monotone ? "true" : "false") << '\n';
  }
  return ok ? kOk : kAuditFailure;
}

std::vector<cwb::Symbol> parse_input(const std::string& text) {
  std::vector<cwb::Symbol> out;
  for (const auto& n : cwb::parse_naturals(text)) out.push_back(static_cast<cwb::Symbol>(n));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Computability workbench: loop oracle, mu-recursive evaluator, trio classifier"};
  app.require_subcommand(1);

  auto* cls = app.add_subcommand("classify", "Enumerate a machine class and classify each machine");
  std::uint32_t states = 0, symbols = 0;
  cwb::ClassifyOptions copt;
  std::string out, input;
  cls->add_option("--states", states, "Number of states")->required()->check(CLI::PositiveNumber);
  cls->add_option("--symbols", symbols, "Alphabet size (0 is blank)")->required()->check(CLI::PositiveNumber);
  cls->add_option("--budget", copt.budget, "Step budget per machine")->capture_default_str();
  cls->add_option("--history-cap", copt.history_cap, "History entries per machine")->capture_default_str();
  cls->add_option("--input", input, "Tape input, comma separated symbols (default blank)");
  cls->add_option("--threads", copt.threads, "Worker threads")->capture_default_str();
  cls->add_option("--out", out, "CSV report path (summary goes to PATH.summary.json)");

  auto* tri = app.add_subcommand("trio", "Run a directory of trio fixtures");
  std::string fixtures;
  tri->add_option("--fixtures", fixtures, "Directory of .task descriptors")->required();

  auto* ev = app.add_subcommand("eval", "Evaluate a function from a .rf program");
  std::string program, name, args;
  std::uint64_t fuel = 1'000'000;
  ev->add_option("--program", program, ".rf file")->required();
  ev->add_option("--name", name, "Definition to evaluate")->required();
  ev->add_option("--args", args, "Comma separated arguments");
  ev->add_option("--fuel", fuel, "Fuel units")->capture_default_str();

  auto* demo = app.add_subcommand("demo", "Demonstrations");
  auto* fal = demo->add_subcommand("falsify", "Right-runner: sound but incomplete oracle");
  std::uint64_t max_budget = 1'000'000;
  fal->add_option("--max-budget", max_budget, "Largest budget (powers of ten from 100)")->capture_default_str();
  demo->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*cls) {
      copt.input = parse_input(input);
      return classify(states, symbols, copt, out);
    }
    if (*tri) return trio(fixtures);
    if (*ev) return eval(program, name, args, fuel);
    if (*fal) return falsify(max_budget);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
