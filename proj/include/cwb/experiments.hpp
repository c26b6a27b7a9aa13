#pragma once

// Batch harness: exhaustive enumeration of small machine classes, oracle
// classification with replay audit, CSV reports, and trio fixture suites.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "cwb/dsl.hpp"
#include "cwb/oracle.hpp"
#include "cwb/tm.hpp"
#include "cwb/trio.hpp"

namespace cwb {

inline constexpr std::uint64_t kMaxClassSize = 10'000'000;

/// All partial transition tables over `states` x `symbols`. Each table entry
/// is a digit: 0 = undefined, otherwise 1 + ((write * 2 + move) * states + next)
/// with move L = 0, R = 1. Machine i of the class is the table whose digits,
/// read row-major from (state 0, symbol 0), spell i in that mixed radix.
struct MachineClass {
  std::uint32_t states = 1;
  std::uint32_t symbols = 1;

  std::uint64_t entry_choices() const { return 1 + std::uint64_t{symbols} * 2 * states; }

  /// Number of machines, or nullopt if it exceeds the enumeration guard.
  std::optional<std::uint64_t> size() const {
    std::uint64_t n = 1;
    const auto entries = std::uint64_t{states} * symbols;
    for (std::uint64_t i = 0; i < entries; ++i) {
      if (n > kMaxClassSize / entry_choices()) return std::nullopt;
      n *= entry_choices();
    }
    return n;
  }

  std::uint64_t checked_size() const {
    if (states == 0 || symbols == 0) throw ValidationError("class needs states and symbols >= 1");
    auto n = size();
    if (!n)
      throw std::length_error("class " + std::to_string(states) + "x" + std::to_string(symbols) +
                              " exceeds the enumeration guard of " +
                              std::to_string(kMaxClassSize) + " machines");
    return *n;
  }

  Machine machine(std::uint64_t index) const {
    Machine m(states, symbols);
    const auto base = entry_choices();
    const auto entries = std::size_t{states} * symbols;
    std::vector<std::uint64_t> digits(entries);
    for (std::size_t k = entries; k-- > 0;) {
      digits[k] = index % base;
      index /= base;
    }
    for (std::size_t k = 0; k < entries; ++k) {
      if (digits[k] == 0) continue;
      const auto d = digits[k] - 1;
      const auto next = static_cast<State>(d % states);
      const auto wm = d / states;
      m.set(static_cast<State>(k / symbols), static_cast<Symbol>(k % symbols),
            {static_cast<Symbol>(wm / 2), wm % 2 ? Move::Right : Move::Left, next});
    }
    return m;
  }
};

inline void enumerate_class(const MachineClass& cls,
                            const std::function<void(std::uint64_t, const Machine&)>& visit) {
  const auto n = cls.checked_size();
  for (std::uint64_t i = 0; i < n; ++i) visit(i, cls.machine(i));
}

/// Compact table code: states A, B, ... separated by '_', one triple per
/// scanned symbol (write, move, next) or "---" when undefined. "1RB1LB_1LA---".
inline std::string machine_code(const Machine& m) {
  std::string s;
  for (State q = 0; q < m.state_count(); ++q) {
    if (q) s += '_';
    for (Symbol a = 0; a < m.alphabet_size(); ++a) {
      const auto& t = m.lookup(q, a);
      if (!t) {
        s += "---";
        continue;
      }
      s += std::to_string(t->write);
      s += t->move == Move::Left ? 'L' : 'R';
      if (m.state_count() <= 26)
        s += static_cast<char>('A' + t->next);
      else
        s += "q" + std::to_string(t->next) + ";";
    }
  }
  return s;
}

struct ClassificationRow {
  std::string machine_id;
  RunOutcome outcome;
  bool audit = false;

  std::uint64_t steps() const {
    return std::visit(
        [](const auto& o) -> std::uint64_t {
          using T = std::decay_t<decltype(o)>;
          if constexpr (std::is_same_v<T, LoopDetected>) return o.first_index + o.period;
          else return o.steps;
        },
        outcome);
  }
};

struct ClassificationSummary {
  std::uint64_t machines = 0;
  std::uint64_t halted = 0;
  std::uint64_t looped = 0;
  std::uint64_t budget_exceeded = 0;
  std::uint64_t history_capped = 0;
  std::uint64_t audit_failures = 0;
  std::uint64_t max_halting_step = 0;
  std::uint64_t budget = 0;
  std::size_t history_cap = 0;
  double wall_seconds = 0;
};

struct ClassificationReport {
  std::vector<ClassificationRow> rows;
  ClassificationSummary summary;
};

struct ClassifyOptions {
  std::uint64_t budget = 10'000;
  std::size_t history_cap = 100'000;
  std::vector<Symbol> input;  // blank tape by default
  unsigned threads = 1;
};

inline ClassificationRow classify_machine(const Machine& m, const ClassifyOptions& opt) {
  ClassificationRow row;
  row.machine_id = machine_code(m);
  row.outcome = run_with_oracle(m, opt.input, opt.budget, OracleOptions{opt.history_cap});
  row.audit = replay_verify(m, opt.input, row.outcome);
  return row;
}

/// Runs the oracle with replay audit on every machine of the class. Rows are
/// in canonical class order whatever the thread count.
inline ClassificationReport classify_all(const MachineClass& cls, const ClassifyOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  const auto n = cls.checked_size();
  for (auto s : opt.input)
    if (s >= cls.symbols) throw ValidationError("input symbol out of range for class");

  ClassificationReport rep;
  rep.rows.resize(n);
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.threads, static_cast<unsigned>(n)));
  auto work = [&](unsigned w) {
    for (std::uint64_t i = w; i < n; i += workers) rep.rows[i] = classify_machine(cls.machine(i), opt);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  auto& s = rep.summary;
  s.machines = n;
  s.budget = opt.budget;
  s.history_cap = opt.history_cap;
  for (const auto& r : rep.rows) {
    if (const auto* h = std::get_if<Halted>(&r.outcome)) {
      ++s.halted;
      s.max_halting_step = std::max(s.max_halting_step, h->steps);
    } else if (std::holds_alternative<LoopDetected>(r.outcome)) {
      ++s.looped;
    } else {
      ++s.budget_exceeded;
      s.history_capped += std::get<BudgetExceeded>(r.outcome).history_capped;
    }
    s.audit_failures += !r.audit;
  }
  s.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline constexpr const char* kCsvHeader = "machine_id,outcome,steps,loop_first,loop_period,audit";

inline std::string to_csv(const ClassificationReport& rep) {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rep.rows) {
    os << r.machine_id << ',' << outcome_name(r.outcome) << ',' << r.steps() << ',';
    if (const auto* l = std::get_if<LoopDetected>(&r.outcome))
      os << l->first_index << ',' << l->period;
    else
      os << ',';
    os << ',' << (r.audit ? "true" : "false") << '\n';
  }
  return os.str();
}

/// Sidecar summary; the only place wall time appears.
inline std::string summary_json(const ClassificationSummary& s, const MachineClass& cls) {
  nlohmann::ordered_json j;
  j["states"] = cls.states;
  j["symbols"] = cls.symbols;
  j["machines"] = s.machines;
  j["halted"] = s.halted;
  j["loop"] = s.looped;
  j["budget"] = s.budget_exceeded;
  j["history_capped"] = s.history_capped;
  j["audit_failures"] = s.audit_failures;
  j["max_halting_step"] = s.max_halting_step;
  j["step_budget"] = s.budget;
  j["history_cap"] = s.history_cap;
  j["wall_seconds"] = s.wall_seconds;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Trio fixtures

/// Error in a fixture file; carries the offending path.
class FixtureError : public std::runtime_error {
 public:
  FixtureError(const std::filesystem::path& file, const std::string& msg)
      : std::runtime_error(file.string() + ": " + msg), file_(file) {}
  const std::filesystem::path& file() const { return file_; }

 private:
  std::filesystem::path file_;
};

struct Fixture {
  std::string name;
  TrioTask task;
  std::optional<std::string> expect;  // expected verdict name
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw FixtureError(p, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<Natural> parse_naturals(std::string_view text) {
  std::vector<Natural> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) throw std::invalid_argument("empty element in number list");
    out.emplace_back(cur);
    cur.clear();
  };
  bool any = false;
  for (char c : text) {
    if (c == ' ' || c == '\t') continue;
    any = true;
    if (c == ',') flush();
    else if (c >= '0' && c <= '9') cur += c;
    else throw std::invalid_argument(std::string("invalid character '") + c + "' in number list");
  }
  if (any) flush();
  return out;
}

/// Loads a `.task` descriptor: `key=value` lines, '#' comments.
///
///   program=q1.rf        function file, relative to the descriptor
///   function=g           body G (arity n+1)
///   args=                fixed arguments a1..an, comma separated
///   machine=runner.tm    T2 machine file
///   input=               T2 tape input, comma separated symbols
///   quantum=64  budget=1000  max_cert_size=3  history_cap=100000
///   expect=Found         optional expected verdict
inline Fixture load_fixture(const std::filesystem::path& path) {
  const auto text = read_file(path);
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw FixtureError(path, "line " + std::to_string(lineno) + ": expected key=value");
    auto key = trim(line.substr(0, eq));
    if (kv.count(key))
      throw FixtureError(path, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }

  static const std::set<std::string> known{"format", "program", "function", "args",
                                           "machine", "input", "quantum", "budget",
                                           "max_cert_size", "history_cap", "expect"};
  for (const auto& [k, v] : kv)
    if (!known.count(k)) throw FixtureError(path, "unknown key '" + k + "'");
  if (kv.count("format") && kv["format"] != "1")
    throw FixtureError(path, "unsupported format " + kv["format"]);
  for (const char* req : {"program", "function", "machine"})
    if (!kv.count(req)) throw FixtureError(path, std::string("missing key '") + req + "'");

  auto number = [&](const std::string& key, std::uint64_t dflt) -> std::uint64_t {
    if (!kv.count(key)) return dflt;
    try {
      std::size_t used = 0;
      const auto v = std::stoull(kv[key], &used);
      if (used != kv[key].size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw FixtureError(path, "key '" + key + "' needs a non-negative integer");
    }
  };

  const auto dir = path.parent_path();
  Fixture fx;
  fx.name = path.stem().string();
  const auto prog_path = dir / kv["program"];
  const auto machine_path = dir / kv["machine"];
  try {
    const auto prog = parse_program(read_file(prog_path));
    fx.task.g_body = prog.function(kv["function"]);
  } catch (const ParseError& e) {
    throw FixtureError(prog_path, e.what());
  } catch (const std::out_of_range& e) {
    throw FixtureError(prog_path, e.what());
  }
  try {
    fx.task.t2_machine = parse_machine(read_file(machine_path));
  } catch (const ParseError& e) {
    throw FixtureError(machine_path, e.what());
  }
  try {
    fx.task.fixed_args = parse_naturals(kv["args"]);
    for (const auto& s : parse_naturals(kv["input"])) {
      if (s > std::numeric_limits<Symbol>::max()) throw std::invalid_argument("input symbol too large");
      fx.task.t2_input.push_back(static_cast<Symbol>(s));
    }
  } catch (const std::invalid_argument& e) {
    throw FixtureError(path, e.what());
  }
  fx.task.quantum = number("quantum", 64);
  fx.task.budget = number("budget", 1000);
  fx.task.max_cert_size = number("max_cert_size", 3);
  fx.task.t2_history_cap = number("history_cap", 100'000);
  if (kv.count("expect")) fx.expect = kv["expect"];
  try {
    fx.task.validate();
  } catch (const std::invalid_argument& e) {
    throw FixtureError(path, e.what());
  }
  return fx;
}

struct FixtureResult {
  CorpusRecord record;
  std::optional<std::string> expect;
  bool ok() const {
    return record.audit.value_or(true) && (!expect || *expect == record.verdict);
  }
};

struct FixtureReport {
  std::vector<FixtureResult> results;
  bool all_ok() const {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.ok(); });
  }
};

/// Runs every `*.task` file in `dir`, in file-name order.
inline FixtureReport run_fixture_suite(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw FixtureError(dir, "not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".task") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  FixtureReport rep;
  for (const auto& f : files) {
    auto fx = load_fixture(f);
    rep.results.push_back({classify_corpus_entry(fx.name, fx.task), fx.expect});
  }
  return rep;
}

inline std::string to_csv(const FixtureReport& rep) {
  std::ostringstream os;
  os << "fixture,verdict,f_prime,rounds,detail,audit,expected\n";
  for (const auto& r : rep.results) {
    const auto& c = r.record;
    os << c.name << ',' << c.verdict << ',' << c.value << ',' << c.rounds << ",\"" << c.detail << "\","
       << (c.audit ? (*c.audit ? "true" : "false") : "n/a") << ',' << r.expect.value_or("") << '\n';
  }
  return os.str();
}

}  // namespace cwb
