#pragma once

// The parallel trio: three unbounded searches over y, interleaved fairly.
//
//   T1  mu-search for the least y with G(a1..an, y) = 0   (units: fuel)
//   T2  loop-oracled run of a machine for the Boolean test (units: steps)
//   T3  certificate search for "G(a1..an, y) != 0 for all y" (units: candidates)
//
// Scheduling is cooperative and deterministic: each round grants `quantum`
// units to T1, then T2, then T3. The first task to succeed fixes the verdict,
// so within a round T1 wins over T2 and T2 over T3.

#include <array>
#include <limits>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cwb/oracle.hpp"
#include "cwb/proof.hpp"
#include "cwb/recfun.hpp"
#include "cwb/recfun_oracle.hpp"
#include "cwb/tm.hpp"

namespace cwb {

struct TrioTask {
  Expr g_body;
  std::vector<Natural> fixed_args;
  Machine t2_machine = machines::empty();
  std::vector<Symbol> t2_input;
  std::uint64_t quantum = 1;
  std::uint64_t budget = 1000;  // rounds
  std::size_t max_cert_size = 3;
  std::size_t t2_history_cap = std::numeric_limits<std::size_t>::max();

  void validate() const {
    if (!g_body) throw ValidationError("trio task has no function body");
    const auto n = arity(g_body);
    if (n != fixed_args.size() + 1)
      throw ValidationError("body arity " + std::to_string(n) + " needs " +
                            std::to_string(n == 0 ? 0 : n - 1) + " fixed arguments, got " +
                            std::to_string(fixed_args.size()));
    if (quantum == 0) throw ValidationError("quantum must be at least 1");
    if (max_cert_size == 0) throw ValidationError("max certificate size must be at least 1");
    for (auto s : t2_input)
      if (s >= t2_machine.alphabet_size()) throw ValidationError("T2 input symbol out of range");
  }

  Statement statement() const { return {g_body, fixed_args}; }
};

struct Found {
  Natural k;
  std::uint64_t rounds;
};
struct SelfTerminated {
  LoopDetected loop;
  std::uint64_t rounds;
};
struct Proved {
  Certificate cert;
  std::uint64_t rounds;
};
struct Exhausted {
  std::uint64_t rounds;
};

using TrioVerdict = std::variant<Found, SelfTerminated, Proved, Exhausted>;

inline std::string verdict_name(const TrioVerdict& v) {
  switch (v.index()) {
    case 0: return "Found";
    case 1: return "SelfTerminated";
    case 2: return "Proved";
    default: return "Exhausted";
  }
}

enum TaskId : std::size_t { T1 = 0, T2 = 1, T3 = 2 };

struct TrioStats {
  std::uint64_t rounds = 0;  // rounds started
  std::array<std::uint64_t, 3> granted{};
  std::array<std::uint64_t, 3> used{};
  std::array<bool, 3> retired{};
  Natural t1_current_y;  // the y T1 is currently evaluating
};

class Trio {
 public:
  explicit Trio(TrioTask task, std::shared_ptr<const ProofSystem> proofs = nullptr)
      : task_(std::move(task)),
        proofs_(proofs ? std::move(proofs) : std::make_shared<ReferenceRules>()),
        statement_(task_.statement()) {
    task_.validate();
    t2_ = std::make_unique<OracleRun>(task_.t2_machine, task_.t2_input,
                                      OracleOptions{task_.t2_history_cap});
  }

  /// Runs one round. Returns a verdict if some task succeeded in it.
  std::optional<TrioVerdict> round() {
    if (verdict_) return verdict_;
    ++stats_.rounds;
    if (auto v = turn_t1()) return settle(std::move(*v));
    if (auto v = turn_t2()) return settle(std::move(*v));
    if (auto v = turn_t3()) return settle(std::move(*v));
    return std::nullopt;
  }

  TrioVerdict run() {
    while (stats_.rounds < task_.budget) {
      if (auto v = round()) return *v;
    }
    return settle(Exhausted{stats_.rounds});
  }

  const TrioStats& stats() const { return stats_; }
  const TrioTask& task() const { return task_; }
  const ProofSystem& proofs() const { return *proofs_; }

 private:
  TrioVerdict settle(TrioVerdict v) {
    verdict_ = v;
    return v;
  }

  std::optional<TrioVerdict> turn_t1() {
    stats_.granted[T1] += task_.quantum;
    std::uint64_t left = task_.quantum;
    while (left > 0) {
      if (!t1_eval_) {
        auto args = task_.fixed_args;
        args.push_back(stats_.t1_current_y);
        t1_eval_.emplace(task_.g_body, std::move(args));
      }
      const auto before = t1_eval_->consumed();
      auto value = t1_eval_->resume(left);
      const auto spent = t1_eval_->consumed() - before;
      left -= spent;
      stats_.used[T1] += spent;
      if (!value) break;
      if (*value == 0) return Found{stats_.t1_current_y, stats_.rounds};
      ++stats_.t1_current_y;
      t1_eval_.reset();
    }
    return std::nullopt;
  }

  std::optional<TrioVerdict> turn_t2() {
    stats_.granted[T2] += task_.quantum;
    if (stats_.retired[T2]) return std::nullopt;
    const auto before = t2_->steps();
    auto outcome = t2_->advance(task_.quantum);
    stats_.used[T2] += t2_->steps() - before;
    if (!outcome) return std::nullopt;
    if (const auto* loop = std::get_if<LoopDetected>(&*outcome))
      return SelfTerminated{*loop, stats_.rounds};
    // Halting or running out of history gives T2 nothing to report.
    stats_.retired[T2] = true;
    return std::nullopt;
  }

  std::optional<TrioVerdict> turn_t3() {
    stats_.granted[T3] += task_.quantum;
    for (std::uint64_t k = 0; k < task_.quantum && !stats_.retired[T3]; ++k) {
      while (t3_index_ >= t3_batch_.size()) {
        if (t3_size_ >= task_.max_cert_size) {
          stats_.retired[T3] = true;
          return std::nullopt;
        }
        t3_batch_ = proofs_->certificates_of_size(statement_, ++t3_size_);
        t3_index_ = 0;
      }
      ++stats_.used[T3];
      const auto& cand = t3_batch_[t3_index_++];
      if (proofs_->check(cand, statement_)) return Proved{cand, stats_.rounds};
    }
    return std::nullopt;
  }

  TrioTask task_;
  std::shared_ptr<const ProofSystem> proofs_;
  Statement statement_;
  TrioStats stats_;
  std::optional<Evaluation> t1_eval_;
  std::unique_ptr<OracleRun> t2_;
  std::vector<Certificate> t3_batch_;
  std::size_t t3_index_ = 0;
  std::size_t t3_size_ = 0;
  std::optional<TrioVerdict> verdict_;
};

inline TrioVerdict run_trio(const TrioTask& task) { return Trio(task).run(); }

struct Undetermined {};
using ExtendedValue = std::variant<Natural, Undetermined>;

/// The total extension F' at the task's fixed arguments: the mu-value when T1
/// wins, 0 when T2 or T3 wins, and no value when the budget ran out.
inline ExtendedValue extend_value(const TrioVerdict& v) {
  if (const auto* f = std::get_if<Found>(&v)) return f->k;
  if (std::holds_alternative<Exhausted>(v)) return Undetermined{};
  return Natural(0);
}

inline ExtendedValue extend(const TrioTask& task) { return extend_value(run_trio(task)); }

struct CorpusRecord {
  std::string name;
  std::string verdict;
  std::string value;   // F' or "undetermined"
  std::string detail;  // k, loop parameters, or certificate text
  std::uint64_t rounds = 0;
  std::optional<bool> audit;  // nullopt for Exhausted
  TrioVerdict raw;
};

/// Independent audit of a verdict:
///   Found   every y < k evaluates (by the reference evaluator) to a nonzero
///           value and y = k evaluates to 0;
///   SelfTerminated  the loop replays;
///   Proved  the certificate re-checks.
inline std::optional<bool> audit_verdict(const TrioTask& task, const TrioVerdict& v,
                                         const TrioStats& stats, const ProofSystem& proofs) {
  if (const auto* f = std::get_if<Found>(&v)) {
    // T1 evaluated every y <= k within its total grant, so that grant is
    // enough fuel for each single evaluation here.
    const auto fuel = stats.granted[T1];
    for (Natural y = 0; y <= f->k; ++y) {
      auto args = task.fixed_args;
      args.push_back(y);
      const auto r = oracle_eval(task.g_body, args, fuel);
      const auto* val = std::get_if<Value>(&r);
      if (!val) return false;
      if ((y < f->k) != (val->v != 0)) return false;
    }
    return true;
  }
  if (const auto* s = std::get_if<SelfTerminated>(&v))
    return replay_verify(task.t2_machine, task.t2_input, s->loop);
  if (const auto* p = std::get_if<Proved>(&v)) return proofs.check(p->cert, task.statement());
  return std::nullopt;
}

inline CorpusRecord classify_corpus_entry(const std::string& name, const TrioTask& task) {
  Trio trio(task);
  const auto v = trio.run();
  CorpusRecord rec;
  rec.name = name;
  rec.verdict = verdict_name(v);
  rec.raw = v;
  const auto fv = extend_value(v);
  rec.value = std::holds_alternative<Natural>(fv) ? std::get<Natural>(fv).str() : "undetermined";
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        rec.rounds = x.rounds;
        if constexpr (std::is_same_v<T, Found>) {
          rec.detail = "k=" + x.k.str();
        } else if constexpr (std::is_same_v<T, SelfTerminated>) {
          rec.detail = "first=" + std::to_string(x.loop.first_index) +
                       " period=" + std::to_string(x.loop.period);
        } else if constexpr (std::is_same_v<T, Proved>) {
          rec.detail = to_string(x.cert);
        } else {
          rec.detail = "budget=" + std::to_string(x.rounds);
        }
      },
      v);
  rec.audit = audit_verdict(task, v, trio.stats(), trio.proofs());
  return rec;
}

}  // namespace cwb
