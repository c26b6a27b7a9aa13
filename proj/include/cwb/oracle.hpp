#pragma once

// Loop oracle: simulate a machine while recording every instantaneous
// description, and report self-termination as soon as one recurs.
//
// The history stores 64-bit fingerprints of IDs, maintained incrementally
// (Zobrist style) so that recording costs O(1) per step regardless of tape
// size. A fingerprint hit is never trusted on its own: the earlier ID is
// recomputed by deterministic replay and compared cell-for-cell with the
// current one before a loop is reported.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "cwb/tm.hpp"

namespace cwb {

struct Halted {
  std::uint64_t steps;
  ID final_id;
  friend bool operator==(const Halted&, const Halted&) = default;
};

struct LoopDetected {
  std::uint64_t first_index;
  std::uint64_t period;
  friend bool operator==(const LoopDetected&, const LoopDetected&) = default;
};

struct BudgetExceeded {
  std::uint64_t steps;
  ID last_id;
  bool history_capped = false;
  friend bool operator==(const BudgetExceeded&, const BudgetExceeded&) = default;
};

using RunOutcome = std::variant<Halted, LoopDetected, BudgetExceeded>;

inline std::string outcome_name(const RunOutcome& o) {
  switch (o.index()) {
    case 0: return "halted";
    case 1: return "loop";
    default: return "budget";
  }
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t cell_key(Position pos, Symbol sym) {
  return splitmix64(static_cast<std::uint64_t>(pos) * 0x100000001b3ULL ^
                    (std::uint64_t{sym} << 1 | 1));
}

inline std::uint64_t head_key(State state, Position head) {
  return splitmix64(splitmix64(std::uint64_t{state} + 0x51ed27) ^ static_cast<std::uint64_t>(head));
}

}  // namespace detail

/// Fingerprint of a canonical ID: sum of per-cell keys plus a (state, head) key.
inline std::uint64_t fingerprint(const ID& id) {
  std::uint64_t cells = 0;
  for (const auto& [pos, sym] : id.tape) cells += detail::cell_key(pos, sym);
  return cells + detail::head_key(id.state, id.head);
}

/// Step index of the first occurrence of every distinct ID seen so far,
/// keyed by fingerprint. Colliding fingerprints keep all their indices.
class History {
 public:
  const std::vector<std::uint64_t>* candidates(std::uint64_t fp) const {
    auto it = index_.find(fp);
    return it == index_.end() ? nullptr : &it->second;
  }

  void record(std::uint64_t fp, std::uint64_t step) {
    index_[fp].push_back(step);
    ++entries_;
  }

  std::size_t size() const { return entries_; }

 private:
  std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> index_;
  std::size_t entries_ = 0;
};

struct OracleOptions {
  /// Maximum number of history entries; exceeding it ends the run with
  /// BudgetExceeded{history_capped = true}.
  std::size_t history_cap = std::numeric_limits<std::size_t>::max();
};

/// A resumable oracled run. advance() may be called repeatedly with small
/// step grants (the trio scheduler does this); the outcome is the same as a
/// single call with the summed grant.
class OracleRun {
 public:
  OracleRun(const Machine& m, std::vector<Symbol> input, OracleOptions opts = {})
      : machine_(m), input_(std::move(input)), sim_(machine_, input_), opts_(opts) {
    cells_ = fingerprint(sim_.id()) - detail::head_key(sim_.state(), sim_.head());
    history_.record(current_fp(), 0);
  }

  OracleRun(const OracleRun&) = delete;
  OracleRun& operator=(const OracleRun&) = delete;

  /// Executes at most `steps` transitions. Returns the verdict once one is
  /// reached; nullopt means the grant was used up with no verdict.
  std::optional<RunOutcome> advance(std::uint64_t steps) {
    if (verdict_) return verdict_;
    for (std::uint64_t k = 0; k < steps; ++k) {
      if (sim_.halted()) return finish(Halted{sim_.steps(), sim_.id()});
      const auto w = sim_.advance();
      if (w.before != kBlank) cells_ -= detail::cell_key(w.pos, w.before);
      if (w.after != kBlank) cells_ += detail::cell_key(w.pos, w.after);

      const auto fp = current_fp();
      if (const auto* hits = history_.candidates(fp)) {
        for (const auto first : *hits) {
          if (confirm(first)) return finish(LoopDetected{first, sim_.steps() - first});
        }
      }
      if (history_.size() >= opts_.history_cap) {
        return finish(BudgetExceeded{sim_.steps(), sim_.id(), true});
      }
      history_.record(fp, sim_.steps());
    }
    if (sim_.halted()) return finish(Halted{sim_.steps(), sim_.id()});
    return std::nullopt;
  }

  std::uint64_t steps() const { return sim_.steps(); }
  const History& history() const { return history_; }
  const Simulator& simulator() const { return sim_; }
  const std::optional<RunOutcome>& verdict() const { return verdict_; }
  std::uint64_t confirmations() const { return confirmations_; }

 private:
  std::uint64_t current_fp() const { return cells_ + detail::head_key(sim_.state(), sim_.head()); }

  // Exact equality check against the ID at step `first`, recomputed by replay.
  bool confirm(std::uint64_t first) {
    ++confirmations_;
    if (first == sim_.steps()) return false;
    Simulator replay(machine_, input_);
    while (replay.steps() < first) replay.advance();
    if (replay.state() != sim_.state() || replay.head() != sim_.head()) return false;
    return replay.id() == sim_.id();
  }

  RunOutcome finish(RunOutcome o) {
    verdict_ = std::move(o);
    return *verdict_;
  }

  Machine machine_;
  std::vector<Symbol> input_;
  Simulator sim_;
  OracleOptions opts_;
  History history_;
  std::uint64_t cells_ = 0;
  std::uint64_t confirmations_ = 0;
  std::optional<RunOutcome> verdict_;
};

/// Runs with at most `budget` executed steps. A loop of period p starting at
/// step i is reported at step i + p exactly.
inline RunOutcome run_with_oracle(const Machine& m, std::span<const Symbol> input,
                                  std::uint64_t budget, OracleOptions opts = {}) {
  OracleRun run(m, {input.begin(), input.end()}, opts);
  if (auto v = run.advance(budget)) return *v;
  return BudgetExceeded{run.steps(), run.simulator().id(), false};
}

/// Re-simulates without the oracle and confirms the outcome: halting at the
/// reported step, equal IDs at first_index and first_index + period, or no
/// halt within the reported budget.
inline bool replay_verify(const Machine& m, std::span<const Symbol> input,
                          const RunOutcome& outcome) {
  if (const auto* h = std::get_if<Halted>(&outcome)) {
    const auto r = run(m, input, h->steps);
    return r.status == PlainRun::Status::Halted && r.steps == h->steps && r.last == h->final_id;
  }
  if (const auto* l = std::get_if<LoopDetected>(&outcome)) {
    if (l->period == 0) return false;
    const auto a = id_at(m, input, l->first_index);
    const auto b = id_at(m, input, l->first_index + l->period);
    return a && b && *a == *b;
  }
  const auto& b = std::get<BudgetExceeded>(outcome);
  const auto last = id_at(m, input, b.steps);
  return last && *last == b.last_id;
}

}  // namespace cwb
