#pragma once

// Deterministic single-tape Turing machines over a two-way infinite tape.
//
// Conventions: symbol 0 is the blank, there is no Stay move, and a machine
// halts when no transition is defined for (state, scanned symbol).

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cwb {

using State = std::uint32_t;
using Symbol = std::uint32_t;
using Position = std::int64_t;

inline constexpr Symbol kBlank = 0;

enum class Move : std::uint8_t { Left, Right };

struct Transition {
  Symbol write = kBlank;
  Move move = Move::Right;
  State next = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A validated transition table. Entries are indexed by (state, symbol);
/// an empty entry means the machine halts in that configuration.
class Machine {
 public:
  Machine(std::uint32_t state_count, std::uint32_t alphabet_size,
          State start = 0)
      : state_count_(state_count),
        alphabet_size_(alphabet_size),
        start_(start) {
    if (state_count == 0) throw ValidationError("machine needs at least one state");
    if (alphabet_size == 0) throw ValidationError("alphabet must contain the blank");
    if (start >= state_count)
      throw ValidationError("start state " + std::to_string(start) + " out of range");
    table_.resize(std::size_t{state_count} * alphabet_size);
  }

  /// Defines the transition for (state, scanned). Redefinition is rejected so
  /// that a table built from text can never silently become nondeterministic.
  Machine& set(State state, Symbol scanned, Transition t) {
    check_state(state);
    check_symbol(scanned);
    check_state(t.next);
    check_symbol(t.write);
    auto& slot = table_[index(state, scanned)];
    if (slot) {
      throw ValidationError("duplicate transition for state " + std::to_string(state) +
                            " symbol " + std::to_string(scanned));
    }
    slot = t;
    return *this;
  }

  const std::optional<Transition>& lookup(State state, Symbol scanned) const {
    return table_[index(state, scanned)];
  }

  std::uint32_t state_count() const { return state_count_; }
  std::uint32_t alphabet_size() const { return alphabet_size_; }
  State start() const { return start_; }

  std::size_t transition_count() const {
    std::size_t n = 0;
    for (const auto& t : table_) n += t.has_value();
    return n;
  }

  friend bool operator==(const Machine&, const Machine&) = default;

 private:
  std::size_t index(State s, Symbol a) const {
    return std::size_t{s} * alphabet_size_ + a;
  }
  void check_state(State s) const {
    if (s >= state_count_) throw ValidationError("state " + std::to_string(s) + " out of range");
  }
  void check_symbol(Symbol a) const {
    if (a >= alphabet_size_) throw ValidationError("symbol " + std::to_string(a) + " out of range");
  }

  std::uint32_t state_count_;
  std::uint32_t alphabet_size_;
  State start_;
  std::vector<std::optional<Transition>> table_;
};

/// Canonical snapshot of a configuration. The tape map never stores blanks,
/// so structural equality coincides with configuration equality.
struct InstantaneousDescription {
  State state = 0;
  Position head = 0;
  std::map<Position, Symbol> tape;

  Symbol scanned() const {
    auto it = tape.find(head);
    return it == tape.end() ? kBlank : it->second;
  }

  bool canonical() const {
    for (const auto& [pos, sym] : tape)
      if (sym == kBlank) return false;
    return true;
  }

  friend bool operator==(const InstantaneousDescription&,
                         const InstantaneousDescription&) = default;
};

using ID = InstantaneousDescription;

struct Halt {
  friend bool operator==(const Halt&, const Halt&) = default;
};
using StepResult = std::variant<ID, Halt>;

inline ID initial_id(const Machine& m, std::span<const Symbol> input) {
  ID id;
  id.state = m.start();
  for (std::size_t i = 0; i < input.size(); ++i) {
    if (input[i] >= m.alphabet_size())
      throw ValidationError("input symbol " + std::to_string(input[i]) + " out of range");
    if (input[i] != kBlank) id.tape.emplace(static_cast<Position>(i), input[i]);
  }
  return id;
}

inline StepResult step(const Machine& m, const ID& id) {
  const auto& t = m.lookup(id.state, id.scanned());
  if (!t) return Halt{};
  ID next = id;
  if (t->write == kBlank)
    next.tape.erase(id.head);
  else
    next.tape[id.head] = t->write;
  next.head += t->move == Move::Right ? 1 : -1;
  next.state = t->next;
  return next;
}

/// Mutable tape for hot simulation loops: a dense window that grows on demand
/// in either direction. Converts to and from the canonical ID.
class Tape {
 public:
  Tape() : cells_(kChunk, kBlank), origin_(kChunk / 2) {}

  Symbol read(Position p) const {
    const auto i = p + origin_;
    if (i < 0 || i >= static_cast<Position>(cells_.size())) return kBlank;
    return cells_[static_cast<std::size_t>(i)];
  }

  /// Returns the symbol previously stored at p.
  Symbol write(Position p, Symbol s) {
    reserve(p);
    auto& cell = cells_[static_cast<std::size_t>(p + origin_)];
    const Symbol old = cell;
    cell = s;
    non_blank_ += (s != kBlank) - (old != kBlank);
    return old;
  }

  std::size_t non_blank() const { return non_blank_; }

  std::map<Position, Symbol> snapshot() const {
    std::map<Position, Symbol> out;
    for (std::size_t i = 0; i < cells_.size(); ++i)
      if (cells_[i] != kBlank)
        out.emplace_hint(out.end(), static_cast<Position>(i) - origin_, cells_[i]);
    return out;
  }

 private:
  static constexpr Position kChunk = 256;

  void reserve(Position p) {
    auto i = p + origin_;
    if (i < 0) {
      const auto grow = std::max<Position>(-i, static_cast<Position>(cells_.size()));
      cells_.insert(cells_.begin(), static_cast<std::size_t>(grow), kBlank);
      origin_ += grow;
    } else if (i >= static_cast<Position>(cells_.size())) {
      const auto grow = std::max<Position>(i - static_cast<Position>(cells_.size()) + 1,
                                           static_cast<Position>(cells_.size()));
      cells_.insert(cells_.end(), static_cast<std::size_t>(grow), kBlank);
    }
  }

  std::vector<Symbol> cells_;
  Position origin_;
  std::size_t non_blank_ = 0;
};

/// In-place simulator used by run() and the loop oracle.
class Simulator {
 public:
  Simulator(const Machine& m, std::span<const Symbol> input) : machine_(&m) {
    const ID id = initial_id(m, input);
    state_ = id.state;
    for (const auto& [pos, sym] : id.tape) tape_.write(pos, sym);
  }

  bool halted() const { return !machine_->lookup(state_, tape_.read(head_)); }

  /// Executes one transition. Precondition: !halted().
  /// Returns (position, old symbol, new symbol) of the written cell.
  struct Write {
    Position pos;
    Symbol before;
    Symbol after;
  };
  Write advance() {
    const Transition& t = *machine_->lookup(state_, tape_.read(head_));
    const Position pos = head_;
    const Symbol before = tape_.write(pos, t.write);
    head_ += t.move == Move::Right ? 1 : -1;
    state_ = t.next;
    ++steps_;
    return {pos, before, t.write};
  }

  ID id() const { return ID{state_, head_, tape_.snapshot()}; }

  State state() const { return state_; }
  Position head() const { return head_; }
  std::uint64_t steps() const { return steps_; }
  const Tape& tape() const { return tape_; }
  const Machine& machine() const { return *machine_; }

 private:
  const Machine* machine_;
  Tape tape_;
  State state_ = 0;
  Position head_ = 0;
  std::uint64_t steps_ = 0;
};

struct PlainRun {
  enum class Status { Halted, BudgetExceeded };
  Status status;
  std::uint64_t steps;
  ID last;
};

/// Simulates without any loop detection. Reports the exact step count on halt.
inline PlainRun run(const Machine& m, std::span<const Symbol> input, std::uint64_t budget) {
  Simulator sim(m, input);
  while (!sim.halted()) {
    if (sim.steps() == budget) return {PlainRun::Status::BudgetExceeded, sim.steps(), sim.id()};
    sim.advance();
  }
  return {PlainRun::Status::Halted, sim.steps(), sim.id()};
}

/// ID after exactly n steps, or nullopt if the machine halts first.
inline std::optional<ID> id_at(const Machine& m, std::span<const Symbol> input, std::uint64_t n) {
  Simulator sim(m, input);
  while (sim.steps() < n) {
    if (sim.halted()) return std::nullopt;
    sim.advance();
  }
  return sim.id();
}

namespace machines {

/// q0 on blank: write blank, R, q1; q1 on blank: write blank, L, q0.
inline Machine ping_pong() {
  Machine m(2, 1);
  m.set(0, 0, {0, Move::Right, 1});
  m.set(1, 0, {0, Move::Left, 0});
  return m;
}

/// q0 on blank: write 1, R, q0. Never halts, never repeats a configuration.
inline Machine right_runner() {
  Machine m(1, 2);
  m.set(0, 0, {1, Move::Right, 0});
  return m;
}

inline Machine empty(std::uint32_t states = 1, std::uint32_t symbols = 1) {
  return Machine(states, symbols);
}

}  // namespace machines

}  // namespace cwb
