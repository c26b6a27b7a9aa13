#pragma once

// Partial recursive functions: initial functions, composition, primitive
// recursion and the unrestricted mu-operator, with a fuel-metered evaluator.
//
// Fuel accounting: every application of a node to an argument tuple costs one
// unit. Nothing else is charged, so the cost of a converging evaluation is the
// number of node applications it performs.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace cwb {

using Natural = boost::multiprecision::cpp_int;

struct Node;
using Expr = std::shared_ptr<const Node>;

namespace rf {
struct Zero {};
struct Succ {};
struct Proj {
  std::uint32_t index;  // 1-based
  std::uint32_t arity;
};
struct Compose {
  Expr outer;
  std::vector<Expr> inners;
};
struct PrimRec {
  Expr base;
  Expr step;
};
struct Mu {
  Expr body;
};
}  // namespace rf

struct Node {
  std::variant<rf::Zero, rf::Succ, rf::Proj, rf::Compose, rf::PrimRec, rf::Mu> v;
};

inline Expr zero() { return std::make_shared<const Node>(Node{rf::Zero{}}); }
inline Expr succ() { return std::make_shared<const Node>(Node{rf::Succ{}}); }
inline Expr proj(std::uint32_t i, std::uint32_t n) {
  return std::make_shared<const Node>(Node{rf::Proj{i, n}});
}
inline Expr compose(Expr outer, std::vector<Expr> inners) {
  return std::make_shared<const Node>(Node{rf::Compose{std::move(outer), std::move(inners)}});
}
inline Expr primrec(Expr base, Expr step) {
  return std::make_shared<const Node>(Node{rf::PrimRec{std::move(base), std::move(step)}});
}
inline Expr mu(Expr body) { return std::make_shared<const Node>(Node{rf::Mu{std::move(body)}}); }

/// Structural equality.
inline bool same(const Expr& a, const Expr& b) {
  if (a == b) return true;
  if (!a || !b || a->v.index() != b->v.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b->v);
        if constexpr (std::is_same_v<T, rf::Proj>) {
          return x.index == y.index && x.arity == y.arity;
        } else if constexpr (std::is_same_v<T, rf::Compose>) {
          if (!same(x.outer, y.outer) || x.inners.size() != y.inners.size()) return false;
          for (std::size_t i = 0; i < x.inners.size(); ++i)
            if (!same(x.inners[i], y.inners[i])) return false;
          return true;
        } else if constexpr (std::is_same_v<T, rf::PrimRec>) {
          return same(x.base, y.base) && same(x.step, y.step);
        } else if constexpr (std::is_same_v<T, rf::Mu>) {
          return same(x.body, y.body);
        } else {
          return true;
        }
      },
      a->v);
}

inline std::size_t node_count(const Expr& e) {
  return std::visit(
      [](const auto& x) -> std::size_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, rf::Compose>) {
          std::size_t n = 1 + node_count(x.outer);
          for (const auto& g : x.inners) n += node_count(g);
          return n;
        } else if constexpr (std::is_same_v<T, rf::PrimRec>) {
          return 1 + node_count(x.base) + node_count(x.step);
        } else if constexpr (std::is_same_v<T, rf::Mu>) {
          return 1 + node_count(x.body);
        } else {
          return 1;
        }
      },
      e->v);
}

/// Arity violation; `path` locates the offending subterm from the root,
/// e.g. "compose.inner[1].primrec.step".
class ArityError : public std::invalid_argument {
 public:
  ArityError(std::string path, const std::string& what)
      : std::invalid_argument(what + " at " + (path.empty() ? std::string("<root>") : path)),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

namespace detail {

inline std::string join_path(const std::string& base, const std::string& part) {
  return base.empty() ? part : base + "." + part;
}

inline std::uint32_t arity_at(const Expr& e, const std::string& path) {
  if (!e) throw ArityError(path, "null expression");
  return std::visit(
      [&](const auto& x) -> std::uint32_t {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, rf::Zero> || std::is_same_v<T, rf::Succ>) {
          return 1;
        } else if constexpr (std::is_same_v<T, rf::Proj>) {
          if (x.index < 1 || x.index > x.arity)
            throw ArityError(path, "proj " + std::to_string(x.index) + " " +
                                       std::to_string(x.arity) + " needs 1 <= i <= n");
          return x.arity;
        } else if constexpr (std::is_same_v<T, rf::Compose>) {
          if (x.inners.empty()) throw ArityError(path, "compose needs at least one inner function");
          const auto outer = arity_at(x.outer, join_path(path, "compose.outer"));
          if (outer != x.inners.size())
            throw ArityError(path, "compose outer has arity " + std::to_string(outer) + " but " +
                                       std::to_string(x.inners.size()) + " inner functions");
          std::optional<std::uint32_t> n;
          for (std::size_t i = 0; i < x.inners.size(); ++i) {
            const auto a =
                arity_at(x.inners[i], join_path(path, "compose.inner[" + std::to_string(i) + "]"));
            if (n && *n != a)
              throw ArityError(join_path(path, "compose.inner[" + std::to_string(i) + "]"),
                               "inner arity " + std::to_string(a) + " differs from " +
                                   std::to_string(*n));
            n = a;
          }
          return *n;
        } else if constexpr (std::is_same_v<T, rf::PrimRec>) {
          const auto b = arity_at(x.base, join_path(path, "primrec.base"));
          const auto s = arity_at(x.step, join_path(path, "primrec.step"));
          if (s != b + 2)
            throw ArityError(path, "primrec step arity " + std::to_string(s) +
                                       " must be base arity + 2 = " + std::to_string(b + 2));
          return b + 1;
        } else {
          const auto g = arity_at(x.body, join_path(path, "mu.body"));
          if (g == 0) throw ArityError(path, "mu body must take at least one argument");
          return g - 1;
        }
      },
      e->v);
}

}  // namespace detail

inline std::uint32_t arity(const Expr& e) { return detail::arity_at(e, ""); }

struct Value {
  Natural v;
  friend bool operator==(const Value&, const Value&) = default;
};
struct FuelExhausted {
  std::uint64_t consumed;
  friend bool operator==(const FuelExhausted&, const FuelExhausted&) = default;
};
using EvalResult = std::variant<Value, FuelExhausted>;

/// Called whenever a Mu node returns: (the mu node, its arguments, the result).
using MuObserver = std::function<void(const Node&, std::span<const Natural>, const Natural&)>;

/// Resumable evaluation with an explicit frame stack. resume() may be called
/// repeatedly with fuel grants; the result and total cost do not depend on
/// how the fuel is split across calls.
class Evaluation {
 public:
  Evaluation(Expr expr, std::vector<Natural> args, MuObserver observer = {})
      : root_(std::move(expr)), observer_(std::move(observer)) {
    const auto n = arity(root_);
    if (n != args.size())
      throw ArityError("", "expression of arity " + std::to_string(n) + " applied to " +
                               std::to_string(args.size()) + " arguments");
    stack_.push_back(Frame{root_.get(), std::move(args)});
  }

  /// Runs with at most `fuel` further units. Returns the value once known.
  std::optional<Natural> resume(std::uint64_t fuel) {
    if (result_) return result_;
    while (!stack_.empty()) {
      if (!stack_.back().started) {
        if (fuel == 0) return std::nullopt;
        --fuel;
        ++consumed_;
        stack_.back().started = true;
      }
      step_top();
    }
    return result_;
  }

  std::uint64_t consumed() const { return consumed_; }
  bool done() const { return result_.has_value(); }

 private:
  struct Frame {
    const Node* node;
    std::vector<Natural> args;
    bool started = false;
    int phase = 0;
    Natural counter;
    Natural limit;
    Natural acc;
    std::vector<Natural> collected;
    std::optional<Natural> incoming;
  };

  void finish(Natural v) {
    stack_.pop_back();
    if (stack_.empty())
      result_ = std::move(v);
    else
      stack_.back().incoming = std::move(v);
  }

  void call(const Expr& e, std::vector<Natural> args) {
    stack_.push_back(Frame{e.get(), std::move(args)});
  }

  static std::vector<Natural> extend(std::span<const Natural> prefix, const Natural& a) {
    std::vector<Natural> out(prefix.begin(), prefix.end());
    out.push_back(a);
    return out;
  }

  void step_top() {
    Frame& f = stack_.back();
    const auto& v = f.node->v;
    if (std::holds_alternative<rf::Zero>(v)) return finish(Natural(0));
    if (std::holds_alternative<rf::Succ>(v)) return finish(f.args[0] + 1);
    if (const auto* p = std::get_if<rf::Proj>(&v)) return finish(f.args[p->index - 1]);

    if (const auto* c = std::get_if<rf::Compose>(&v)) {
      if (f.phase == 1) return finish(std::move(*f.incoming));
      if (f.incoming) {
        f.collected.push_back(std::move(*f.incoming));
        f.incoming.reset();
      }
      if (f.collected.size() < c->inners.size()) {
        return call(c->inners[f.collected.size()], f.args);
      }
      f.phase = 1;
      return call(c->outer, std::move(f.collected));
    }

    if (const auto* r = std::get_if<rf::PrimRec>(&v)) {
      const std::span<const Natural> fixed(f.args.data(), f.args.size() - 1);
      if (f.phase == 0) {
        f.phase = 1;
        f.limit = f.args.back();
        return call(r->base, {fixed.begin(), fixed.end()});
      }
      if (f.phase == 1) {
        f.acc = std::move(*f.incoming);
        f.phase = 2;
      } else {
        f.acc = std::move(*f.incoming);
        ++f.counter;
      }
      f.incoming.reset();
      if (f.counter == f.limit) return finish(std::move(f.acc));
      auto args = extend(fixed, f.counter);
      args.push_back(f.acc);
      return call(r->step, std::move(args));
    }

    const auto& m = std::get<rf::Mu>(v);
    if (f.phase == 0) {
      f.phase = 1;
      return call(m.body, extend(f.args, f.counter));
    }
    if (*f.incoming == 0) {
      if (observer_) observer_(*f.node, f.args, f.counter);
      return finish(std::move(f.counter));
    }
    f.incoming.reset();
    ++f.counter;
    call(m.body, extend(f.args, f.counter));
  }

  Expr root_;
  MuObserver observer_;
  std::vector<Frame> stack_;
  std::optional<Natural> result_;
  std::uint64_t consumed_ = 0;
};

inline EvalResult eval(const Expr& e, std::vector<Natural> args, std::uint64_t fuel,
                       MuObserver observer = {}) {
  Evaluation ev(e, std::move(args), std::move(observer));
  if (auto v = ev.resume(fuel)) return Value{std::move(*v)};
  return FuelExhausted{ev.consumed()};
}

class NotBoolean : public std::domain_error {
 public:
  explicit NotBoolean(Natural value)
      : std::domain_error("characteristic function returned " + value.str()),
        value_(std::move(value)) {}
  const Natural& value() const { return value_; }

 private:
  Natural value_;
};

/// Evaluates a characteristic function (0 = relation holds, 1 = it does not).
/// Any other value means the expression was wrongly flagged.
inline EvalResult char_value(const Expr& rel, std::vector<Natural> args, std::uint64_t fuel) {
  auto r = eval(rel, std::move(args), fuel);
  if (const auto* v = std::get_if<Value>(&r); v && v->v > 1) throw NotBoolean(v->v);
  return r;
}

inline std::vector<Natural> naturals(std::initializer_list<unsigned long long> xs) {
  std::vector<Natural> out;
  for (auto x : xs) out.emplace_back(x);
  return out;
}

/// Standard combinators built from the five constructors.
namespace lib {

/// add(x, y) = x + y
inline Expr add() { return primrec(proj(1, 1), compose(succ(), {proj(3, 3)})); }

/// mul(x, y) = x * y
inline Expr mul() { return primrec(zero(), compose(add(), {proj(3, 3), proj(1, 3)})); }

/// Constant c as a function of `arity` arguments (arity >= 1).
inline Expr constant(std::uint32_t c, std::uint32_t arity = 1) {
  Expr e = zero();
  for (std::uint32_t i = 0; i < c; ++i) e = compose(succ(), {e});
  if (arity == 1) return e;
  return compose(e, {proj(1, arity)});
}

/// pred(y) = y - 1, pred(0) = 0
inline Expr pred() {
  auto p2 = primrec(zero(), proj(2, 3));  // p2(x, y) = pred(y)
  return compose(p2, {proj(1, 1), proj(1, 1)});
}

/// monus(x, y) = max(x - y, 0)
inline Expr monus() { return primrec(proj(1, 1), compose(pred(), {proj(3, 3)})); }

/// sg(y) = 0 if y = 0 else 1
inline Expr sg() {
  auto s2 = primrec(zero(), constant(1, 3));
  return compose(s2, {proj(1, 1), proj(1, 1)});
}

/// Characteristic function of equality: 0 when x = y, 1 otherwise.
inline Expr eq() {
  auto diff = compose(add(), {compose(monus(), {proj(1, 2), proj(2, 2)}),
                              compose(monus(), {proj(2, 2), proj(1, 2)})});
  return compose(sg(), {diff});
}

}  // namespace lib

}  // namespace cwb
