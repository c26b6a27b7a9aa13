#pragma once

// Reference evaluator for differential testing. Deliberately naive: plain
// structural recursion over the expression, loops for primitive recursion and
// mu, no frame stack, no resumption. It shares only the data types with
// Evaluation and charges fuel under the same rule (one unit per application).

#include <optional>
#include <vector>

#include "cwb/recfun.hpp"

namespace cwb {

namespace oracle_detail {

struct OutOfFuel {};

class Naive {
 public:
  explicit Naive(std::uint64_t fuel) : left_(fuel) {}

  Natural apply(const Node& n, const std::vector<Natural>& xs) {
    if (left_ == 0) throw OutOfFuel{};
    --left_;
    ++used_;

    if (std::holds_alternative<rf::Zero>(n.v)) return 0;
    if (std::holds_alternative<rf::Succ>(n.v)) return xs.at(0) + 1;
    if (auto p = std::get_if<rf::Proj>(&n.v)) return xs.at(p->index - 1);

    if (auto c = std::get_if<rf::Compose>(&n.v)) {
      std::vector<Natural> ys;
      for (const auto& g : c->inners) ys.push_back(apply(*g, xs));
      return apply(*c->outer, ys);
    }

    if (auto r = std::get_if<rf::PrimRec>(&n.v)) {
      std::vector<Natural> front(xs.begin(), xs.end() - 1);
      Natural h = apply(*r->base, front);
      for (Natural i = 0; i < xs.back(); ++i) {
        std::vector<Natural> a = front;
        a.push_back(i);
        a.push_back(h);
        h = apply(*r->step, a);
      }
      return h;
    }

    auto& m = std::get<rf::Mu>(n.v);
    for (Natural y = 0;; ++y) {
      std::vector<Natural> a = xs;
      a.push_back(y);
      if (apply(*m.body, a) == 0) return y;
    }
  }

  std::uint64_t used() const { return used_; }

 private:
  std::uint64_t left_;
  std::uint64_t used_ = 0;
};

}  // namespace oracle_detail

inline EvalResult oracle_eval(const Expr& e, const std::vector<Natural>& args, std::uint64_t fuel) {
  if (arity(e) != args.size()) throw ArityError("", "argument count does not match arity");
  oracle_detail::Naive n(fuel);
  try {
    return Value{n.apply(*e, args)};
  } catch (const oracle_detail::OutOfFuel&) {
    return FuelExhausted{n.used()};
  }
}

}  // namespace cwb
