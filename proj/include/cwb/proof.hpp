#pragma once

// Certificates that an expression G(a1..an, y) is nonzero for every y at
// which it converges, together with a total checker and a size-ordered
// enumerator. The rule set is small and structural; see Rule.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cwb/recfun.hpp"

namespace cwb {

/// Declaration order is the enumeration order of tags.
enum class Rule : std::uint8_t {
  SuccHead,         // G = succ(...)
  ConstNonzero,     // G does not mention y and evaluates to a nonzero value
  SumLeftNonzero,   // G = add(L, R), L certified
  SumRightNonzero,  // G = add(L, R), R certified
  ProductNonzero,   // G = mul(L, R), L and R certified
};

inline constexpr Rule kAllRules[] = {Rule::SuccHead, Rule::ConstNonzero, Rule::SumLeftNonzero,
                                     Rule::SumRightNonzero, Rule::ProductNonzero};

inline std::size_t rule_arity(Rule r) {
  switch (r) {
    case Rule::SuccHead:
    case Rule::ConstNonzero: return 0;
    case Rule::SumLeftNonzero:
    case Rule::SumRightNonzero: return 1;
    case Rule::ProductNonzero: return 2;
  }
  return 0;
}

inline std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::SuccHead: return "SuccHead";
    case Rule::ConstNonzero: return "ConstNonzero";
    case Rule::SumLeftNonzero: return "SumLeftNonzero";
    case Rule::SumRightNonzero: return "SumRightNonzero";
    case Rule::ProductNonzero: return "ProductNonzero";
  }
  return "?";
}

/// Derivation tree. Each node applies to the subterm reached from the
/// statement's subject by following the rule path from the root
/// (Sum*: left/right summand; Product: child i is factor i).
struct Certificate {
  Rule rule = Rule::SuccHead;
  std::vector<Certificate> children;

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
  }

  void preorder(std::vector<Rule>& out) const {
    out.push_back(rule);
    for (const auto& c : children) c.preorder(out);
  }

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

inline std::string to_string(const Certificate& c) {
  std::string s(rule_name(c.rule));
  if (!c.children.empty()) {
    s += '(';
    for (std::size_t i = 0; i < c.children.size(); ++i) {
      if (i) s += ',';
      s += to_string(c.children[i]);
    }
    s += ')';
  }
  return s;
}

namespace detail {

inline std::optional<Certificate> parse_cert(std::string_view& s, int depth) {
  if (depth > 256) return std::nullopt;
  for (auto r : kAllRules) {
    const auto name = rule_name(r);
    if (s.substr(0, name.size()) != name) continue;
    // whole identifiers only
    const auto rest = s.substr(name.size());
    if (!rest.empty() && std::isalpha(static_cast<unsigned char>(rest.front()))) continue;
    s = rest;
    Certificate c{r, {}};
    const auto k = rule_arity(r);
    if (k == 0) return c;
    if (s.empty() || s.front() != '(') return std::nullopt;
    s.remove_prefix(1);
    for (std::size_t i = 0; i < k; ++i) {
      if (i) {
        if (s.empty() || s.front() != ',') return std::nullopt;
        s.remove_prefix(1);
      }
      auto child = parse_cert(s, depth + 1);
      if (!child) return std::nullopt;
      c.children.push_back(std::move(*child));
    }
    if (s.empty() || s.front() != ')') return std::nullopt;
    s.remove_prefix(1);
    return c;
  }
  return std::nullopt;
}

}  // namespace detail

inline std::optional<Certificate> parse_certificate(std::string_view text) {
  auto c = detail::parse_cert(text, 0);
  if (!c || !text.empty()) return std::nullopt;
  return c;
}

/// The formula "for all y, G(a1..an, y) != 0".
struct Statement {
  Expr subject;
  std::vector<Natural> fixed_args;

  void validate() const {
    if (arity(subject) != fixed_args.size() + 1)
      throw ArityError("", "statement subject must take the fixed arguments plus y");
  }
};

/// Conservative syntactic dependency: false only if the function value
/// provably ignores argument j (1-based).
inline bool depends_on(const Expr& e, std::uint32_t j) {
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, rf::Zero>) {
          return false;
        } else if constexpr (std::is_same_v<T, rf::Succ>) {
          return j == 1;
        } else if constexpr (std::is_same_v<T, rf::Proj>) {
          return x.index == j;
        } else if constexpr (std::is_same_v<T, rf::Compose>) {
          for (std::size_t k = 0; k < x.inners.size(); ++k)
            if (depends_on(x.outer, static_cast<std::uint32_t>(k + 1)) && depends_on(x.inners[k], j))
              return true;
          return false;
        } else if constexpr (std::is_same_v<T, rf::PrimRec>) {
          if (j == arity(e)) return true;
          return depends_on(x.base, j) || depends_on(x.step, j);
        } else {
          return depends_on(x.body, j);
        }
      },
      e->v);
}

/// Proof system interface: a total checker plus a finite enumeration of
/// candidate certificates up to a size bound.
class ProofSystem {
 public:
  virtual ~ProofSystem() = default;
  virtual bool check(const Certificate& cert, const Statement& stmt) const = 0;
  virtual std::vector<Certificate> certificates_of_size(const Statement& stmt,
                                                        std::size_t size) const = 0;

  std::vector<Certificate> enumerate(const Statement& stmt, std::size_t max_size) const {
    std::vector<Certificate> out;
    for (std::size_t s = 1; s <= max_size; ++s) {
      auto batch = certificates_of_size(stmt, s);
      out.insert(out.end(), std::make_move_iterator(batch.begin()),
                 std::make_move_iterator(batch.end()));
    }
    return out;
  }
};

class ReferenceRules final : public ProofSystem {
 public:
  /// `const_fuel` bounds the single evaluation ConstNonzero performs, which
  /// keeps the checker total.
  explicit ReferenceRules(std::uint64_t const_fuel = 100'000)
      : const_fuel_(const_fuel), add_(lib::add()), mul_(lib::mul()) {}

  bool check(const Certificate& cert, const Statement& stmt) const override {
    try {
      stmt.validate();
    } catch (const ArityError&) {
      return false;
    }
    return check_at(cert, stmt.subject, stmt);
  }

  std::vector<Certificate> certificates_of_size(const Statement&,
                                                std::size_t size) const override {
    auto out = trees(size);
    std::vector<std::pair<std::vector<Rule>, std::size_t>> keys;
    keys.reserve(out.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      std::vector<Rule> k;
      out[i].preorder(k);
      keys.emplace_back(std::move(k), i);
    }
    std::sort(keys.begin(), keys.end());
    std::vector<Certificate> sorted;
    sorted.reserve(out.size());
    for (const auto& [k, i] : keys) sorted.push_back(std::move(out[i]));
    return sorted;
  }

 private:
  static std::vector<Certificate> trees(std::size_t size) {
    std::vector<Certificate> out;
    if (size == 0) return out;
    for (auto r : kAllRules) {
      const auto k = rule_arity(r);
      if (k == 0 && size == 1) out.push_back({r, {}});
      if (k == 1 && size >= 2)
        for (auto& c : trees(size - 1)) out.push_back({r, {std::move(c)}});
      if (k == 2 && size >= 3)
        for (std::size_t left = 1; left + 1 < size; ++left)
          for (const auto& l : trees(left))
            for (const auto& rt : trees(size - 1 - left)) out.push_back({r, {l, rt}});
    }
    return out;
  }

  // Returns the two operands if e = compose(op, [L, R]).
  static const std::vector<Expr>* binary_operands(const Expr& e, const Expr& op) {
    const auto* c = std::get_if<rf::Compose>(&e->v);
    if (!c || c->inners.size() != 2 || !same(c->outer, op)) return nullptr;
    return &c->inners;
  }

  bool check_at(const Certificate& cert, const Expr& g, const Statement& stmt) const {
    if (cert.children.size() != rule_arity(cert.rule)) return false;
    switch (cert.rule) {
      case Rule::SuccHead: {
        const auto* c = std::get_if<rf::Compose>(&g->v);
        return c && std::holds_alternative<rf::Succ>(c->outer->v);
      }
      case Rule::ConstNonzero: {
        const auto y = static_cast<std::uint32_t>(stmt.fixed_args.size() + 1);
        if (depends_on(g, y)) return false;
        auto args = stmt.fixed_args;
        args.emplace_back(0);
        const auto r = eval(g, std::move(args), const_fuel_);
        const auto* v = std::get_if<Value>(&r);
        return v && v->v != 0;
      }
      case Rule::SumLeftNonzero:
      case Rule::SumRightNonzero: {
        const auto* ops = binary_operands(g, add_);
        if (!ops) return false;
        const auto& side = (*ops)[cert.rule == Rule::SumLeftNonzero ? 0 : 1];
        return check_at(cert.children[0], side, stmt);
      }
      case Rule::ProductNonzero: {
        const auto* ops = binary_operands(g, mul_);
        if (!ops) return false;
        return check_at(cert.children[0], (*ops)[0], stmt) &&
               check_at(cert.children[1], (*ops)[1], stmt);
      }
    }
    return false;
  }

  std::uint64_t const_fuel_;
  Expr add_;
  Expr mul_;
};

}  // namespace cwb
