#pragma once

// Text formats.
//
// Recursive-function programs (.rf), line oriented, '#' starts a comment:
//
//   format=1
//   def add = primrec (proj 1 1) (compose succ ((proj 3 3)))
//   def double = compose add ((proj 1 1) (proj 1 1))
//
// Terms are prefix forms with fixed operand counts:
//
//   term := zero | succ | proj INT INT | compose term '(' term+ ')'
//         | primrec term term | mu term | NAME | '(' term ')'
//
// Names may refer to definitions anywhere in the file; they are inlined at
// load time, so cycles are rejected. A program may also hold machines:
//
//   machine pingpong
//   states=2 alphabet=1 start=0
//   0 0 -> 0 R 1
//   1 0 -> 0 L 0
//   end
//
// Machine files (.tm) contain just the header and transition lines.

#include <cctype>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cwb/recfun.hpp"
#include "cwb/tm.hpp"

namespace cwb {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column),
        message_(message) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string message_;
};

struct Definition {
  std::string name;
  std::variant<Expr, Machine> body;
};

struct Program {
  std::vector<Definition> defs;

  const Definition* find(std::string_view name) const {
    for (const auto& d : defs)
      if (d.name == name) return &d;
    return nullptr;
  }

  Expr function(std::string_view name) const {
    const auto* d = find(name);
    if (!d || !std::holds_alternative<Expr>(d->body))
      throw std::out_of_range("no function named '" + std::string(name) + "'");
    return std::get<Expr>(d->body);
  }

  const Machine& machine(std::string_view name) const {
    const auto* d = find(name);
    if (!d || !std::holds_alternative<Machine>(d->body))
      throw std::out_of_range("no machine named '" + std::string(name) + "'");
    return std::get<Machine>(d->body);
  }
};

inline bool same(const Program& a, const Program& b) {
  if (a.defs.size() != b.defs.size()) return false;
  for (std::size_t i = 0; i < a.defs.size(); ++i) {
    const auto& x = a.defs[i];
    const auto& y = b.defs[i];
    if (x.name != y.name || x.body.index() != y.body.index()) return false;
    if (const auto* e = std::get_if<Expr>(&x.body)) {
      if (!same(*e, std::get<Expr>(y.body))) return false;
    } else if (std::get<Machine>(x.body) != std::get<Machine>(y.body)) {
      return false;
    }
  }
  return true;
}

namespace dsl {

inline constexpr int kFormatVersion = 1;
inline constexpr std::size_t kMaxNesting = 512;

enum class Tok { Ident, Int, LParen, RParen, Equals, Arrow, Comma };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

using Line = std::vector<Token>;

/// Splits text into non-empty token lines. Comments and blank lines vanish.
inline std::vector<Line> lex(std::string_view text) {
  std::vector<Line> lines;
  Line cur;
  std::size_t line = 1, col = 1;
  auto flush = [&] {
    if (!cur.empty()) lines.push_back(std::move(cur));
    cur.clear();
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    const auto uc = static_cast<unsigned char>(c);
    if (c == '\n') {
      flush();
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    const std::size_t start = i, start_col = col;
    auto single = [&](Tok k) {
      cur.push_back({k, std::string(1, c), line, start_col});
      ++i;
      ++col;
    };
    if (c == '(') { single(Tok::LParen); continue; }
    if (c == ')') { single(Tok::RParen); continue; }
    if (c == '=') { single(Tok::Equals); continue; }
    if (c == ',') { single(Tok::Comma); continue; }
    if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      cur.push_back({Tok::Arrow, "->", line, start_col});
      i += 2;
      col += 2;
      continue;
    }
    if (std::isdigit(uc)) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      cur.push_back({Tok::Int, std::string(text.substr(start, i - start)), line, start_col});
      col += i - start;
      continue;
    }
    if (std::isalpha(uc) || c == '_') {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) ||
                                 text[i] == '_' || text[i] == '\''))
        ++i;
      cur.push_back({Tok::Ident, std::string(text.substr(start, i - start)), line, start_col});
      col += i - start;
      continue;
    }
    throw ParseError(line, col, "unexpected character (byte " + std::to_string(uc) + ")");
  }
  flush();
  return lines;
}

class Cursor {
 public:
  explicit Cursor(const Line& l) : line_(l) {}

  bool at_end() const { return pos_ >= line_.size(); }
  const Token* peek() const { return at_end() ? nullptr : &line_[pos_]; }

  const Token& expect(Tok k, const char* what) {
    if (at_end()) throw error("expected " + std::string(what) + " at end of line");
    const auto& t = line_[pos_];
    if (t.kind != k) throw ParseError(t.line, t.column, "expected " + std::string(what) + ", found '" + t.text + "'");
    ++pos_;
    return t;
  }

  bool accept(Tok k) {
    if (!at_end() && line_[pos_].kind == k) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::uint32_t integer(const char* what) {
    const auto& t = expect(Tok::Int, what);
    std::uint64_t v = 0;
    for (char d : t.text) {
      v = v * 10 + static_cast<std::uint64_t>(d - '0');
      if (v > std::numeric_limits<std::uint32_t>::max())
        throw ParseError(t.line, t.column, std::string(what) + " out of range");
    }
    return static_cast<std::uint32_t>(v);
  }

  void finish() {
    if (!at_end()) {
      const auto& t = line_[pos_];
      throw ParseError(t.line, t.column, "unexpected '" + t.text + "' after end of statement");
    }
  }

  ParseError error(const std::string& msg) const {
    if (line_.empty()) return ParseError(0, 0, msg);
    const auto& t = at_end() ? line_.back() : line_[pos_];
    const auto col = at_end() ? t.column + t.text.size() : t.column;
    return ParseError(t.line, col, msg);
  }

 private:
  const Line& line_;
  std::size_t pos_ = 0;
};

/// Term before name resolution.
struct RawTerm {
  enum Kind { Zero, Succ, Proj, Compose, PrimRec, Mu, Ref } kind;
  std::string name;
  std::uint32_t i = 0, n = 0;
  std::vector<RawTerm> kids;
  std::size_t line = 0, column = 0;
};

inline const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k{"zero", "succ",    "proj", "compose",
                                                    "primrec", "mu",   "def",  "machine",
                                                    "end"};
  return k;
}

inline RawTerm parse_term(Cursor& c, std::size_t depth) {
  if (depth > kMaxNesting) throw c.error("term nested too deeply");
  if (c.at_end()) throw c.error("expected a term");
  const Token& t = *c.peek();
  RawTerm r{RawTerm::Zero, {}, 0, 0, {}, t.line, t.column};
  if (c.accept(Tok::LParen)) {
    r = parse_term(c, depth + 1);
    c.expect(Tok::RParen, "')'");
    return r;
  }
  const auto& id = c.expect(Tok::Ident, "a term");
  if (id.text == "zero") {
    r.kind = RawTerm::Zero;
  } else if (id.text == "succ") {
    r.kind = RawTerm::Succ;
  } else if (id.text == "proj") {
    r.kind = RawTerm::Proj;
    r.i = c.integer("projection index");
    r.n = c.integer("projection arity");
  } else if (id.text == "compose") {
    r.kind = RawTerm::Compose;
    r.kids.push_back(parse_term(c, depth + 1));
    c.expect(Tok::LParen, "'(' opening the inner function list");
    while (!c.accept(Tok::RParen)) {
      if (c.at_end()) throw c.error("unterminated inner function list");
      r.kids.push_back(parse_term(c, depth + 1));
    }
  } else if (id.text == "primrec") {
    r.kind = RawTerm::PrimRec;
    r.kids.push_back(parse_term(c, depth + 1));
    r.kids.push_back(parse_term(c, depth + 1));
  } else if (id.text == "mu") {
    r.kind = RawTerm::Mu;
    r.kids.push_back(parse_term(c, depth + 1));
  } else if (keywords().count(id.text)) {
    throw ParseError(id.line, id.column, "keyword '" + id.text + "' cannot start a term");
  } else {
    r.kind = RawTerm::Ref;
    r.name = id.text;
  }
  return r;
}

inline std::string describe(const RawTerm& t) {
  switch (t.kind) {
    case RawTerm::Zero: return "zero";
    case RawTerm::Succ: return "succ";
    case RawTerm::Proj: return "proj " + std::to_string(t.i) + " " + std::to_string(t.n);
    case RawTerm::Compose: return "compose";
    case RawTerm::PrimRec: return "primrec";
    case RawTerm::Mu: return "mu";
    case RawTerm::Ref: return t.name;
  }
  return "?";
}

/// Parses the header and transition lines of one machine.
inline Machine parse_machine_lines(const std::vector<Line>& lines, std::size_t begin,
                                   std::size_t end, std::size_t owner_line) {
  if (begin >= end) throw ParseError(owner_line, 1, "machine needs a header line");
  Cursor h(lines[begin]);
  std::optional<std::uint32_t> states, alphabet, start;
  while (!h.at_end()) {
    const auto& key = h.expect(Tok::Ident, "header key");
    h.expect(Tok::Equals, "'='");
    std::optional<std::uint32_t>* slot = nullptr;
    if (key.text == "states") slot = &states;
    else if (key.text == "alphabet") slot = &alphabet;
    else if (key.text == "start") slot = &start;
    else throw ParseError(key.line, key.column, "unknown header key '" + key.text + "'");
    if (*slot) throw ParseError(key.line, key.column, "duplicate header key '" + key.text + "'");
    *slot = h.integer(key.text.c_str());
  }
  const auto& first = lines[begin].front();
  if (!states || !alphabet)
    throw ParseError(first.line, first.column, "header needs states=N and alphabet=M");

  std::optional<Machine> m;
  try {
    m.emplace(*states, *alphabet, start.value_or(0));
  } catch (const ValidationError& e) {
    throw ParseError(first.line, first.column, e.what());
  }
  for (std::size_t i = begin + 1; i < end; ++i) {
    Cursor c(lines[i]);
    const auto& head = lines[i].front();
    const auto state = c.integer("state");
    const auto scanned = c.integer("symbol");
    c.expect(Tok::Arrow, "'->'");
    const auto write = c.integer("written symbol");
    const auto& mv = c.expect(Tok::Ident, "move L or R");
    Move move;
    if (mv.text == "L") move = Move::Left;
    else if (mv.text == "R") move = Move::Right;
    else throw ParseError(mv.line, mv.column, "move must be L or R");
    const auto next = c.integer("next state");
    c.finish();
    try {
      m->set(state, scanned, {write, move, next});
    } catch (const ValidationError& e) {
      throw ParseError(head.line, head.column, e.what());
    }
  }
  return std::move(*m);
}

/// Consumes an optional `format=1` line at `i`.
inline std::size_t skip_format_line(const std::vector<Line>& lines, std::size_t i) {
  if (i < lines.size() && lines[i].size() >= 1 && lines[i][0].kind == Tok::Ident &&
      lines[i][0].text == "format") {
    Cursor c(lines[i]);
    c.expect(Tok::Ident, "format");
    c.expect(Tok::Equals, "'='");
    const auto& v = lines[i][2 < lines[i].size() ? 2 : 0];
    const auto version = c.integer("format version");
    c.finish();
    if (version != kFormatVersion)
      throw ParseError(v.line, v.column, "unsupported format version " + std::to_string(version));
    return i + 1;
  }
  return i;
}

class Resolver {
 public:
  explicit Resolver(const std::map<std::string, const RawTerm*, std::less<>>& defs) : defs_(defs) {}

  Expr resolve(const std::string& name) {
    if (auto it = done_.find(name); it != done_.end()) return it->second;
    const auto* raw = defs_.at(name);
    if (!active_.insert(name).second)
      throw ParseError(raw->line, raw->column, "definition cycle through '" + name + "'");
    auto e = build(*raw, 0);
    active_.erase(name);
    done_.emplace(name, e);
    return e;
  }

 private:
  Expr build(const RawTerm& t, std::size_t depth) {
    if (depth > kMaxNesting) throw ParseError(t.line, t.column, "term nested too deeply");
    switch (t.kind) {
      case RawTerm::Zero: return zero();
      case RawTerm::Succ: return succ();
      case RawTerm::Proj: return proj(t.i, t.n);
      case RawTerm::Compose: {
        std::vector<Expr> inners;
        for (std::size_t k = 1; k < t.kids.size(); ++k) inners.push_back(build(t.kids[k], depth + 1));
        return compose(build(t.kids[0], depth + 1), std::move(inners));
      }
      case RawTerm::PrimRec: return primrec(build(t.kids[0], depth + 1), build(t.kids[1], depth + 1));
      case RawTerm::Mu: return mu(build(t.kids[0], depth + 1));
      case RawTerm::Ref: {
        if (!defs_.count(t.name))
          throw ParseError(t.line, t.column, "unknown name '" + t.name + "'");
        return resolve(t.name);
      }
    }
    throw ParseError(t.line, t.column, "bad term");
  }

  const std::map<std::string, const RawTerm*, std::less<>>& defs_;
  std::map<std::string, Expr, std::less<>> done_;
  std::set<std::string, std::less<>> active_;
};

// Finds the raw subterm an arity error path points at, for the diagnostic.
inline const RawTerm* locate(const RawTerm* t, std::string_view path) {
  while (t && !path.empty()) {
    const auto dot = path.find('.', path.find('.') + 1);
    auto part = path.substr(0, dot == std::string_view::npos ? path.size() : dot);
    path = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
    if (t->kind == RawTerm::Ref) return t;
    if (part == "compose.outer") t = &t->kids[0];
    else if (part.rfind("compose.inner[", 0) == 0) {
      const auto k = std::stoul(std::string(part.substr(14)));
      t = k + 1 < t->kids.size() ? &t->kids[k + 1] : t;
    } else if (part == "primrec.base") t = &t->kids[0];
    else if (part == "primrec.step") t = &t->kids[1];
    else if (part == "mu.body") t = &t->kids[0];
    else break;
  }
  return t;
}

}  // namespace dsl

/// Parses a .rf program. Throws ParseError with a 1-based line and column.
inline Program parse_program(std::string_view text) {
  using namespace dsl;
  const auto lines = lex(text);
  std::size_t i = skip_format_line(lines, 0);

  struct Pending {
    std::string name;
    std::size_t line, column;
    std::optional<RawTerm> term;
    std::optional<Machine> machine;
  };
  std::vector<Pending> pending;
  std::map<std::string, const RawTerm*, std::less<>> terms;
  std::set<std::string, std::less<>> names;

  auto declare = [&](const Token& name) {
    if (keywords().count(name.text))
      throw ParseError(name.line, name.column, "keyword '" + name.text + "' used as a name");
    if (!names.insert(name.text).second)
      throw ParseError(name.line, name.column, "duplicate definition of '" + name.text + "'");
  };

  for (; i < lines.size(); ++i) {
    Cursor c(lines[i]);
    const auto& kw = c.expect(Tok::Ident, "'def' or 'machine'");
    if (kw.text == "def") {
      const auto& name = c.expect(Tok::Ident, "definition name");
      declare(name);
      c.expect(Tok::Equals, "'='");
      auto term = parse_term(c, 0);
      c.finish();
      pending.push_back({name.text, name.line, name.column, std::move(term), std::nullopt});
    } else if (kw.text == "machine") {
      const auto& name = c.expect(Tok::Ident, "machine name");
      declare(name);
      c.finish();
      std::size_t j = i + 1;
      while (j < lines.size() && !(lines[j].size() == 1 && lines[j][0].kind == Tok::Ident &&
                                   lines[j][0].text == "end"))
        ++j;
      if (j == lines.size())
        throw ParseError(kw.line, kw.column, "machine '" + name.text + "' has no 'end'");
      auto m = parse_machine_lines(lines, i + 1, j, kw.line);
      pending.push_back({name.text, name.line, name.column, std::nullopt, std::move(m)});
      i = j;
    } else {
      throw ParseError(kw.line, kw.column, "expected 'def' or 'machine', found '" + kw.text + "'");
    }
  }

  for (const auto& p : pending)
    if (p.term) terms.emplace(p.name, &*p.term);

  Resolver resolver(terms);
  Program prog;
  for (auto& p : pending) {
    if (p.machine) {
      prog.defs.push_back({p.name, std::move(*p.machine)});
      continue;
    }
    auto e = resolver.resolve(p.name);
    try {
      arity(e);
    } catch (const ArityError& err) {
      const auto* at = locate(&*p.term, err.path());
      throw ParseError(at->line, at->column,
                       "arity error in '" + p.name + "' at term '" + describe(*at) + "': " + err.what());
    }
    prog.defs.push_back({p.name, std::move(e)});
  }
  return prog;
}

/// Parses a .tm machine file.
inline Machine parse_machine(std::string_view text) {
  using namespace dsl;
  const auto lines = lex(text);
  const std::size_t i = skip_format_line(lines, 0);
  if (i == lines.size()) throw ParseError(1, 1, "machine file is empty");
  return parse_machine_lines(lines, i, lines.size(), lines[i].front().line);
}

namespace dsl {

inline void format_term(std::ostream& os, const Expr& e);

inline void format_operand(std::ostream& os, const Expr& e) {
  if (std::holds_alternative<rf::Zero>(e->v) || std::holds_alternative<rf::Succ>(e->v)) {
    format_term(os, e);
  } else {
    os << '(';
    format_term(os, e);
    os << ')';
  }
}

inline void format_term(std::ostream& os, const Expr& e) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, rf::Zero>) {
          os << "zero";
        } else if constexpr (std::is_same_v<T, rf::Succ>) {
          os << "succ";
        } else if constexpr (std::is_same_v<T, rf::Proj>) {
          os << "proj " << x.index << ' ' << x.arity;
        } else if constexpr (std::is_same_v<T, rf::Compose>) {
          os << "compose ";
          format_operand(os, x.outer);
          os << " (";
          for (std::size_t i = 0; i < x.inners.size(); ++i) {
            if (i) os << ' ';
            format_operand(os, x.inners[i]);
          }
          os << ')';
        } else if constexpr (std::is_same_v<T, rf::PrimRec>) {
          os << "primrec ";
          format_operand(os, x.base);
          os << ' ';
          format_operand(os, x.step);
        } else {
          os << "mu ";
          format_operand(os, x.body);
        }
      },
      e->v);
}

inline void format_machine_body(std::ostream& os, const Machine& m) {
  os << "states=" << m.state_count() << " alphabet=" << m.alphabet_size()
     << " start=" << m.start() << '\n';
  for (State s = 0; s < m.state_count(); ++s)
    for (Symbol a = 0; a < m.alphabet_size(); ++a)
      if (const auto& t = m.lookup(s, a))
        os << s << ' ' << a << " -> " << t->write << ' ' << (t->move == Move::Left ? 'L' : 'R')
           << ' ' << t->next << '\n';
}

}  // namespace dsl

inline std::string format_term(const Expr& e) {
  std::ostringstream os;
  dsl::format_term(os, e);
  return os.str();
}

/// Canonical text; parse_program(format_program(p)) is structurally equal to p.
inline std::string format_program(const Program& p) {
  std::ostringstream os;
  os << "format=" << dsl::kFormatVersion << '\n';
  for (const auto& d : p.defs) {
    if (const auto* e = std::get_if<Expr>(&d.body)) {
      os << "def " << d.name << " = ";
      dsl::format_term(os, *e);
      os << '\n';
    } else {
      os << "machine " << d.name << '\n';
      dsl::format_machine_body(os, std::get<Machine>(d.body));
      os << "end\n";
    }
  }
  return os.str();
}

inline std::string format_machine(const Machine& m) {
  std::ostringstream os;
  os << "format=" << dsl::kFormatVersion << '\n';
  dsl::format_machine_body(os, m);
  return os.str();
}

}  // namespace cwb
