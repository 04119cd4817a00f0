#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperseq/error.hpp"
#include "hyperseq/index_set.hpp"
#include "hyperseq/interval.hpp"
#include "hyperseq/sequence.hpp"

// Text forms accepted by the CLI.
//
//   sequence  1/(n+1)   per[1,-1] * (1 + 1/(n+1))   prefix[5,5; n]   ifmod(3,1; n; -n)
//             rand(7, -1, 1)   rand(7, 0, 1, 16)   (-1)^n   n^-2   min(n, 10 - n)   recip(n - 3)
//   set       mod(2,{0})   {1,2,3}   cofinite{0,1}   tail(10)   all   empty
//             ~S (or !S)   S & T   S | T   S - T   neg(expr)   zero(expr)   pos(expr)   defined(expr)
//   interval  [a, b]   [a, b] u [c, d]   endpoints may be -inf / inf
namespace hyperseq {

namespace dsl {

enum class Tok { End, Number, Ident, Punct };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { scan(); }

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token take() {
    Token t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is(std::string_view punct_or_ident, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind != Tok::End && t.kind != Tok::Number && t.text == punct_or_ident;
  }
  bool accept(std::string_view text) {
    if (!is(text)) return false;
    take();
    return true;
  }
  Token expect(std::string_view text) {
    if (!is(text)) fail("expected '" + std::string(text) + "'");
    return take();
  }
  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.offset, what + ", found " + found);
  }
  std::size_t save() const { return pos_; }
  void restore(std::size_t p) { pos_ = p; }

 private:
  void scan() {
    std::size_t i = 0;
    while (i < src_.size()) {
      unsigned char ch = static_cast<unsigned char>(src_[i]);
      if (std::isspace(ch)) {
        ++i;
        continue;
      }
      std::size_t start = i;
      if (std::isdigit(ch) || (ch == '.' && i + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i + 1])))) {
        while (i < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[i])) || src_[i] == '.')) ++i;
        if (i < src_.size() && (src_[i] == 'e' || src_[i] == 'E')) {
          std::size_t j = i + 1;
          if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
          if (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) {
            i = j;
            while (i < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i]))) ++i;
          }
        }
        toks_.push_back({Tok::Number, std::string(src_.substr(start, i - start)), start});
        continue;
      }
      if (std::isalpha(ch) || ch == '_') {
        while (i < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i])) || src_[i] == '_')) ++i;
        toks_.push_back({Tok::Ident, std::string(src_.substr(start, i - start)), start});
        continue;
      }
      // a few UTF-8 spellings: − (minus), ∪, ∩, ∞
      static constexpr std::pair<std::string_view, std::string_view> kUtf8[] = {
          {"\xE2\x88\x92", "-"}, {"\xE2\x88\xAA", "|"}, {"\xE2\x88\xA9", "&"}, {"\xE2\x88\x9E", "inf"}};
      bool matched = false;
      for (const auto& [spelling, as] : kUtf8) {
        if (src_.substr(i).starts_with(spelling)) {
          toks_.push_back({as == "inf" ? Tok::Ident : Tok::Punct, std::string(as), start});
          i += spelling.size();
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (std::string_view("+-*/^()[]{},;&|~!").find(static_cast<char>(ch)) == std::string_view::npos) {
        throw SyntaxError(start, "unexpected character '" + std::string(1, static_cast<char>(ch)) + "'");
      }
      toks_.push_back({Tok::Punct, std::string(1, static_cast<char>(ch)), start});
      ++i;
    }
    toks_.push_back({Tok::End, "", src_.size()});
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

class Parser {
 public:
  explicit Parser(std::string_view src, Index horizon = kDefaultHorizon) : lex_(src), horizon_(horizon) {}

  Lexer& lexer() { return lex_; }

  void finish() {
    if (lex_.peek().kind != Tok::End) lex_.fail("unexpected trailing input");
  }

  Sequence expr() {
    Sequence acc = term();
    for (;;) {
      std::size_t at = lex_.peek().offset;
      if (lex_.accept("+")) acc = guard(at, [&] { return acc + term(); });
      else if (lex_.accept("-")) acc = guard(at, [&] { return acc - term(); });
      else return acc;
    }
  }

  Rational constant() {
    std::size_t at = lex_.peek().offset;
    Sequence s = expr();
    auto q = s.as_constant();
    if (!q) throw SyntaxError(at, "expected a constant, got '" + s.str() + "'");
    return *q;
  }

  Index natural() {
    const Token& t = lex_.peek();
    if (t.kind != Tok::Number || t.text.find_first_not_of("0123456789") != std::string::npos) {
      lex_.fail("expected a natural number");
    }
    if (t.text.size() > 18) throw SyntaxError(t.offset, "number too large");
    return std::stoull(lex_.take().text);
  }

  std::vector<Index> natural_list() {
    std::vector<Index> out;
    lex_.expect("{");
    if (lex_.accept("}")) return out;
    do out.push_back(natural());
    while (lex_.accept(","));
    lex_.expect("}");
    return out;
  }

  IndexSet set() {
    IndexSet acc = set_term();
    for (;;) {
      if (lex_.accept("|") || lex_.accept("or")) acc = unite(acc, set_term());
      else if (lex_.accept("-")) acc = difference(acc, set_term());
      else return acc;
    }
  }

 private:
  template <class F>
  Sequence guard(std::size_t at, F f) {
    try {
      return f();
    } catch (const SyntaxError&) {
      throw;
    } catch (const Error& e) {
      if (e.code() == Errc::DivisionByConstantZero || e.code() == Errc::InvalidArgument) {
        throw SyntaxError(at, e.what(), e.code() == Errc::InvalidArgument ? Errc::SyntaxError : e.code());
      }
      throw;
    }
  }

  Sequence term() {
    Sequence acc = unary();
    for (;;) {
      std::size_t at = lex_.peek().offset;
      if (lex_.accept("*")) acc = guard(at, [&] { return acc * unary(); });
      else if (lex_.accept("/")) acc = guard(at, [&] { return acc / unary(); });
      else return acc;
    }
  }

  Sequence unary() {
    if (lex_.accept("-")) return -unary();
    if (lex_.accept("+")) return unary();
    return power();
  }

  Sequence power() {
    Sequence base = atom();
    std::size_t at = lex_.peek().offset;
    if (!lex_.accept("^")) return base;
    if (lex_.accept("n")) {
      auto q = base.as_constant();
      if (!q) throw SyntaxError(at, "only a constant can be raised to the power n");
      return Sequence::power_of(*q);
    }
    bool negative = lex_.accept("-");
    Index k = natural();
    if (k > 4096) throw SyntaxError(at, "exponent out of range");
    long e = negative ? -static_cast<long>(k) : static_cast<long>(k);
    return guard(at, [&] { return base.pow(e); });
  }

  std::vector<Rational> constant_list(std::string_view stop) {
    std::vector<Rational> out;
    if (lex_.is(stop)) return out;
    do out.push_back(constant());
    while (lex_.accept(","));
    return out;
  }

  Sequence atom() {
    const Token& t = lex_.peek();
    std::size_t at = t.offset;
    if (t.kind == Tok::Number) {
      std::string text = lex_.take().text;
      try {
        return Sequence::constant(parse_rational(text));
      } catch (const Error& e) {
        throw SyntaxError(at, "bad number '" + text + "'");
      }
    }
    if (lex_.accept("(")) {
      Sequence inner = expr();
      lex_.expect(")");
      return inner;
    }
    if (t.kind != Tok::Ident) lex_.fail("expected an expression");
    std::string word = lex_.take().text;
    if (word == "n") return Sequence::var();
    if (word == "per") {
      lex_.expect("[");
      auto list = constant_list("]");
      lex_.expect("]");
      if (list.empty()) throw SyntaxError(at, "per[...] needs at least one value");
      return Sequence::periodic(std::move(list));
    }
    if (word == "prefix") {
      lex_.expect("[");
      auto head = constant_list(";");
      lex_.expect(";");
      Sequence tail = expr();
      lex_.expect("]");
      return Sequence::prefix(std::move(head), tail);
    }
    if (word == "ifmod") {
      lex_.expect("(");
      Index m = natural();
      lex_.expect(",");
      Index r = natural();
      lex_.expect(";");
      Sequence a = expr();
      lex_.expect(";");
      Sequence b = expr();
      lex_.expect(")");
      if (m == 0 || r >= m) throw SyntaxError(at, "ifmod needs 0 <= r < m");
      return Sequence::ifmod(m, r, a, b);
    }
    if (word == "rand") {
      lex_.expect("(");
      Index seed = natural();
      lex_.expect(",");
      Rational lo = constant();
      lex_.expect(",");
      Rational hi = constant();
      Index steps = 1000;
      if (lex_.accept(",")) steps = natural();
      lex_.expect(")");
      if (steps == 0 || hi < lo) throw SyntaxError(at, "rand needs lo <= hi and steps >= 1");
      return Sequence::random(seed, lo, hi, steps);
    }
    if (word == "recip") {
      lex_.expect("(");
      Sequence inner = expr();
      lex_.expect(")");
      return inner.recip();
    }
    if (word == "min") {
      lex_.expect("(");
      std::vector<Sequence> items;
      do items.push_back(expr());
      while (lex_.accept(","));
      lex_.expect(")");
      return Sequence::min(std::move(items));
    }
    throw SyntaxError(at, "unknown name '" + word + "'");
  }

 public:
  FamilyExpr family() {
    std::vector<ComponentExpr> parts;
    do {
      lex_.expect("[");
      ComponentExpr c;
      c.lo = endpoint(false);
      lex_.expect(",");
      c.hi = endpoint(true);
      lex_.expect("]");
      parts.push_back(std::move(c));
    } while (lex_.accept("u") || lex_.accept("|"));
    return FamilyExpr(std::move(parts));
  }

 private:
  std::optional<Sequence> endpoint(bool upper) {
    std::size_t at = lex_.peek().offset;
    bool minus = lex_.is("-") && lex_.is("inf", 1);
    bool plus = lex_.is("+") && lex_.is("inf", 1);
    if (!minus && !plus && !lex_.is("inf")) return expr();
    if (minus || plus) lex_.take();
    lex_.take();
    if (minus == upper) throw SyntaxError(at, upper ? "upper endpoint cannot be -inf" : "lower endpoint cannot be inf");
    return std::nullopt;
  }

  IndexSet set_term() {
    IndexSet acc = set_factor();
    while (lex_.accept("&") || lex_.accept("and")) acc = intersect(acc, set_factor());
    return acc;
  }

  IndexSet set_factor() {
    if (lex_.accept("~") || lex_.accept("!") || lex_.accept("not")) return complement(set_factor());
    return set_atom();
  }

  IndexSet set_atom() {
    const Token& t = lex_.peek();
    std::size_t at = t.offset;
    if (lex_.accept("(")) {
      IndexSet inner = set();
      lex_.expect(")");
      return inner;
    }
    if (lex_.is("{")) return IndexSet::finite(natural_list());
    if (t.kind != Tok::Ident) lex_.fail("expected a set");
    std::string word = lex_.take().text;
    if (word == "all") return IndexSet::all();
    if (word == "empty") return IndexSet::empty();
    if (word == "finite") return IndexSet::finite(natural_list());
    if (word == "cofinite" || word == "cofinite_except") return IndexSet::cofinite_except(natural_list());
    if (word == "tail") {
      lex_.expect("(");
      Index n0 = natural();
      lex_.expect(")");
      return IndexSet::tail(n0);
    }
    if (word == "mod") {
      lex_.expect("(");
      Index m = natural();
      lex_.expect(",");
      std::vector<Index> rs;
      if (lex_.is("{")) rs = natural_list();
      else rs.push_back(natural());
      lex_.expect(")");
      if (m == 0 || m > kModulusCap) throw SyntaxError(at, "modulus out of range");
      for (Index r : rs) {
        if (r >= m) throw SyntaxError(at, "residue must be below the modulus");
      }
      return IndexSet::residues(m, rs);
    }
    if (word == "neg" || word == "zero" || word == "pos" || word == "defined") {
      lex_.expect("(");
      Sequence s = expr();
      lex_.expect(")");
      if (word == "defined") return s.defined_set(horizon_);
      auto sets = s.sign_sets(horizon_);
      return word == "neg" ? sets.neg : word == "zero" ? sets.zero : sets.pos;
    }
    throw SyntaxError(at, "unknown set '" + word + "'");
  }

  Lexer lex_;
  Index horizon_;
};

}  // namespace dsl

inline Sequence parse_sequence(std::string_view text) {
  dsl::Parser p(text);
  Sequence s = p.expr();
  p.finish();
  return s;
}

// Sampled sign sets inside the expression use `horizon`.
inline IndexSet parse_set(std::string_view text, Index horizon = kDefaultHorizon) {
  dsl::Parser p(text, horizon);
  IndexSet s = p.set();
  p.finish();
  return s;
}

// Interval family in n: [a, b] u [c, d], endpoints may be -inf / inf.
inline FamilyExpr parse_family(std::string_view text) {
  dsl::Parser p(text);
  FamilyExpr f = p.family();
  p.finish();
  return f;
}

}  // namespace hyperseq
