#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hyperseq/error.hpp"
#include "hyperseq/index_set.hpp"
#include "hyperseq/poly.hpp"

namespace hyperseq {

// num/den with den monic and gcd(num, den) = 1.
class RatFn {
 public:
  RatFn() : den_(Poly::constant(1)) {}
  explicit RatFn(const Rational& q) : num_(Poly::constant(q)), den_(Poly::constant(1)) {}

  RatFn(Poly num, Poly den) {
    if (den.is_zero()) throw Error(Errc::InvalidArgument, "rational function with zero denominator");
    if (num.is_zero()) {
      den_ = Poly::constant(1);
      return;
    }
    if (den.is_constant()) {
      Rational inv = 1 / den.lead();
      num_ = inv * num;
      den_ = Poly::constant(1);
      return;
    }
    Poly g = gcd(num, den);
    num = divmod(num, g).first;
    den = divmod(den, g).first;
    Rational inv = 1 / den.lead();
    num_ = inv * num;
    den_ = den.monic();
  }

  static RatFn identity() { return RatFn(Poly::identity(), Poly::constant(1)); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  std::optional<Rational> constant_value() const {
    if (den_.degree() == 0 && num_.degree() <= 0) return num_.coeff(0);
    return std::nullopt;
  }

  // Caller guarantees den(n) != 0.
  Rational eval(Index n) const { return num_.eval(n) / den_.eval(n); }

  // Same sign as num/den wherever den != 0.
  Poly sign_poly() const { return num_ * den_; }

  RatFn operator-() const { return RatFn(-num_, den_); }
  friend RatFn operator+(const RatFn& a, const RatFn& b) {
    if (a.den_ == b.den_) return RatFn(a.num_ + b.num_, a.den_);
    return RatFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RatFn operator-(const RatFn& a, const RatFn& b) { return a + (-b); }
  friend RatFn operator*(const RatFn& a, const RatFn& b) {
    return RatFn(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RatFn operator/(const RatFn& a, const RatFn& b) {
    return RatFn(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend bool operator==(const RatFn& a, const RatFn& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

  std::string str() const {
    if (den_.degree() == 0) return num_.str();
    return "(" + num_.str() + ")/(" + den_.str() + ")";
  }

 private:
  Poly num_;
  Poly den_;
};

// Behaviour of a rational function as n grows: a finite limit approached from
// above (+1), below (-1) or attained exactly (0), or divergence to ±∞.
struct Eventual {
  enum class Kind { Finite, PlusInfinity, MinusInfinity };
  Kind kind = Kind::Finite;
  Rational limit;
  int approach = 0;
};

inline Eventual eventual_of(const RatFn& f) {
  const Poly& p = f.num();
  const Poly& q = f.den();
  if (p.degree() > q.degree()) {
    return {sgn(p.lead()) > 0 ? Eventual::Kind::PlusInfinity : Eventual::Kind::MinusInfinity, 0, 0};
  }
  Rational L = p.degree() == q.degree() ? Rational(p.lead() / q.lead()) : Rational(0);
  Poly rest = p - L * q;
  return {Eventual::Kind::Finite, L, sgn(rest.lead())};
}

// One stretch of a residue class: indices from `from` (inclusive, in the class) up to
// the next piece. An absent fn marks a stretch where the sequence is undefined.
struct Piece {
  Index from;
  std::optional<RatFn> fn;
};

// A sequence that, on each class mod `period`, is piecewise a rational function of n.
struct TameForm {
  Index period = 1;
  std::vector<std::vector<Piece>> classes;
  std::vector<Index> poles;  // sorted isolated undefined indices inside defined pieces

  const Piece& piece_at(Index n) const {
    const auto& list = classes[n % period];
    auto it = std::upper_bound(list.begin(), list.end(), n,
                               [](Index x, const Piece& p) { return x < p.from; });
    return *std::prev(it);
  }

  std::optional<Rational> at(Index n) const {
    const Piece& p = piece_at(n);
    if (!p.fn || std::binary_search(poles.begin(), poles.end(), n)) return std::nullopt;
    return p.fn->eval(n);
  }

  // The function in force on class `cls` for all large n; absent if undefined there.
  const std::optional<RatFn>& eventual(Index cls) const { return classes[cls % period].back().fn; }
};

inline constexpr Index kTamePeriodCap = Index{1} << 14;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct NRun {
  Index first;
  Index last;  // kUnbounded allowed
  int sign;
};

// Sign runs of the polynomial p(n) over indices n ≡ c (mod P) with from <= n < to.
inline std::vector<NRun> class_sign_runs(const Poly& p, Index c, Index P, Index from, Index to) {
  Index klo = (from - c) / P;
  Index khi = to == kUnbounded ? kUnbounded : (to - c) / P - 1;
  std::vector<NRun> out;
  if (khi != kUnbounded && khi < klo) return out;
  Poly q = p.compose_affine(Rational(static_cast<unsigned long>(c)), Rational(static_cast<unsigned long>(P)));
  auto to_n = [&](Index k) {
    if (k == kUnbounded) return kUnbounded;
    if (k > (kIndexLimit - c) / P) {
      throw Error(Errc::RepresentationLimit, "sign change beyond index 2^62");
    }
    return c + P * k;
  };
  for (const auto& run : sign_runs(q, klo, khi)) out.push_back({to_n(run.first), to_n(run.last), run.sign});
  return out;
}

inline void add_zeros(const Poly& p, Index c, Index P, Index from, Index to, std::vector<Index>& poles) {
  for (const auto& run : class_sign_runs(p, c, P, from, to)) {
    if (run.sign == 0) poles.push_back(run.first);
  }
}

inline Index align(Index f, Index c, Index P) { return f + (c + P - f % P) % P; }

// Pieces of t along class c of the finer period P.
inline std::vector<Piece> restrict_to(const TameForm& t, Index P, Index c) {
  const auto& src = t.classes[c % t.period];
  std::vector<Piece> out;
  for (const auto& p : src) {
    Index a = align(p.from, c, P);
    if (!out.empty() && out.back().from == a) out.back() = {a, p.fn};
    else out.push_back({a, p.fn});
  }
  return out;
}

inline void compress(std::vector<Piece>& list) {
  std::vector<Piece> out;
  for (auto& p : list) {
    if (!out.empty() && out.back().fn == p.fn) continue;
    out.push_back(std::move(p));
  }
  list = std::move(out);
}

inline void normalize_poles(TameForm& t) {
  std::sort(t.poles.begin(), t.poles.end());
  t.poles.erase(std::unique(t.poles.begin(), t.poles.end()), t.poles.end());
  std::erase_if(t.poles, [&](Index n) { return !t.piece_at(n).fn; });
}

// Walks the common refinement of a and b on every class of lcm(period) and lets
// op emit the pieces of the result over [from, to).
template <class Op>
TameForm combine(const TameForm& a, const TameForm& b, Op op) {
  TameForm out;
  out.period = lcm_capped(a.period, b.period, kTamePeriodCap);
  const Index P = out.period;
  out.classes.resize(P);
  out.poles = a.poles;
  out.poles.insert(out.poles.end(), b.poles.begin(), b.poles.end());
  for (Index c = 0; c < P; ++c) {
    auto la = restrict_to(a, P, c), lb = restrict_to(b, P, c);
    std::vector<Index> starts;
    for (const auto& p : la) starts.push_back(p.from);
    for (const auto& p : lb) starts.push_back(p.from);
    std::sort(starts.begin(), starts.end());
    starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
    std::size_t i = 0, j = 0;
    auto& dst = out.classes[c];
    for (std::size_t s = 0; s < starts.size(); ++s) {
      Index from = starts[s];
      Index to = s + 1 < starts.size() ? starts[s + 1] : kUnbounded;
      while (i + 1 < la.size() && la[i + 1].from <= from) ++i;
      while (j + 1 < lb.size() && lb[j + 1].from <= from) ++j;
      op(la[i].fn, lb[j].fn, c, P, from, to, dst, out.poles);
    }
    compress(dst);
  }
  normalize_poles(out);
  return out;
}

template <class F>
TameForm map_pieces(const TameForm& t, F f) {
  TameForm out;
  out.period = t.period;
  out.classes.resize(t.period);
  out.poles = t.poles;
  for (Index c = 0; c < t.period; ++c) {
    const auto& src = t.classes[c];
    for (std::size_t i = 0; i < src.size(); ++i) {
      Index to = i + 1 < src.size() ? src[i + 1].from : kUnbounded;
      f(src[i].fn, c, t.period, src[i].from, to, out.classes[c], out.poles);
    }
    compress(out.classes[c]);
  }
  normalize_poles(out);
  return out;
}

inline TameForm constant_form(const Rational& q) {
  TameForm t;
  t.classes = {{Piece{0, RatFn(q)}}};
  return t;
}

}  // namespace detail

struct SignSets {
  IndexSet neg;
  IndexSet zero;
  IndexSet pos;
};

// Closed-form exact-rational sequence. Values are immutable and share structure.
class Sequence {
 public:
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Periodic, Prefix, IfMod, Random, PowerOf, Min, Recip, Callback };
  using Callback = std::function<std::optional<Rational>(Index)>;

  Sequence() : Sequence(constant(Rational(0))) {}

  static Sequence constant(const Rational& q) {
    auto n = std::make_shared<Node>(Op::Const);
    n->value = q;
    return Sequence(std::move(n));
  }
  static Sequence constant(long q) { return constant(Rational(q)); }
  static Sequence var() { return Sequence(std::make_shared<Node>(Op::Var)); }

  static Sequence periodic(std::vector<Rational> pattern) {
    if (pattern.empty()) throw Error(Errc::InvalidArgument, "per[...] needs at least one value");
    if (std::all_of(pattern.begin(), pattern.end(), [&](const Rational& q) { return q == pattern[0]; })) {
      return constant(pattern[0]);
    }
    auto n = std::make_shared<Node>(Op::Periodic);
    n->list = std::move(pattern);
    return Sequence(std::move(n));
  }

  static Sequence prefix(std::vector<Rational> head, Sequence tail) {
    if (head.empty()) return tail;
    auto n = std::make_shared<Node>(Op::Prefix);
    n->list = std::move(head);
    n->kids = {std::move(tail.node_)};
    return Sequence(std::move(n));
  }

  // e1 where n ≡ r (mod m), else e2.
  static Sequence ifmod(Index m, Index r, Sequence e1, Sequence e2) {
    if (m == 0 || r >= m) throw Error(Errc::InvalidArgument, "ifmod needs 0 <= r < m");
    auto n = std::make_shared<Node>(Op::IfMod);
    n->m = m;
    n->r = r;
    n->kids = {std::move(e1.node_), std::move(e2.node_)};
    return Sequence(std::move(n));
  }

  // Stateless pseudorandom values on the grid lo + j (hi - lo) / steps, 0 <= j <= steps.
  static Sequence random(std::uint64_t seed, const Rational& lo, const Rational& hi, Index steps = 1000) {
    if (steps == 0) throw Error(Errc::InvalidArgument, "rand needs steps >= 1");
    if (hi < lo) throw Error(Errc::InvalidArgument, "rand needs lo <= hi");
    auto n = std::make_shared<Node>(Op::Random);
    n->seed = seed;
    n->value = lo;
    n->hi = hi;
    n->steps = steps;
    return Sequence(std::move(n));
  }

  // c^n
  static Sequence power_of(const Rational& c) {
    if (c == 1) return constant(Rational(1));
    auto n = std::make_shared<Node>(Op::PowerOf);
    n->value = c;
    return Sequence(std::move(n));
  }

  static Sequence min(std::vector<Sequence> items) {
    if (items.empty()) throw Error(Errc::InvalidArgument, "min needs at least one argument");
    if (items.size() == 1) return items[0];
    auto n = std::make_shared<Node>(Op::Min);
    for (auto& s : items) n->kids.push_back(std::move(s.node_));
    return Sequence(std::move(n));
  }

  // 1/e where e != 0, and 0 where e = 0.
  Sequence recip() const {
    if (auto q = as_constant()) return constant(*q == 0 ? Rational(0) : Rational(1 / *q));
    auto n = std::make_shared<Node>(Op::Recip);
    n->kids = {node_};
    return Sequence(std::move(n));
  }

  // Opaque user-supplied terms; never tame, so sign sets are sampled.
  static Sequence callback(std::string name, Callback fn) {
    auto n = std::make_shared<Node>(Op::Callback);
    n->name = std::move(name);
    n->fn = std::move(fn);
    return Sequence(std::move(n));
  }

  Sequence pow(long k) const {
    if (k == 1) return *this;
    if (k == 0) return constant(Rational(1));
    if (k > 4096 || k < -4096) throw Error(Errc::InvalidArgument, "exponent out of range");
    if (auto q = as_constant()) {
      if (*q == 0 && k < 0) throw Error(Errc::DivisionByConstantZero, "0 raised to a negative power");
      return constant(rational_pow(*q, k));
    }
    auto n = std::make_shared<Node>(Op::Pow);
    n->exponent = k;
    n->kids = {node_};
    return Sequence(std::move(n));
  }

  Sequence operator-() const {
    if (auto q = as_constant()) return constant(-*q);
    auto n = std::make_shared<Node>(Op::Neg);
    n->kids = {node_};
    return Sequence(std::move(n));
  }
  friend Sequence operator+(const Sequence& a, const Sequence& b) { return binary(Op::Add, a, b); }
  friend Sequence operator-(const Sequence& a, const Sequence& b) { return binary(Op::Sub, a, b); }
  friend Sequence operator*(const Sequence& a, const Sequence& b) { return binary(Op::Mul, a, b); }
  friend Sequence operator/(const Sequence& a, const Sequence& b) { return binary(Op::Div, a, b); }

  Op op() const { return node_->op; }
  bool same_node(const Sequence& o) const { return node_ == o.node_; }

  std::optional<Rational> as_constant() const {
    if (node_->op == Op::Const) return node_->value;
    return std::nullopt;
  }

  // Term at n, or nothing where undefined.
  std::optional<Rational> try_at(Index n) const { return eval(*node_, n); }

  Rational at(Index n) const {
    auto v = eval(*node_, n);
    if (!v) throw Error(Errc::UndefinedAtIndex, str() + " is undefined at n = " + std::to_string(n));
    return *v;
  }

  // The piecewise rational form, or null when the expression leaves the tame fragment.
  const TameForm* tame() const {
    std::call_once(node_->tame_once, [&] {
      try {
        node_->tame = build_tame(*node_);
      } catch (const Error& e) {
        if (e.code() != Errc::RepresentationLimit) throw;
        node_->tame.reset();
      }
    });
    return node_->tame ? &*node_->tame : nullptr;
  }
  bool is_tame() const { return tame() != nullptr; }

  // ({n: e_n < 0}, {n: e_n = 0}, {n: e_n > 0}); undefined indices are in none.
  SignSets sign_sets(Index horizon = kDefaultHorizon) const {
    if (const TameForm* t = tame()) return tame_sign_sets(*t);
    std::vector<bool> neg(horizon), zero(horizon), pos(horizon);
    for (Index n = 0; n < horizon; ++n) {
      auto v = try_at(n);
      if (!v) continue;
      int s = sgn(*v);
      (s < 0 ? neg : s == 0 ? zero : pos)[n] = true;
    }
    return {IndexSet::from_bits(std::move(neg)), IndexSet::from_bits(std::move(zero)),
            IndexSet::from_bits(std::move(pos))};
  }

  IndexSet defined_set(Index horizon = kDefaultHorizon) const {
    if (const TameForm* t = tame()) {
      std::vector<std::vector<ClassInterval>> cls(t->period);
      for (Index c = 0; c < t->period; ++c) {
        const auto& list = t->classes[c];
        for (std::size_t i = 0; i < list.size(); ++i) {
          if (!list[i].fn) continue;
          Index last = i + 1 < list.size() ? list[i + 1].from - t->period : kUnbounded;
          cls[c].push_back({list[i].from, last});
        }
      }
      return difference(IndexSet::from_classes(t->period, std::move(cls)), IndexSet::finite(t->poles));
    }
    return IndexSet::sampled([s = *this](Index n) { return s.try_at(n).has_value(); }, horizon);
  }

  // DSL text that parses back to an equal expression (callbacks print as <name>).
  std::string str() const { return print(*node_); }

 private:
  struct Node {
    explicit Node(Op o) : op(o) {}
    Op op;
    Rational value;  // Const, PowerOf base, Random lo
    Rational hi;     // Random
    std::vector<Rational> list;
    std::vector<std::shared_ptr<const Node>> kids;
    long exponent = 0;
    Index m = 0, r = 0;
    std::uint64_t seed = 0;
    Index steps = 0;
    std::string name;
    Callback fn;
    mutable std::once_flag tame_once;
    mutable std::optional<TameForm> tame;
  };
  using NodePtr = std::shared_ptr<const Node>;

  explicit Sequence(NodePtr n) : node_(std::move(n)) {}

  static Rational rational_pow(const Rational& q, long k) {
    unsigned long e = static_cast<unsigned long>(k < 0 ? -k : k);
    Integer num, den;
    mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), e);
    mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), e);
    Rational out = k < 0 ? Rational(den, num) : Rational(num, den);
    out.canonicalize();
    return out;
  }

  static Sequence binary(Op op, const Sequence& a, const Sequence& b) {
    auto qa = a.as_constant(), qb = b.as_constant();
    if (op == Op::Div && qb && *qb == 0) throw Error(Errc::DivisionByConstantZero, "division by constant zero");
    if (qa && qb) {
      switch (op) {
        case Op::Add: return constant(*qa + *qb);
        case Op::Sub: return constant(*qa - *qb);
        case Op::Mul: return constant(*qa * *qb);
        default: return constant(*qa / *qb);
      }
    }
    auto n = std::make_shared<Node>(op);
    n->kids = {a.node_, b.node_};
    return Sequence(std::move(n));
  }

  static std::optional<Rational> eval(const Node& e, Index n) {
    switch (e.op) {
      case Op::Const: return e.value;
      case Op::Var: return from_index(n);
      case Op::Neg: {
        auto v = eval(*e.kids[0], n);
        if (!v) return std::nullopt;
        return Rational(-*v);
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: {
        auto a = eval(*e.kids[0], n);
        if (!a) return std::nullopt;
        auto b = eval(*e.kids[1], n);
        if (!b) return std::nullopt;
        switch (e.op) {
          case Op::Add: return Rational(*a + *b);
          case Op::Sub: return Rational(*a - *b);
          case Op::Mul: return Rational(*a * *b);
          default:
            if (*b == 0) return std::nullopt;
            return Rational(*a / *b);
        }
      }
      case Op::Pow: {
        auto v = eval(*e.kids[0], n);
        if (!v || (*v == 0 && e.exponent < 0)) return std::nullopt;
        return rational_pow(*v, e.exponent);
      }
      case Op::Periodic: return e.list[n % e.list.size()];
      case Op::Prefix:
        if (n < e.list.size()) return e.list[n];
        return eval(*e.kids[0], n);
      case Op::IfMod: return eval(*e.kids[n % e.m == e.r ? 0 : 1], n);
      case Op::Random: {
        std::uint64_t x = detail::splitmix64(detail::splitmix64(e.seed) ^ n);
        Index j = x % (e.steps + 1);
        return Rational(e.value + (e.hi - e.value) * Rational(static_cast<unsigned long>(j)) /
                                      Rational(static_cast<unsigned long>(e.steps)));
      }
      case Op::PowerOf: {
        if (n > (Index{1} << 31)) throw Error(Errc::RepresentationLimit, "c^n at an index beyond 2^31");
        if (e.value == 0 && n == 0) return Rational(1);
        return rational_pow(e.value, static_cast<long>(n));
      }
      case Op::Min: {
        std::optional<Rational> best;
        for (const auto& k : e.kids) {
          auto v = eval(*k, n);
          if (!v) return std::nullopt;
          if (!best || *v < *best) best = v;
        }
        return best;
      }
      case Op::Recip: {
        auto v = eval(*e.kids[0], n);
        if (!v) return std::nullopt;
        return *v == 0 ? Rational(0) : Rational(1 / *v);
      }
      case Op::Callback: return e.fn(n);
    }
    return std::nullopt;
  }

  static std::optional<TameForm> tame_of(const NodePtr& p) {
    Sequence s(p);
    if (const TameForm* t = s.tame()) return *t;
    return std::nullopt;
  }

  static std::optional<TameForm> build_tame(const Node& e) {
    using detail::combine;
    using detail::map_pieces;
    using Fn = std::optional<RatFn>;
    switch (e.op) {
      case Op::Const: return detail::constant_form(e.value);
      case Op::Var: {
        TameForm t;
        t.classes = {{Piece{0, RatFn::identity()}}};
        return t;
      }
      case Op::Neg: {
        auto a = tame_of(e.kids[0]);
        if (!a) return std::nullopt;
        return map_pieces(*a, [](const Fn& f, Index, Index, Index from, Index, std::vector<Piece>& dst,
                                 std::vector<Index>&) { dst.push_back({from, f ? Fn(-*f) : Fn()}); });
      }
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: {
        auto a = tame_of(e.kids[0]);
        if (!a) return std::nullopt;
        auto b = tame_of(e.kids[1]);
        if (!b) return std::nullopt;
        Op op = e.op;
        return combine(*a, *b, [op](const Fn& x, const Fn& y, Index c, Index P, Index from, Index to,
                                    std::vector<Piece>& dst, std::vector<Index>& poles) {
          if (!x || !y) {
            dst.push_back({from, Fn()});
            return;
          }
          switch (op) {
            case Op::Add: dst.push_back({from, *x + *y}); break;
            case Op::Sub: dst.push_back({from, *x - *y}); break;
            case Op::Mul: dst.push_back({from, *x * *y}); break;
            default:
              if (y->is_zero()) {
                dst.push_back({from, Fn()});
              } else {
                detail::add_zeros(y->num(), c, P, from, to, poles);
                dst.push_back({from, *x / *y});
              }
          }
        });
      }
      case Op::Pow: {
        auto a = tame_of(e.kids[0]);
        if (!a) return std::nullopt;
        long k = e.exponent;
        return map_pieces(*a, [k](const Fn& f, Index c, Index P, Index from, Index to, std::vector<Piece>& dst,
                                  std::vector<Index>& poles) {
          if (!f || (k < 0 && f->is_zero())) {
            dst.push_back({from, Fn()});
            return;
          }
          RatFn base = *f, acc(Rational(1));
          if (k < 0) {
            detail::add_zeros(f->num(), c, P, from, to, poles);
            base = RatFn(Rational(1)) / base;
          }
          for (unsigned long e2 = static_cast<unsigned long>(k < 0 ? -k : k); e2; e2 >>= 1) {
            if (e2 & 1u) acc = acc * base;
            if (e2 > 1) base = base * base;
          }
          dst.push_back({from, acc});
        });
      }
      case Op::Periodic: {
        if (e.list.size() > kTamePeriodCap) return std::nullopt;
        TameForm t;
        t.period = e.list.size();
        for (Index c = 0; c < t.period; ++c) t.classes.push_back({Piece{c, RatFn(e.list[c])}});
        return t;
      }
      case Op::Prefix: {
        auto tail = tame_of(e.kids[0]);
        if (!tail) return std::nullopt;
        const Index L = e.list.size();
        TameForm t;
        t.period = tail->period;
        t.classes.resize(t.period);
        for (Index c = 0; c < t.period; ++c) {
          auto& dst = t.classes[c];
          for (Index i = c; i < L; i += t.period) dst.push_back({i, RatFn(e.list[i])});
          Index start = detail::align(L, c, t.period);
          const auto& src = tail->classes[c];
          for (std::size_t i = 0; i < src.size(); ++i) {
            Index to = i + 1 < src.size() ? src[i + 1].from : kUnbounded;
            if (to <= start) continue;
            dst.push_back({std::max(src[i].from, start), src[i].fn});
          }
          detail::compress(dst);
        }
        for (Index n : tail->poles) {
          if (n >= L) t.poles.push_back(n);
        }
        detail::normalize_poles(t);
        return t;
      }
      case Op::IfMod: {
        auto a = tame_of(e.kids[0]);
        if (!a) return std::nullopt;
        auto b = tame_of(e.kids[1]);
        if (!b) return std::nullopt;
        TameForm t;
        t.period = lcm_capped(lcm_capped(a->period, b->period, kTamePeriodCap), e.m, kTamePeriodCap);
        for (Index c = 0; c < t.period; ++c) {
          t.classes.push_back(detail::restrict_to(c % e.m == e.r ? *a : *b, t.period, c));
        }
        for (Index n : a->poles) {
          if (n % e.m == e.r) t.poles.push_back(n);
        }
        for (Index n : b->poles) {
          if (n % e.m != e.r) t.poles.push_back(n);
        }
        detail::normalize_poles(t);
        return t;
      }
      case Op::PowerOf: {
        TameForm t;
        if (e.value == -1) {
          t.period = 2;
          t.classes = {{Piece{0, RatFn(Rational(1))}}, {Piece{1, RatFn(Rational(-1))}}};
          return t;
        }
        if (e.value == 0) {
          t.classes = {{Piece{0, RatFn(Rational(1))}, Piece{1, RatFn(Rational(0))}}};
          return t;
        }
        return std::nullopt;
      }
      case Op::Min: {
        auto acc = tame_of(e.kids[0]);
        if (!acc) return std::nullopt;
        for (std::size_t i = 1; i < e.kids.size(); ++i) {
          auto b = tame_of(e.kids[i]);
          if (!b) return std::nullopt;
          acc = combine(*acc, *b, [](const Fn& x, const Fn& y, Index c, Index P, Index from, Index to,
                                     std::vector<Piece>& dst, std::vector<Index>&) {
            if (!x || !y) {
              dst.push_back({from, Fn()});
              return;
            }
            for (const auto& run : detail::class_sign_runs((*x - *y).sign_poly(), c, P, from, to)) {
              dst.push_back({run.first, run.sign <= 0 ? x : y});
            }
          });
        }
        return acc;
      }
      case Op::Recip: {
        auto a = tame_of(e.kids[0]);
        if (!a) return std::nullopt;
        return map_pieces(*a, [](const Fn& f, Index c, Index P, Index from, Index to, std::vector<Piece>& dst,
                                 std::vector<Index>&) {
          if (!f || f->is_zero()) {
            dst.push_back({from, f ? Fn(RatFn(Rational(0))) : Fn()});
            return;
          }
          RatFn inv = RatFn(Rational(1)) / *f;
          for (const auto& run : detail::class_sign_runs(f->num(), c, P, from, to)) {
            dst.push_back({run.first, run.sign == 0 ? RatFn(Rational(0)) : inv});
          }
        });
      }
      case Op::Random:
      case Op::Callback: return std::nullopt;
    }
    return std::nullopt;
  }

  static SignSets tame_sign_sets(const TameForm& t) {
    const Index P = t.period;
    std::vector<std::vector<ClassInterval>> neg(P), zero(P), pos(P);
    for (Index c = 0; c < P; ++c) {
      const auto& list = t.classes[c];
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (!list[i].fn) continue;
        Index to = i + 1 < list.size() ? list[i + 1].from : kUnbounded;
        for (const auto& run : detail::class_sign_runs(list[i].fn->sign_poly(), c, P, list[i].from, to)) {
          auto& dst = run.sign < 0 ? neg : run.sign == 0 ? zero : pos;
          dst[c].push_back({run.first, run.last});
        }
      }
    }
    IndexSet holes = IndexSet::finite(t.poles);
    return {difference(IndexSet::from_classes(P, std::move(neg)), holes),
            difference(IndexSet::from_classes(P, std::move(zero)), holes),
            difference(IndexSet::from_classes(P, std::move(pos)), holes)};
  }

  // ---- printing -----------------------------------------------------------

  static std::string rational_text(const Rational& q) { return to_string(q); }

  static int precedence(const Node& e) {
    switch (e.op) {
      case Op::Const:
        if (e.value.get_den() != 1) return 2;
        return e.value < 0 ? 3 : 5;
      case Op::Add:
      case Op::Sub: return 1;
      case Op::Mul:
      case Op::Div: return 2;
      case Op::Neg: return 3;
      case Op::Pow:
      case Op::PowerOf: return 4;
      default: return 5;
    }
  }

  static std::string wrap(const Node& e, int need) {
    std::string s = print(e);
    return precedence(e) < need ? "(" + s + ")" : s;
  }

  static std::string join(const std::vector<Rational>& list) {
    std::string out;
    for (std::size_t i = 0; i < list.size(); ++i) out += (i ? ", " : "") + rational_text(list[i]);
    return out;
  }

  static std::string print(const Node& e) {
    switch (e.op) {
      case Op::Const: return rational_text(e.value);
      case Op::Var: return "n";
      case Op::Neg: return "-" + wrap(*e.kids[0], 3);
      case Op::Add: return wrap(*e.kids[0], 1) + " + " + wrap(*e.kids[1], 2);
      case Op::Sub: return wrap(*e.kids[0], 1) + " - " + wrap(*e.kids[1], 2);
      case Op::Mul: return wrap(*e.kids[0], 2) + " * " + wrap(*e.kids[1], 3);
      case Op::Div: return wrap(*e.kids[0], 2) + " / " + wrap(*e.kids[1], 3);
      case Op::Pow: return wrap(*e.kids[0], 5) + "^" + std::to_string(e.exponent);
      case Op::PowerOf: {
        std::string base = rational_text(e.value);
        if (e.value < 0 || e.value.get_den() != 1) base = "(" + base + ")";
        return base + "^n";
      }
      case Op::Periodic: return "per[" + join(e.list) + "]";
      case Op::Prefix: return "prefix[" + join(e.list) + "; " + print(*e.kids[0]) + "]";
      case Op::IfMod:
        return "ifmod(" + std::to_string(e.m) + ", " + std::to_string(e.r) + "; " + print(*e.kids[0]) + "; " +
               print(*e.kids[1]) + ")";
      case Op::Random:
        return "rand(" + std::to_string(e.seed) + ", " + rational_text(e.value) + ", " + rational_text(e.hi) +
               ", " + std::to_string(e.steps) + ")";
      case Op::Min: {
        std::string out = "min(";
        for (std::size_t i = 0; i < e.kids.size(); ++i) out += (i ? ", " : "") + print(*e.kids[i]);
        return out + ")";
      }
      case Op::Recip: return "recip(" + print(*e.kids[0]) + ")";
      case Op::Callback: return "<" + e.name + ">";
    }
    return "?";
  }

  NodePtr node_;
};

}  // namespace hyperseq
