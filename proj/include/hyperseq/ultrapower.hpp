#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperseq/error.hpp"
#include "hyperseq/oracle.hpp"
#include "hyperseq/sequence.hpp"

namespace hyperseq {

enum class Cmp { LT, EQ, GT };

constexpr std::string_view cmp_name(Cmp c) {
  switch (c) {
    case Cmp::LT: return "LT";
    case Cmp::EQ: return "EQ";
    case Cmp::GT: return "GT";
  }
  return "?";
}

// The class [⟨u_n⟩] of a sequence in the ultrapower, bound to the oracle that decides it.
// The oracle is not owned and must outlive the value.
class Hyper {
 public:
  Hyper(Sequence repr, Oracle& oracle) : repr_(std::move(repr)), oracle_(&oracle) {}

  static Hyper embed(const Rational& q, Oracle& oracle) { return Hyper(Sequence::constant(q), oracle); }

  const Sequence& repr() const { return repr_; }
  Oracle& oracle() const { return *oracle_; }

  std::string str() const { return "[\xE2\x9F\xA8" + repr_.str() + "\xE2\x9F\xA9]"; }

  Hyper operator-() const { return Hyper(-repr_, *oracle_); }
  friend Hyper operator+(const Hyper& a, const Hyper& b) { return Hyper(a.repr_ + b.repr_, same(a, b)); }
  friend Hyper operator-(const Hyper& a, const Hyper& b) { return Hyper(a.repr_ - b.repr_, same(a, b)); }
  friend Hyper operator*(const Hyper& a, const Hyper& b) { return Hyper(a.repr_ * b.repr_, same(a, b)); }
  friend Hyper operator/(const Hyper& a, const Hyper& b) { return a * b.inv(); }

  // Representative 1/u_n off the zero set and 0 on it.
  Hyper inv() const {
    auto sets = repr_.sign_sets(oracle_->config().horizon);
    if (oracle_->measure(sets.zero) == 1) {
      throw Error(Errc::DivisionByZeroClass, str() + " is zero as a class");
    }
    return Hyper(repr_.recip(), *oracle_);
  }

 private:
  static Oracle& same(const Hyper& a, const Hyper& b) {
    if (a.oracle_ != b.oracle_) throw Error(Errc::MixedOracles, "operands are bound to different oracles");
    return *a.oracle_;
  }

  Sequence repr_;
  Oracle* oracle_;
};

// Limit behaviour of a tame class along the oracle's residue class; nothing if not tame.
inline std::optional<Eventual> tame_eventual(const Hyper& u) {
  const TameForm* t = u.repr().tame();
  if (!t) return std::nullopt;
  Index r = u.oracle().residue(t->period);
  const auto& fn = t->eventual(r);
  if (!fn) {
    throw Error(Errc::UndefinedClass, u.str() + " is undefined on the class " + std::to_string(r) + " mod " +
                                          std::to_string(t->period));
  }
  return eventual_of(*fn);
}

// Sign of the terms for all large n along the class.
inline int eventual_sign(const Eventual& ev) {
  switch (ev.kind) {
    case Eventual::Kind::PlusInfinity: return 1;
    case Eventual::Kind::MinusInfinity: return -1;
    case Eventual::Kind::Finite: break;
  }
  return ev.limit != 0 ? sgn(ev.limit) : ev.approach;
}

// u < v iff {n : u_n < v_n} has measure 1.
//
// A tame difference whose sign sets reach past the index range is decided by its
// eventual sign on the committed class, which is what the measure would report.
inline Cmp compare(const Hyper& u, const Hyper& v) {
  Hyper d = u - v;
  Oracle& o = u.oracle();
  std::optional<SignSets> sets;
  try {
    sets = d.repr().sign_sets(o.config().horizon);
  } catch (const Error& e) {
    if (e.code() != Errc::RepresentationLimit || !d.repr().is_tame()) throw;
    int s = eventual_sign(*tame_eventual(d));
    return s < 0 ? Cmp::LT : s == 0 ? Cmp::EQ : Cmp::GT;
  }
  if (o.measure(sets->neg) == 1) return Cmp::LT;
  if (o.measure(sets->zero) == 1) return Cmp::EQ;
  if (o.measure(sets->pos) == 1) return Cmp::GT;
  throw Error(Errc::UndefinedClass, d.str() + " is undefined on a set of measure 1");
}

inline Cmp compare(const Hyper& u, const Rational& q) { return compare(u, Hyper::embed(q, u.oracle())); }

inline std::vector<Rational> default_bound_schedule() {
  std::vector<Rational> out;
  Rational r(1);
  for (int k = 0; k <= 64; ++k, r *= 2) out.push_back(r);
  return out;
}

// Some r in the schedule with -r < u < r, or nothing when u is tame and infinite.
inline std::optional<Rational> finite_bound(const Hyper& u,
                                            const std::vector<Rational>& schedule = default_bound_schedule()) {
  if (auto ev = tame_eventual(u)) {
    if (ev->kind != Eventual::Kind::Finite) return std::nullopt;
    Rational r = abs(ev->limit) + 1;
    for (const auto& s : schedule) {
      if (s >= r) return s;
    }
    return r;
  }
  for (const auto& r : schedule) {
    if (compare(u, r) == Cmp::LT && compare(u, Rational(-r)) == Cmp::GT) return r;
  }
  throw Error(Errc::NotDecidedAtBound,
              u.str() + " is not bounded by any r in the schedule (largest " +
                  (schedule.empty() ? std::string("none") : to_string(schedule.back())) + ")");
}

inline bool is_finite(const Hyper& u, const std::vector<Rational>& schedule = default_bound_schedule()) {
  return finite_bound(u, schedule).has_value();
}

struct StandardPart {
  Rational value;
  bool exact = false;
};

inline const Rational& default_eps() {
  static const Rational eps(Integer(1), Integer(1000000000));
  return eps;
}

// Bisection on compare(u, mid) over [-r, r] until the width is at most eps.
inline StandardPart st_bisection(const Hyper& u, const Rational& eps = default_eps()) {
  if (eps <= 0) throw Error(Errc::InvalidArgument, "eps must be positive");
  std::optional<Rational> bound;
  try {
    bound = finite_bound(u);
  } catch (const Error& e) {
    if (e.code() != Errc::NotDecidedAtBound) throw;
    throw Error(Errc::NotFinite, e.what());
  }
  if (!bound) throw Error(Errc::NotFinite, u.str() + " is infinite");
  Rational lo = -*bound, hi = *bound;
  while (hi - lo > eps) {
    Rational mid = (lo + hi) / 2;
    switch (compare(u, mid)) {
      case Cmp::LT: hi = mid; break;
      case Cmp::GT: lo = mid; break;
      case Cmp::EQ: return {mid, true};
    }
  }
  return {Rational((lo + hi) / 2), false};
}

// Exact limit along the oracle's class for tame u; otherwise bisection.
inline StandardPart st(const Hyper& u, const Rational& eps = default_eps()) {
  if (eps <= 0) throw Error(Errc::InvalidArgument, "eps must be positive");
  if (auto ev = tame_eventual(u)) {
    if (ev->kind != Eventual::Kind::Finite) throw Error(Errc::NotFinite, u.str() + " is infinite");
    return {ev->limit, true};
  }
  return st_bisection(u, eps);
}

}  // namespace hyperseq
