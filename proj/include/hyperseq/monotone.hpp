#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hyperseq/error.hpp"
#include "hyperseq/oracle.hpp"
#include "hyperseq/sequence.hpp"
#include "hyperseq/ultrapower.hpp"

namespace hyperseq {

enum class Case { Constant, Increasing, Decreasing };

constexpr std::string_view case_name(Case c) {
  switch (c) {
    case Case::Constant: return "ConstantCase";
    case Case::Increasing: return "IncreasingCase";
    case Case::Decreasing: return "DecreasingCase";
  }
  return "?";
}

// Where the class u of a sequence sits relative to its own terms:
// A = {n : u_n < u}, B = {n : u_n = u}, C = {n : u_n > u}.
struct Trichotomy {
  Case which = Case::Constant;
  IndexSet A, B, C;
  int mu_a = 0, mu_b = 0, mu_c = 0;
  Hyper u;
  // For tame input, the limit of u along the oracle's residue class.
  std::optional<Eventual> limit;
};

enum class Direction { StrictlyIncreasing, StrictlyDecreasing, Constant };

constexpr std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::StrictlyIncreasing: return "StrictlyIncreasing";
    case Direction::StrictlyDecreasing: return "StrictlyDecreasing";
    case Direction::Constant: return "Constant";
  }
  return "?";
}

struct Extraction {
  std::vector<Index> indices;
  std::vector<Rational> values;
  Direction direction = Direction::Constant;
};

// Indices strictly increasing and values monotone as declared.
inline bool well_formed(const Extraction& e) {
  if (e.indices.size() != e.values.size()) return false;
  for (std::size_t i = 1; i < e.indices.size(); ++i) {
    if (e.indices[i] <= e.indices[i - 1]) return false;
    const Rational &a = e.values[i - 1], &b = e.values[i];
    switch (e.direction) {
      case Direction::StrictlyIncreasing:
        if (!(a < b)) return false;
        break;
      case Direction::StrictlyDecreasing:
        if (!(a > b)) return false;
        break;
      case Direction::Constant:
        if (a != b) return false;
        break;
    }
  }
  return true;
}

inline constexpr Index kDefaultSearchBound = 100'000;

namespace detail {

inline Trichotomy finish_trichotomy(Trichotomy t, Oracle& o) {
  t.mu_b = o.measure(t.B);
  t.mu_a = o.measure(t.A);
  t.mu_c = o.measure(t.C);
  if (t.mu_a + t.mu_b + t.mu_c != 1) {
    throw Error(Errc::VerificationFailed, "trichotomy measures are " + std::to_string(t.mu_a) + ", " +
                                              std::to_string(t.mu_b) + ", " + std::to_string(t.mu_c));
  }
  t.which = t.mu_b ? Case::Constant : t.mu_a ? Case::Increasing : Case::Decreasing;
  return t;
}

// Locates u among the sampled term values by bisection on compare; the sampled
// ultrafilter can only settle on a value that occurs below the horizon.
inline Trichotomy classify_sampled(const Sequence& seq, Oracle& o) {
  Hyper u(seq, o);
  Index H = o.config().horizon;
  std::vector<Rational> values;
  for (Index n = 0; n < H; ++n) {
    if (auto v = seq.try_at(n)) values.push_back(*v);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::ptrdiff_t lo = 0, hi = static_cast<std::ptrdiff_t>(values.size()) - 1;
  while (lo <= hi) {
    std::ptrdiff_t mid = lo + (hi - lo) / 2;
    const Rational& v = values[static_cast<std::size_t>(mid)];
    switch (compare(u, v)) {
      case Cmp::LT: hi = mid - 1; break;
      case Cmp::GT: lo = mid + 1; break;
      case Cmp::EQ: {
        auto sets = (seq - Sequence::constant(v)).sign_sets(H);
        Trichotomy t{Case::Constant, sets.neg, sets.zero, sets.pos, 0, 0, 0, u, std::nullopt};
        return finish_trichotomy(std::move(t), o);
      }
    }
  }
  throw Error(Errc::AmbiguousAtHorizon,
              "the class of " + seq.str() + " equals no term value below horizon " + std::to_string(H));
}

}  // namespace detail

// Decides which of A, B, C has measure 1. For tame input the three sets are exact and
// the oracle is asked three measure queries (plus the residue of the period).
inline Trichotomy classify(const Sequence& seq, Oracle& o) {
  const TameForm* t = seq.tame();
  if (!t) return detail::classify_sampled(seq, o);
  Hyper u(seq, o);
  Index r = o.residue(t->period);
  const auto& fn = t->eventual(r);
  if (!fn) {
    throw Error(Errc::PreconditionFailed, seq.str() + " is undefined on the committed class " +
                                              std::to_string(r) + " mod " + std::to_string(t->period));
  }
  Eventual ev = eventual_of(*fn);
  Trichotomy tri{Case::Constant, IndexSet::empty(), IndexSet::empty(), IndexSet::empty(), 0, 0, 0, u, ev};
  switch (ev.kind) {
    case Eventual::Kind::PlusInfinity: tri.A = seq.defined_set(); break;
    case Eventual::Kind::MinusInfinity: tri.C = seq.defined_set(); break;
    case Eventual::Kind::Finite: {
      // u = L + δ with δ infinitesimal of sign ev.approach; a standard u_m is below u
      // iff u_m < L, or u_m = L and δ > 0.
      auto sets = (seq - Sequence::constant(ev.limit)).sign_sets();
      if (ev.approach == 0) {
        tri.A = sets.neg;
        tri.B = sets.zero;
        tri.C = sets.pos;
      } else if (ev.approach > 0) {
        tri.A = unite(sets.neg, sets.zero);
        tri.C = sets.pos;
      } else {
        tri.A = sets.neg;
        tri.C = unite(sets.zero, sets.pos);
      }
    }
  }
  return detail::finish_trichotomy(std::move(tri), o);
}

namespace detail {

// Least member n >= start of `pool` whose term satisfies `accept`. Scans a while,
// then (when `exact` can build the candidate set symbolically) jumps straight to it.
class Searcher {
 public:
  Searcher(const Sequence& seq, Index bound) : seq_(seq), remaining_(bound) {}

  template <class Accept>
  Index next(const IndexSet& pool, Index start, Accept accept,
             const std::function<std::optional<IndexSet>()>& exact) {
    constexpr Index kLocalScan = 2048;
    Index k;
    try {
      k = pool.count_below(start);
    } catch (const Error& e) {
      throw Error(Errc::SearchBoundExceeded, "search start " + std::to_string(start) + " beyond horizon");
    }
    for (Index scanned = 0;; ++scanned) {
      if (scanned == kLocalScan || remaining_ == 0) {
        if (auto candidates = exact()) {
          try {
            return intersect(*candidates, IndexSet::tail(start)).nth_member(0);
          } catch (const Error& e) {
            if (e.code() != Errc::EmptySet) throw;
            throw Error(Errc::VerificationFailed, "no admissible next index after " + std::to_string(start));
          }
        }
      }
      if (remaining_ == 0) throw Error(Errc::SearchBoundExceeded, "search bound exhausted");
      Index n;
      try {
        n = pool.nth_member(k++);
      } catch (const Error& e) {
        if (e.code() == Errc::ExhaustedAtHorizon) {
          throw Error(Errc::SearchBoundExceeded, std::string("ran past the horizon: ") + e.what());
        }
        if (e.code() == Errc::EmptySet) {
          throw Error(Errc::VerificationFailed, "no admissible next index after " + std::to_string(start));
        }
        throw;
      }
      --remaining_;
      if (accept(seq_.at(n))) return n;
    }
  }

 private:
  const Sequence& seq_;
  Index remaining_;
};

inline std::optional<IndexSet> sign_of_shift(const Sequence& seq, const Rational& q, int which) {
  if (!seq.is_tame()) return std::nullopt;
  auto sets = (seq - Sequence::constant(q)).sign_sets();
  return which < 0 ? sets.neg : which == 0 ? sets.zero : sets.pos;
}

}  // namespace detail

// The monotone subsequence guaranteed by the trichotomy: members of B in order, or
// greedily the earliest later term of A above (of C below) the last one taken.
inline Extraction extract(const Trichotomy& tri, Index count, Index search_bound = kDefaultSearchBound) {
  if (count == 0) throw Error(Errc::InvalidArgument, "count must be >= 1");
  const Sequence& seq = tri.u.repr();
  Extraction out;
  if (tri.which == Case::Constant) {
    out.direction = Direction::Constant;
    for (Index k = 0; k < count; ++k) {
      Index n;
      try {
        n = tri.B.nth_member(k);
      } catch (const Error& e) {
        if (e.code() == Errc::ExhaustedAtHorizon) throw Error(Errc::SearchBoundExceeded, e.what());
        throw;
      }
      out.indices.push_back(n);
      out.values.push_back(seq.at(n));
    }
    return out;
  }
  bool up = tri.which == Case::Increasing;
  const IndexSet& pool = up ? tri.A : tri.C;
  out.direction = up ? Direction::StrictlyIncreasing : Direction::StrictlyDecreasing;
  detail::Searcher search(seq, search_bound);
  Index n = search.next(pool, 0, [](const Rational&) { return true; }, [&] { return std::optional<IndexSet>(pool); });
  out.indices.push_back(n);
  out.values.push_back(seq.at(n));
  while (out.indices.size() < count) {
    Rational last = out.values.back();
    auto better = [&](const Rational& v) { return up ? v > last : v < last; };
    auto exact = [&]() -> std::optional<IndexSet> {
      auto s = detail::sign_of_shift(seq, last, up ? 1 : -1);
      if (!s || !pool.is_exact()) return std::nullopt;
      return intersect(pool, *s);
    };
    n = search.next(pool, n + 1, better, exact);
    out.indices.push_back(n);
    out.values.push_back(seq.at(n));
  }
  return out;
}

// Peaks of a finite prefix: i is a peak if u_i > u_j for every later j in the prefix.
// Two or more peaks are returned as a decreasing run; otherwise the greedy increasing
// run from index 0 (each next term the earliest strictly larger one).
inline Extraction peaks(const Sequence& seq, Index prefix_len) {
  if (prefix_len == 0) throw Error(Errc::PrefixTooShort, "prefix length must be >= 1");
  std::vector<Rational> v;
  v.reserve(prefix_len);
  for (Index i = 0; i < prefix_len; ++i) v.push_back(seq.at(i));
  Extraction out;
  std::vector<Index> found;
  std::optional<Rational> later_max;
  for (Index i = prefix_len; i-- > 0;) {
    if (!later_max || v[i] > *later_max) {
      found.push_back(i);
      later_max = v[i];
    }
  }
  if (found.size() >= 2) {
    std::reverse(found.begin(), found.end());
    out.direction = Direction::StrictlyDecreasing;
    for (Index i : found) {
      out.indices.push_back(i);
      out.values.push_back(v[i]);
    }
    return out;
  }
  out.direction = Direction::StrictlyIncreasing;
  Index cur = 0;
  out.indices.push_back(cur);
  out.values.push_back(v[cur]);
  for (Index j = 1; j < prefix_len; ++j) {
    if (v[j] > v[cur]) {
      cur = j;
      out.indices.push_back(cur);
      out.values.push_back(v[cur]);
    }
  }
  return out;
}

// For finite u above its standard part u0: a strictly decreasing run of terms above
// u0, each the earliest later term strictly between u0 and the previous one.
inline Extraction extract_decreasing_above_st(const Sequence& seq, Oracle& o, Index count,
                                              Index search_bound = kDefaultSearchBound) {
  if (count == 0) throw Error(Errc::InvalidArgument, "count must be >= 1");
  Hyper u(seq, o);
  if (!is_finite(u)) throw Error(Errc::PreconditionFailed, u.str() + " is not finite");
  Rational u0 = st(u).value;
  if (compare(u, u0) != Cmp::GT) {
    throw Error(Errc::PreconditionFailed, u.str() + " is not above its standard part " + to_string(u0));
  }
  IndexSet pool = seq.defined_set(o.config().horizon);
  Extraction out;
  out.direction = Direction::StrictlyDecreasing;
  detail::Searcher search(seq, search_bound);
  auto above = detail::sign_of_shift(seq, u0, 1);
  Index n = search.next(
      pool, 0, [&](const Rational& v) { return v > u0; }, [&] { return above; });
  out.indices.push_back(n);
  out.values.push_back(seq.at(n));
  while (out.indices.size() < count) {
    Rational last = out.values.back();
    auto exact = [&]() -> std::optional<IndexSet> {
      auto below = detail::sign_of_shift(seq, last, -1);
      if (!above || !below) return std::nullopt;
      return intersect(*above, *below);
    };
    n = search.next(
        pool, n + 1, [&](const Rational& v) { return v > u0 && v < last; }, exact);
    out.indices.push_back(n);
    out.values.push_back(seq.at(n));
  }
  return out;
}

}  // namespace hyperseq
