#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "hyperseq/error.hpp"
#include "hyperseq/rational.hpp"
#include "hyperseq/sequence.hpp"

namespace hyperseq {

// Closed interval; a missing endpoint is -inf (lo) or +inf (hi).
struct Interval {
  std::optional<Rational> lo, hi;

  bool contains(const Rational& x) const { return (!lo || *lo <= x) && (!hi || x <= *hi); }
  bool empty() const { return lo && hi && *lo > *hi; }
  bool bounded() const { return lo && hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

namespace detail {

inline bool lo_less(const std::optional<Rational>& a, const std::optional<Rational>& b) {
  if (!a) return static_cast<bool>(b);
  return b && *a < *b;
}

inline bool hi_less(const std::optional<Rational>& a, const std::optional<Rational>& b) {
  if (!b) return static_cast<bool>(a);
  return a && *a < *b;
}

inline std::string endpoint_str(const std::optional<Rational>& e, bool upper) {
  return e ? to_string(*e) : upper ? "inf" : "-inf";
}

}  // namespace detail

// Finite union of closed intervals, kept sorted with overlapping or touching
// components merged.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts) {
    std::erase_if(parts, [](const Interval& i) { return i.empty(); });
    std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return detail::lo_less(a.lo, b.lo); });
    for (auto& p : parts) {
      if (!parts_.empty()) {
        auto& last = parts_.back();
        bool touches = !last.hi || !p.lo || *p.lo <= *last.hi;
        if (touches) {
          if (detail::hi_less(last.hi, p.hi)) last.hi = p.hi;
          continue;
        }
      }
      parts_.push_back(p);
    }
  }

  static IntervalSet closed(Rational a, Rational b) { return IntervalSet({Interval{std::move(a), std::move(b)}}); }
  static IntervalSet point(const Rational& a) { return closed(a, a); }

  const std::vector<Interval>& components() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool bounded() const { return parts_.empty() || (parts_.front().lo && parts_.back().hi); }

  bool contains(const Rational& x) const {
    return std::any_of(parts_.begin(), parts_.end(), [&](const Interval& i) { return i.contains(x); });
  }

  // Within distance eps of the set.
  bool near(const Rational& x, const Rational& eps) const {
    return std::any_of(parts_.begin(), parts_.end(), [&](const Interval& i) {
      return (!i.lo || *i.lo - eps <= x) && (!i.hi || x <= *i.hi + eps);
    });
  }

  bool subset_of(const IntervalSet& other) const {
    return std::all_of(parts_.begin(), parts_.end(), [&](const Interval& p) {
      return std::any_of(other.parts_.begin(), other.parts_.end(), [&](const Interval& q) {
        return !detail::lo_less(p.lo, q.lo) && !detail::hi_less(q.hi, p.hi);
      });
    });
  }

  // Leftmost endpoint of the leftmost component; the right endpoint when that is
  // -inf, and 0 for the whole line.
  Rational designated() const {
    if (parts_.empty()) throw Error(Errc::EmptyLevel, "empty interval set has no point");
    const auto& first = parts_.front();
    if (first.lo) return *first.lo;
    if (first.hi) return *first.hi;
    return 0;
  }

  friend IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
    std::vector<Interval> out;
    for (const auto& p : a.parts_) {
      for (const auto& q : b.parts_) {
        Interval r{detail::lo_less(p.lo, q.lo) ? q.lo : p.lo, detail::hi_less(p.hi, q.hi) ? p.hi : q.hi};
        if (!r.empty()) out.push_back(r);
      }
    }
    return IntervalSet(std::move(out));
  }

  friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

  std::string str() const {
    if (parts_.empty()) return "empty";
    std::string s;
    for (const auto& p : parts_) {
      if (!s.empty()) s += " u ";
      s += "[" + detail::endpoint_str(p.lo, false) + ", " + detail::endpoint_str(p.hi, true) + "]";
    }
    return s;
  }

 private:
  std::vector<Interval> parts_;
};

// One component [lo(n), hi(n)] of a family indexed by n.
struct ComponentExpr {
  std::optional<Sequence> lo, hi;
};

// Union of components whose endpoints are sequences in n.
class FamilyExpr {
 public:
  FamilyExpr() = default;
  explicit FamilyExpr(std::vector<ComponentExpr> parts) : parts_(std::move(parts)) {}

  const std::vector<ComponentExpr>& components() const { return parts_; }

  IntervalSet at(Index n) const {
    std::vector<Interval> out;
    for (const auto& c : parts_) {
      Interval i;
      if (c.lo) i.lo = c.lo->at(n);
      if (c.hi) i.hi = c.hi->at(n);
      out.push_back(std::move(i));
    }
    return IntervalSet(std::move(out));
  }

  std::string str() const {
    std::string s;
    for (const auto& c : parts_) {
      if (!s.empty()) s += " u ";
      s += "[" + (c.lo ? c.lo->str() : std::string("-inf")) + ", " + (c.hi ? c.hi->str() : std::string("inf")) + "]";
    }
    return s;
  }

 private:
  std::vector<ComponentExpr> parts_;
};

}  // namespace hyperseq
