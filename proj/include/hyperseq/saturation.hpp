#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hyperseq/error.hpp"
#include "hyperseq/interval.hpp"
#include "hyperseq/oracle.hpp"
#include "hyperseq/sequence.hpp"
#include "hyperseq/ultrapower.hpp"

namespace hyperseq {

inline constexpr Index kDefaultDepth = 64;

// Levels A_0, A_1, ... of a family; the first `depth` of them are materialized and checked.
struct NestedFamily {
  std::function<IntervalSet(Index)> level;
  Index depth = kDefaultDepth;
  // c_n = designated point of A_n, as an expression when one is known.
  std::optional<Sequence> witness_rule;
  std::string name;

  static NestedFamily from_expr(const FamilyExpr& f, Index depth = kDefaultDepth) {
    NestedFamily fam{[f](Index n) { return f.at(n); }, depth, std::nullopt, f.str()};
    const auto& parts = f.components();
    if (parts.size() == 1) {
      const auto& c = parts.front();
      fam.witness_rule = c.lo ? *c.lo : c.hi ? *c.hi : Sequence::constant(0);
    } else if (!parts.empty() && std::all_of(parts.begin(), parts.end(), [](const ComponentExpr& c) { return c.lo.has_value(); })) {
      std::vector<Sequence> los;
      for (const auto& c : parts) los.push_back(*c.lo);
      fam.witness_rule = Sequence::min(std::move(los));
    }
    return fam;
  }

  // Past the end of the list the last level repeats.
  static NestedFamily from_levels(std::vector<IntervalSet> levels) {
    if (levels.empty()) throw Error(Errc::InvalidArgument, "family needs at least one level");
    std::vector<Rational> head;
    std::optional<Rational> last;
    try {
      for (std::size_t k = 0; k + 1 < levels.size(); ++k) head.push_back(levels[k].designated());
      last = levels.back().designated();
    } catch (const Error&) {
      last.reset();
    }
    std::string name = "levels(" + std::to_string(levels.size()) + ")";
    Index depth = levels.size();
    NestedFamily fam{[levels = std::move(levels)](Index n) { return levels[std::min<Index>(n, levels.size() - 1)]; },
                     depth, std::nullopt, name};
    if (last) {
      fam.witness_rule = head.empty() ? Sequence::constant(*last) : Sequence::prefix(head, Sequence::constant(*last));
    }
    return fam;
  }

  static NestedFamily from_generator(std::string name, std::function<IntervalSet(Index)> level,
                                     Index depth = kDefaultDepth, std::optional<Sequence> witness_rule = std::nullopt) {
    return NestedFamily{std::move(level), depth, std::move(witness_rule), std::move(name)};
  }
};

struct SaturationWitness {
  Hyper c;
  // {n : c_n ∈ A_m} for each materialized m, and its measure.
  std::vector<IndexSet> membership;
  std::vector<int> measures;
};

namespace detail {

inline IndexSet within(const Sequence& c, const IntervalSet& k, Index horizon) {
  IndexSet out = IndexSet::empty();
  for (const auto& part : k.components()) {
    IndexSet s = c.defined_set(horizon);
    if (part.lo) {
      auto sets = (c - Sequence::constant(*part.lo)).sign_sets(horizon);
      s = intersect(s, unite(sets.zero, sets.pos));
    }
    if (part.hi) {
      auto sets = (c - Sequence::constant(*part.hi)).sign_sets(horizon);
      s = intersect(s, unite(sets.zero, sets.neg));
    }
    out = unite(out, s);
  }
  return out;
}

inline bool contains_tail(const IndexSet& s, Index m) {
  if (s.is_exact()) return difference(IndexSet::tail(m), s) == IndexSet::empty();
  for (Index n = m; n < s.horizon(); ++n) {
    if (!s.contains(n)) return false;
  }
  return true;
}

inline std::vector<IntervalSet> materialize(const NestedFamily& fam) {
  if (fam.depth == 0) throw Error(Errc::InvalidArgument, "depth must be >= 1");
  std::vector<IntervalSet> levels;
  for (Index n = 0; n < fam.depth; ++n) {
    levels.push_back(fam.level(n));
    if (levels.back().empty()) throw Error(Errc::EmptyLevel, "level " + std::to_string(n) + " is empty");
    if (n > 0 && !levels[n].subset_of(levels[n - 1])) {
      throw Error(Errc::NotNested, "level " + std::to_string(n) + " = " + levels[n].str() + " is not inside level " +
                                       std::to_string(n - 1) + " = " + levels[n - 1].str());
    }
  }
  return levels;
}

}  // namespace detail

// The diagonal witness c = [⟨c_n⟩], c_n the designated point of A_n. Each membership
// set {n : c_n ∈ A_m} is checked to contain the tail from m and to have measure 1.
inline SaturationWitness saturation_witness(const NestedFamily& fam, Oracle& o) {
  auto levels = detail::materialize(fam);
  std::optional<Sequence> rule = fam.witness_rule;
  if (rule) {
    for (Index n = 0; n < levels.size() && rule; ++n) {
      auto v = rule->try_at(n);
      if (!v || *v != levels[n].designated()) rule.reset();
    }
  }
  Index horizon = o.config().horizon;
  if (!rule) {
    auto point = [level = fam.level](Index n) -> std::optional<Rational> {
      try {
        return level(n).designated();
      } catch (const Error&) {
        return std::nullopt;
      }
    };
    auto cache = std::make_shared<std::vector<std::optional<Rational>>>();
    for (Index n = 0; n < horizon; ++n) cache->push_back(point(n));
    rule = Sequence::callback("point of " + fam.name, [cache, point](Index n) {
      return n < cache->size() ? (*cache)[n] : point(n);
    });
  }
  SaturationWitness w{Hyper(*rule, o), {}, {}};
  for (Index m = 0; m < levels.size(); ++m) {
    IndexSet s = detail::within(*rule, levels[m], horizon);
    if (!detail::contains_tail(s, m)) {
      throw Error(Errc::NotNested, "the designated points from level " + std::to_string(m) +
                                       " on leave level " + std::to_string(m) + " past the materialized depth");
    }
    int mu = o.measure(s);
    if (mu != 1) throw Error(Errc::VerificationFailed, "membership set for level " + std::to_string(m) + " has measure 0");
    w.membership.push_back(std::move(s));
    w.measures.push_back(mu);
  }
  return w;
}

// Witness for the running intersections B_n = A_0 ∩ ... ∩ A_n.
inline SaturationWitness fip_witness(const std::vector<IntervalSet>& sets, Oracle& o) {
  if (sets.empty()) throw Error(Errc::InvalidArgument, "no sets given");
  std::vector<IntervalSet> running;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    running.push_back(k == 0 ? sets[0] : intersect(running.back(), sets[k]));
    if (running.back().empty()) {
      std::string levels = "{0";
      for (std::size_t j = 1; j <= k; ++j) levels += "," + std::to_string(j);
      throw Error(Errc::FIPViolated, "levels " + levels + "} have empty intersection");
    }
  }
  return saturation_witness(NestedFamily::from_levels(std::move(running)), o);
}

// st(y) when y is finite and st(y) lies in k (within eps when st is approximate).
inline std::optional<Rational> is_nearstandard(const Hyper& y, const IntervalSet& k,
                                               const Rational& eps = default_eps()) {
  Oracle& o = y.oracle();
  int mu;
  try {
    mu = o.measure(detail::within(y.repr(), k, o.config().horizon));
  } catch (const Error& e) {
    if (e.code() != Errc::AmbiguousAtHorizon) throw;
    throw Error(Errc::MembershipUndecided, e.what());
  }
  if (mu != 1) throw Error(Errc::PreconditionFailed, y.str() + " is not in *" + k.str());
  if (!is_finite(y)) return std::nullopt;
  auto p = st(y, eps);
  if (p.exact ? k.contains(p.value) : k.near(p.value, eps)) return p.value;
  return std::nullopt;
}

struct CantorPoint {
  Rational value;
  bool exact = false;
};

// A standard point of every materialized level: the standard part of the saturation witness.
inline CantorPoint cantor_intersection(const NestedFamily& fam, Oracle& o, const Rational& eps = default_eps()) {
  if (fam.depth == 0) throw Error(Errc::InvalidArgument, "depth must be >= 1");
  IntervalSet first = fam.level(0);
  if (!first.bounded()) throw Error(Errc::NotBounded, "level 0 = " + first.str() + " is unbounded");
  auto levels = detail::materialize(fam);
  auto w = saturation_witness(fam, o);
  auto p = st(w.c, eps);
  for (Index m = 0; m < levels.size(); ++m) {
    bool ok = p.exact ? levels[m].contains(p.value) : levels[m].near(p.value, eps);
    if (!ok) {
      throw Error(Errc::VerificationFailed, to_string(p.value) + " is not in level " + std::to_string(m) + " = " +
                                                levels[m].str());
    }
  }
  return {p.value, p.exact};
}

}  // namespace hyperseq
