#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hyperseq/error.hpp"
#include "hyperseq/poly.hpp"
#include "hyperseq/rational.hpp"

namespace hyperseq {

inline constexpr Index kDefaultHorizon = 10'000;
inline constexpr Index kModulusCap = Index{1} << 20;

// Members n ≡ cls (mod h) with first <= n <= last.
struct HeadRun {
  Index cls;
  Index first;
  Index last;

  friend bool operator==(const HeadRun&, const HeadRun&) = default;
};

// Elements first, first+P, ..., last of one residue class mod P; last may be kUnbounded.
struct ClassInterval {
  Index first;
  Index last;

  friend bool operator==(const ClassInterval&, const ClassInterval&) = default;
};

inline std::vector<Index> divisors(Index m) {
  std::vector<Index> small, large;
  for (Index d = 1; d * d <= m; ++d) {
    if (m % d != 0) continue;
    small.push_back(d);
    if (d != m / d) large.push_back(m / d);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

namespace detail {

struct ExactRep {
  Index threshold = 0;            // N: membership is periodic from here on
  Index modulus = 1;              // m: minimal period of the tail
  std::vector<std::uint8_t> tail; // size m
  std::vector<Index> residues;    // R, sorted
  std::vector<Index> tail_prefix; // tail_prefix[i] = #{r in R : r < i}
  Index head_modulus = 1;         // h: minimal modulus making the head class-wise contiguous
  std::vector<HeadRun> runs;      // members below N, sorted by cls

  bool tail_member(Index n) const { return tail[n % modulus] != 0; }

  const HeadRun* run_for(Index cls) const {
    auto it = std::lower_bound(runs.begin(), runs.end(), cls,
                               [](const HeadRun& r, Index c) { return r.cls < c; });
    return it != runs.end() && it->cls == cls ? &*it : nullptr;
  }

  bool member(Index n) const {
    if (n >= threshold) return tail_member(n);
    const HeadRun* r = run_for(n % head_modulus);
    return r != nullptr && r->first <= n && n <= r->last;
  }

  // #{tail-pattern members < x}
  Index tail_count(Index x) const {
    return (x / modulus) * residues.size() + tail_prefix[x % modulus];
  }

  Index head_count_below(Index x) const {
    Index total = 0;
    for (const auto& r : runs) {
      if (x <= r.first) continue;
      Index hi = std::min(r.last, x - 1);
      total += (hi - r.first) / head_modulus + 1;
    }
    return total;
  }

  Index count_below(Index x) const {
    if (x <= threshold) return head_count_below(x);
    return head_count_below(threshold) + tail_count(x) - tail_count(threshold);
  }

  bool operator==(const ExactRep& o) const {
    return threshold == o.threshold && modulus == o.modulus && tail == o.tail &&
           head_modulus == o.head_modulus && runs == o.runs;
  }
};

struct SampledRep {
  Index horizon = 0;
  std::function<std::vector<bool>()> make;
  mutable std::once_flag once;
  mutable std::vector<bool> bits;

  const std::vector<bool>& get() const {
    std::call_once(once, [this] {
      bits = make();
      bits.resize(horizon, false);
    });
    return bits;
  }
};

// Minimal h such that each class mod h meets the segments in one contiguous run.
inline std::optional<std::vector<HeadRun>> contiguous_runs(
    const std::vector<std::pair<ClassInterval, Index>>& segments, Index h) {
  struct Acc {
    Index cls, lo, hi, count;
  };
  std::vector<Acc> acc;
  for (const auto& [seg, step] : segments) {
    Index g = std::gcd(step, h);
    Index lcm = step / g * h;
    for (Index j = 0; j < h / g; ++j) {
      Index start = seg.first + j * step;
      if (start > seg.last) break;
      Index cnt = (seg.last - start) / lcm + 1;
      acc.push_back({start % h, start, start + (cnt - 1) * lcm, cnt});
    }
  }
  std::sort(acc.begin(), acc.end(), [](const Acc& a, const Acc& b) { return a.cls < b.cls; });
  std::vector<HeadRun> runs;
  for (std::size_t i = 0; i < acc.size();) {
    Index cls = acc[i].cls, lo = acc[i].lo, hi = acc[i].hi, count = 0;
    std::size_t j = i;
    for (; j < acc.size() && acc[j].cls == cls; ++j) {
      lo = std::min(lo, acc[j].lo);
      hi = std::max(hi, acc[j].hi);
      count += acc[j].count;
    }
    if ((hi - lo) / h + 1 != count) return std::nullopt;
    runs.push_back({cls, lo, hi});
    i = j;
  }
  return runs;
}

}  // namespace detail

// A subset of ℕ. Exact sets are eventually periodic and kept in canonical form:
// minimal threshold N, minimal tail modulus m, and the members below N stored as
// one contiguous run per residue class of the minimal head modulus h.
// Sampled sets are known only below their horizon.
class IndexSet {
 public:
  enum class Kind { Exact, Sampled };

  IndexSet() : IndexSet(empty()) {}

  // ---- construction -------------------------------------------------------

  // per_class[c] lists intervals along the class c mod period.
  static IndexSet from_classes(Index period, std::vector<std::vector<ClassInterval>> per_class) {
    if (period == 0 || per_class.size() != period) {
      throw Error(Errc::InvalidArgument, "from_classes: one interval list per class required");
    }
    const Index P = period;
    for (Index c = 0; c < P; ++c) {
      auto& list = per_class[c];
      for (const auto& iv : list) {
        if (iv.first % P != c || (iv.last != kUnbounded && (iv.last % P != c || iv.last < iv.first))) {
          throw Error(Errc::InvalidArgument, "from_classes: interval off its class");
        }
      }
      std::sort(list.begin(), list.end(),
                [](const ClassInterval& a, const ClassInterval& b) { return a.first < b.first; });
      std::vector<ClassInterval> merged;
      for (const auto& iv : list) {
        if (!merged.empty() &&
            (merged.back().last == kUnbounded || merged.back().last + P >= iv.first)) {
          if (merged.back().last != kUnbounded &&
              (iv.last == kUnbounded || iv.last > merged.back().last)) {
            merged.back().last = iv.last;
          }
          continue;
        }
        merged.push_back(iv);
      }
      list = std::move(merged);
    }

    auto rep = std::make_shared<detail::ExactRep>();
    std::vector<std::uint8_t> tail_in(P);
    for (Index c = 0; c < P; ++c) {
      tail_in[c] = !per_class[c].empty() && per_class[c].back().last == kUnbounded;
    }
    Index m = P;
    for (Index d : divisors(P)) {
      bool ok = true;
      for (Index i = d; i < P && ok; ++i) ok = tail_in[i] == tail_in[i % d];
      if (ok) {
        m = d;
        break;
      }
    }
    rep->modulus = m;
    rep->tail.assign(tail_in.begin(), tail_in.begin() + static_cast<std::ptrdiff_t>(m));
    rep->tail_prefix.assign(m + 1, 0);
    for (Index r = 0; r < m; ++r) {
      if (rep->tail[r]) rep->residues.push_back(r);
      rep->tail_prefix[r + 1] = rep->tail_prefix[r] + rep->tail[r];
    }

    Index N = 0;
    for (Index c = 0; c < P; ++c) {
      const auto& list = per_class[c];
      if (list.empty()) continue;
      if (tail_in[c]) {
        Index s = list.back().first;
        if (s > c) N = std::max(N, s - P + 1);
      } else {
        N = std::max(N, list.back().last + 1);
      }
    }
    rep->threshold = N;

    std::vector<std::pair<ClassInterval, Index>> segments;
    Index head_max = 0;
    for (Index c = 0; c < P; ++c) {
      for (const auto& iv : per_class[c]) {
        if (iv.first >= N) break;
        Index last = iv.last == kUnbounded || iv.last >= N ? iv.first + (N - 1 - iv.first) / P * P
                                                           : iv.last;
        segments.push_back({{iv.first, last}, P});
        head_max = std::max(head_max, last);
      }
    }
    if (segments.empty()) {
      rep->head_modulus = 1;
    } else {
      Index limit = std::min<Index>(head_max + 1, kModulusCap);
      bool found = false;
      for (Index h = 1; h <= limit; ++h) {
        if (auto runs = detail::contiguous_runs(segments, h)) {
          rep->head_modulus = h;
          rep->runs = std::move(*runs);
          found = true;
          break;
        }
      }
      if (!found) {
        throw Error(Errc::RepresentationLimit,
                    "finite part of set needs a head modulus above " + std::to_string(kModulusCap));
      }
    }
    return IndexSet(std::shared_ptr<const detail::ExactRep>(std::move(rep)));
  }

  static IndexSet empty() { return from_classes(1, {{}}); }
  static IndexSet all() { return tail(0); }
  static IndexSet tail(Index n) { return from_classes(1, {{{n, kUnbounded}}}); }

  static IndexSet residues(Index m, const std::vector<Index>& rs) {
    if (m == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
    if (m > kModulusCap) throw Error(Errc::RepresentationLimit, "modulus too large");
    std::vector<std::vector<ClassInterval>> cls(m);
    for (Index r : rs) {
      if (r >= m) throw Error(Errc::InvalidArgument, "residue " + std::to_string(r) + " >= modulus");
      cls[r] = {{r, kUnbounded}};
    }
    return from_classes(m, std::move(cls));
  }

  static IndexSet finite(std::vector<Index> members) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    std::vector<ClassInterval> list;
    for (Index n : members) {
      if (n >= kIndexLimit) throw Error(Errc::RepresentationLimit, "index beyond 2^62");
      if (!list.empty() && list.back().last + 1 == n) list.back().last = n;
      else list.push_back({n, n});
    }
    return from_classes(1, {std::move(list)});
  }

  static IndexSet cofinite_except(std::vector<Index> missing) {
    return complement(finite(std::move(missing)));
  }

  // Exact form: tail (m, R) from N on, explicit overrides below N.
  static IndexSet from_exceptions(Index N, Index m, const std::vector<Index>& rs,
                                  const std::vector<std::pair<Index, bool>>& overrides) {
    if (m == 0 || m > kModulusCap) throw Error(Errc::InvalidArgument, "bad modulus");
    if (N > (Index{1} << 24)) {
      throw Error(Errc::RepresentationLimit, "explicit exception list beyond 2^24 indices");
    }
    std::vector<std::uint8_t> pattern(m, 0);
    for (Index r : rs) {
      if (r >= m) throw Error(Errc::InvalidArgument, "residue out of range");
      pattern[r] = 1;
    }
    std::vector<std::uint8_t> below(N);
    for (Index n = 0; n < N; ++n) below[n] = pattern[n % m];
    for (const auto& [idx, in] : overrides) {
      if (idx >= N) throw Error(Errc::InvalidArgument, "exception index not below threshold");
      below[idx] = in;
    }
    std::vector<std::vector<ClassInterval>> cls(m);
    for (Index c = 0; c < m; ++c) {
      auto& list = cls[c];
      for (Index n = c; n < N; n += m) {
        if (!below[n]) continue;
        if (!list.empty() && list.back().last + m == n) list.back().last = n;
        else list.push_back({n, n});
      }
      if (pattern[c]) {
        Index start = c;
        if (N > c) start = c + ((N - c + m - 1) / m) * m;
        if (!list.empty() && list.back().last + m == start) list.back().last = kUnbounded;
        else list.push_back({start, kUnbounded});
      }
    }
    return from_classes(m, std::move(cls));
  }

  // Canonical fields given directly (as produced by serialization); re-canonicalized.
  static IndexSet from_runs(Index N, Index m, const std::vector<Index>& rs, Index h,
                            const std::vector<HeadRun>& runs) {
    if (m == 0 || h == 0) throw Error(Errc::InvalidArgument, "bad modulus");
    auto rep = std::make_shared<detail::ExactRep>();
    rep->threshold = N;
    rep->modulus = m;
    rep->tail.assign(m, 0);
    for (Index r : rs) {
      if (r >= m) throw Error(Errc::InvalidArgument, "residue out of range");
      rep->tail[r] = 1;
    }
    rep->tail_prefix.assign(m + 1, 0);
    for (Index r = 0; r < m; ++r) {
      if (rep->tail[r]) rep->residues.push_back(r);
      rep->tail_prefix[r + 1] = rep->tail_prefix[r] + rep->tail[r];
    }
    rep->head_modulus = h;
    rep->runs = runs;
    for (const auto& r : rep->runs) {
      if (r.cls >= h || r.first % h != r.cls || r.last % h != r.cls || r.last < r.first || r.last >= N) {
        throw Error(Errc::InvalidArgument, "malformed head run");
      }
    }
    std::sort(rep->runs.begin(), rep->runs.end(),
              [](const HeadRun& a, const HeadRun& b) { return a.cls < b.cls; });
    IndexSet raw(std::shared_ptr<const detail::ExactRep>(std::move(rep)));
    return combine(raw, raw, [](bool a, bool) { return a; });
  }

  static IndexSet sampled(std::function<bool(Index)> pred, Index horizon) {
    auto rep = std::make_shared<detail::SampledRep>();
    rep->horizon = horizon;
    rep->make = [pred = std::move(pred), horizon] {
      std::vector<bool> b(horizon);
      for (Index n = 0; n < horizon; ++n) b[n] = pred(n);
      return b;
    };
    return IndexSet(std::shared_ptr<const detail::SampledRep>(std::move(rep)));
  }

  static IndexSet from_bits(std::vector<bool> bits) {
    auto rep = std::make_shared<detail::SampledRep>();
    rep->horizon = bits.size();
    rep->make = [b = std::move(bits)] { return b; };
    return IndexSet(std::shared_ptr<const detail::SampledRep>(std::move(rep)));
  }

  // ---- queries ------------------------------------------------------------

  Kind kind() const { return std::holds_alternative<ExactPtr>(rep_) ? Kind::Exact : Kind::Sampled; }
  bool is_exact() const { return kind() == Kind::Exact; }
  bool is_sampled() const { return kind() == Kind::Sampled; }

  Index threshold() const { return exact().threshold; }
  Index modulus() const { return exact().modulus; }
  const std::vector<Index>& residues() const { return exact().residues; }
  Index head_modulus() const { return exact().head_modulus; }
  const std::vector<HeadRun>& head_runs() const { return exact().runs; }
  Index horizon() const { return sampled_rep().horizon; }
  const std::vector<bool>& bits() const { return sampled_rep().get(); }

  // Residue-pattern membership, ignoring the finite part below N.
  bool tail_contains(Index n) const { return exact().tail_member(n); }

  // Absent only for Sampled sets at or beyond their horizon.
  std::optional<bool> member(Index n) const {
    if (is_exact()) return exact().member(n);
    const auto& s = sampled_rep();
    if (n >= s.horizon) return std::nullopt;
    return s.get()[n];
  }

  bool contains(Index n) const {
    auto m = member(n);
    if (!m) {
      throw Error(Errc::ExhaustedAtHorizon,
                  "membership of " + std::to_string(n) + " beyond horizon " + std::to_string(horizon()));
    }
    return *m;
  }

  bool is_finite_set() const {
    if (is_sampled()) throw Error(Errc::UndecidableOnSampled, "finiteness of a sampled set");
    return exact().residues.empty();
  }

  bool is_cofinite_set() const {
    if (is_sampled()) throw Error(Errc::UndecidableOnSampled, "cofiniteness of a sampled set");
    return exact().residues.size() == exact().modulus;
  }

  // Number of members below x. Sampled sets require x <= horizon.
  Index count_below(Index x) const {
    if (is_exact()) return exact().count_below(x);
    const auto& s = sampled_rep();
    if (x > s.horizon) throw Error(Errc::ExhaustedAtHorizon, "count beyond horizon");
    const auto& b = s.get();
    return static_cast<Index>(std::count(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(x), true));
  }

  // k-th smallest member, 0-based.
  Index nth_member(Index k) const {
    if (is_sampled()) {
      const auto& b = bits();
      Index seen = 0;
      for (Index n = 0; n < b.size(); ++n) {
        if (b[n] && seen++ == k) return n;
      }
      if (seen == 0) {
        throw Error(Errc::ExhaustedAtHorizon,
                    "no members below horizon " + std::to_string(b.size()));
      }
      throw Error(Errc::ExhaustedAtHorizon, "fewer than " + std::to_string(k + 1) +
                                                " members below horizon " + std::to_string(b.size()));
    }
    const auto& e = exact();
    Index head_total = e.head_count_below(e.threshold);
    if (k < head_total) {
      Index lo = 0, hi = e.threshold - 1;
      while (lo < hi) {
        Index mid = lo + (hi - lo) / 2;
        if (e.head_count_below(mid + 1) >= k + 1) hi = mid;
        else lo = mid + 1;
      }
      return lo;
    }
    if (e.residues.empty()) {
      if (head_total == 0) throw Error(Errc::EmptySet, "set is empty");
      throw Error(Errc::EmptySet, "finite set has only " + std::to_string(head_total) + " members");
    }
    Index target = e.tail_count(e.threshold) + (k - head_total);
    Index per = e.residues.size();
    Index block = target / per;
    if (block > kIndexLimit / e.modulus) throw Error(Errc::RepresentationLimit, "member beyond 2^62");
    return block * e.modulus + e.residues[target % per];
  }

  // ---- algebra ------------------------------------------------------------

  friend IndexSet complement(const IndexSet& s) {
    return combine(s, s, [](bool a, bool) { return !a; });
  }
  friend IndexSet intersect(const IndexSet& s, const IndexSet& t) {
    return combine(s, t, [](bool a, bool b) { return a && b; });
  }
  friend IndexSet unite(const IndexSet& s, const IndexSet& t) {
    return complement(intersect(complement(s), complement(t)));
  }
  friend IndexSet difference(const IndexSet& s, const IndexSet& t) {
    return intersect(s, complement(t));
  }

  // Extensional for Exact sets; Sampled sets compare horizon and bits.
  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    if (a.kind() != b.kind()) return false;
    if (a.is_exact()) return a.exact() == b.exact();
    return a.horizon() == b.horizon() && a.bits() == b.bits();
  }

  // Overrides below N relative to the tail pattern, when there are at most `limit`.
  std::optional<std::vector<std::pair<Index, bool>>> exceptions(Index limit = 10'000) const {
    const auto& e = exact();
    std::vector<std::pair<Index, bool>> out;
    if (e.threshold > (Index{1} << 24)) return std::nullopt;
    for (Index n = 0; n < e.threshold; ++n) {
      bool in = e.member(n);
      if (in != e.tail_member(n)) {
        if (out.size() >= limit) return std::nullopt;
        out.push_back({n, in});
      }
    }
    return out;
  }

  // Stable text key; equal sets have equal keys.
  std::string key() const {
    std::string k;
    if (is_exact()) {
      const auto& e = exact();
      k = "E" + std::to_string(e.threshold) + ":" + std::to_string(e.modulus) + ":";
      for (Index r : e.residues) k += std::to_string(r) + ",";
      k += ":" + std::to_string(e.head_modulus) + ":";
      for (const auto& r : e.runs) {
        k += std::to_string(r.cls) + "/" + std::to_string(r.first) + "/" + std::to_string(r.last) + ",";
      }
      return k;
    }
    static const char* hex = "0123456789abcdef";
    const auto& b = bits();
    k = "S" + std::to_string(b.size()) + ":";
    for (std::size_t i = 0; i < b.size(); i += 4) {
      int v = 0;
      for (std::size_t j = 0; j < 4 && i + j < b.size(); ++j) v |= b[i + j] << j;
      k += hex[v];
    }
    return k;
  }

  std::string str() const {
    if (is_sampled()) {
      return "sampled(H=" + std::to_string(horizon()) + ", " +
             std::to_string(count_below(horizon())) + " members)";
    }
    const auto& e = exact();
    std::string s = "{N=" + std::to_string(e.threshold) + ", m=" + std::to_string(e.modulus) + ", R={";
    for (std::size_t i = 0; i < e.residues.size(); ++i) s += (i ? "," : "") + std::to_string(e.residues[i]);
    s += "}";
    if (auto ex = exceptions(16); ex && !ex->empty()) {
      s += ", E={";
      for (std::size_t i = 0; i < ex->size(); ++i) {
        s += (i ? "," : "") + std::string((*ex)[i].second ? "+" : "-") + std::to_string((*ex)[i].first);
      }
      s += "}";
    } else if (!ex) {
      s += ", h=" + std::to_string(e.head_modulus) + ", runs=" + std::to_string(e.runs.size());
    }
    return s + "}";
  }

 private:
  using ExactPtr = std::shared_ptr<const detail::ExactRep>;
  using SampledPtr = std::shared_ptr<const detail::SampledRep>;

  explicit IndexSet(ExactPtr p) : rep_(std::move(p)) {}
  explicit IndexSet(SampledPtr p) : rep_(std::move(p)) {}

  const detail::ExactRep& exact() const {
    if (auto* p = std::get_if<ExactPtr>(&rep_)) return **p;
    throw Error(Errc::UndecidableOnSampled, "exact form requested for a sampled set");
  }
  const detail::SampledRep& sampled_rep() const {
    if (auto* p = std::get_if<SampledPtr>(&rep_)) return **p;
    throw Error(Errc::InvalidArgument, "sampled data requested for an exact set");
  }

  // Membership of an exact set along the class c mod Q (Q a multiple of m and h).
  static std::vector<ClassInterval> on_class(const detail::ExactRep& e, Index c, Index Q) {
    std::vector<ClassInterval> out;
    if (const HeadRun* r = e.run_for(c % e.head_modulus)) {
      Index lo = std::max(r->first, c);
      Index first = c + (lo - c + Q - 1) / Q * Q;
      if (r->last >= c) {
        Index last = c + (r->last - c) / Q * Q;
        if (first <= last) out.push_back({first, last});
      }
    }
    if (e.tail_member(c)) {
      Index first = c >= e.threshold ? c : c + (e.threshold - c + Q - 1) / Q * Q;
      if (!out.empty() && out.back().last + Q == first) out.back().last = kUnbounded;
      else out.push_back({first, kUnbounded});
    }
    return out;
  }

  template <class Op>
  static IndexSet combine(const IndexSet& a, const IndexSet& b, Op op) {
    if (a.is_exact() && b.is_exact()) {
      const auto& x = a.exact();
      const auto& y = b.exact();
      Index Q = lcm_capped(x.modulus, y.modulus, kModulusCap);
      Q = lcm_capped(Q, x.head_modulus, kModulusCap);
      Q = lcm_capped(Q, y.head_modulus, kModulusCap);
      std::vector<std::vector<ClassInterval>> cls(Q);
      for (Index c = 0; c < Q; ++c) {
        auto ia = on_class(x, c, Q);
        auto ib = on_class(y, c, Q);
        // Sweep over class-counter breakpoints.
        auto to_k = [&](Index n) { return n == kUnbounded ? kUnbounded : (n - c) / Q; };
        std::vector<Index> cuts{0};
        for (const auto* list : {&ia, &ib}) {
          for (const auto& iv : *list) {
            cuts.push_back(to_k(iv.first));
            if (iv.last != kUnbounded) cuts.push_back(to_k(iv.last) + 1);
          }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        auto in_list = [&](const std::vector<ClassInterval>& list, Index k) {
          for (const auto& iv : list) {
            if (to_k(iv.first) <= k && (iv.last == kUnbounded || k <= to_k(iv.last))) return true;
          }
          return false;
        };
        auto& out = cls[c];
        for (std::size_t i = 0; i < cuts.size(); ++i) {
          Index k = cuts[i];
          if (!op(in_list(ia, k), in_list(ib, k))) continue;
          Index n_first = c + k * Q;
          Index n_last = i + 1 < cuts.size() ? c + (cuts[i + 1] - 1) * Q : kUnbounded;
          if (!out.empty() && out.back().last != kUnbounded && out.back().last + Q == n_first) {
            out.back().last = n_last;
          } else {
            out.push_back({n_first, n_last});
          }
        }
      }
      return from_classes(Q, std::move(cls));
    }
    Index H = std::min(a.is_sampled() ? a.horizon() : kUnbounded,
                       b.is_sampled() ? b.horizon() : kUnbounded);
    auto rep = std::make_shared<detail::SampledRep>();
    rep->horizon = H;
    rep->make = [a, b, H, op] {
      std::vector<bool> out(H);
      for (Index n = 0; n < H; ++n) out[n] = op(*a.member(n), *b.member(n));
      return out;
    };
    return IndexSet(SampledPtr(std::move(rep)));
  }

  std::variant<ExactPtr, SampledPtr> rep_;
};

}  // namespace hyperseq
