#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hyperseq/error.hpp"
#include "hyperseq/index_set.hpp"

namespace hyperseq {

enum class Reason { Cofinite, Finite, Residue, Stipulated };

constexpr std::string_view reason_name(Reason r) {
  switch (r) {
    case Reason::Cofinite: return "Cofinite";
    case Reason::Finite: return "Finite";
    case Reason::Residue: return "Residue";
    case Reason::Stipulated: return "Stipulated";
  }
  return "?";
}

struct Decision {
  IndexSet set;
  int verdict = 0;
  Reason reason = Reason::Finite;
  Index witness_count = 0;
};

struct OracleConfig {
  Index horizon = kDefaultHorizon;  // H_fip
  Index witness_quota = 20;         // W
};

// A lazily grown two-valued measure on subsets of ℕ (a partial free ultrafilter).
//
// Exact sets are decided by a residue tower: one committed residue r_m per modulus,
// closed under divisors and pairwise compatible, so the verdict on an eventually
// periodic set is whether r_m lies in its tail residues. Sampled sets are stipulated
// against the core (intersection of everything decided so far) by witness counting
// below the horizon. The state is a plain value: copying it forks it.
class Oracle {
 public:
  explicit Oracle(OracleConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.witness_quota == 0) throw Error(Errc::InvalidArgument, "witness quota must be >= 1");
    core_bits_.assign(cfg_.horizon, true);
  }

  const OracleConfig& config() const { return cfg_; }
  const std::map<Index, Index>& tower() const { return tower_; }
  const std::vector<Decision>& ledger() const { return ledger_; }
  Index stipulation_count() const { return stipulations_; }

  Oracle fork() const { return *this; }

  // Called once per appended ledger entry.
  void set_trace(std::function<void(const Decision&)> sink) { trace_ = std::move(sink); }

  int measure(const IndexSet& s) {
    std::string key = s.key();
    if (auto it = cache_.find(key); it != cache_.end()) return ledger_[it->second].verdict;
    Decision d{s, 0, Reason::Finite, 0};
    if (s.is_exact()) {
      if (s.is_finite_set()) {
        d = {s, 0, Reason::Finite, 0};
      } else if (s.is_cofinite_set()) {
        d = {s, 1, Reason::Cofinite, 0};
      } else {
        Index r = residue(s.modulus());
        d.verdict = s.tail_contains(r) ? 1 : 0;
        d.reason = Reason::Residue;
        d.witness_count = class_witnesses(s.modulus(), r);
      }
    } else {
      d = stipulate(s);
    }
    append(std::move(d), key);
    return ledger_.back().verdict;
  }

  // Committed residue for modulus m, committing the divisor chain bottom-up if needed.
  Index residue(Index m) {
    if (m == 0) throw Error(Errc::InvalidArgument, "modulus must be >= 1");
    if (auto it = tower_.find(m); it != tower_.end()) return it->second;
    for (Index d : divisors(m)) {
      if (tower_.count(d)) continue;
      commit_smallest(d);
    }
    return tower_.at(m);
  }

  std::optional<Index> committed(Index m) const {
    auto it = tower_.find(m);
    if (it == tower_.end()) return std::nullopt;
    return it->second;
  }

  void force_residue(Index m, Index r) {
    if (m == 0 || r >= m) throw Error(Errc::InvalidArgument, "residue must satisfy 0 <= r < m");
    for (Index d : divisors(m)) {
      auto it = tower_.find(d);
      if (it != tower_.end() && it->second != r % d) {
        throw Error(Errc::IncompatibleResidue,
                    "r_" + std::to_string(m) + " = " + std::to_string(r) + " contradicts committed r_" +
                        std::to_string(d) + " = " + std::to_string(it->second));
      }
    }
    if (stipulations_ > 0) {
      Index w = class_witnesses(m, r);
      if (w < cfg_.witness_quota) {
        throw Error(Errc::ConflictsWithLedger,
                    "class " + std::to_string(r) + " mod " + std::to_string(m) + " has " +
                        std::to_string(w) + " witnesses in the stipulated core below " +
                        std::to_string(cfg_.horizon));
      }
    }
    for (Index d : divisors(m)) {
      if (!tower_.count(d)) commit(d, r % d);
    }
  }

  // Membership of n in the core (intersection of all measure-1 decisions), below the horizon.
  bool in_core(Index n) const { return n < core_bits_.size() && core_bits_[n]; }

  // Rebuilds a state from serialized parts; ledger sets are replayed into the core.
  static Oracle restore(OracleConfig cfg, const std::vector<std::pair<Index, Index>>& tower,
                        std::vector<Decision> ledger) {
    Oracle o(cfg);
    if (!tower.empty()) o.commit(1, 0);
    for (const auto& [m, r] : tower) {
      if (m == 0 || r >= m) throw Error(Errc::InvalidArgument, "malformed tower entry");
      o.commit(m, r);
    }
    for (const auto& [m, r] : o.tower_) {
      for (Index d : divisors(m)) {
        auto it = o.tower_.find(d);
        if (it == o.tower_.end() || it->second != r % d) {
          throw Error(Errc::InconsistentLedger, "restored tower is not divisor-closed and compatible");
        }
      }
    }
    for (auto& d : ledger) {
      std::string key = d.set.key();
      if (d.reason == Reason::Stipulated) {
        ++o.stipulations_;
        o.absorb(d.verdict == 1 ? d.set : complement(d.set));
      }
      o.cache_.emplace(key, o.ledger_.size());
      o.ledger_.push_back(std::move(d));
    }
    return o;
  }

 private:
  // Core members below the horizon in the class r mod m.
  Index class_witnesses(Index m, Index r) const {
    Index c = 0;
    for (Index n = r; n < core_bits_.size(); n += m) c += core_bits_[n];
    return c;
  }

  void commit(Index m, Index r) {
    tower_[m] = r;
    for (Index n = 0; n < core_bits_.size(); ++n) {
      if (n % m != r) core_bits_[n] = false;
    }
  }

  // Smallest residue compatible with the committed divisors (and, once stipulations
  // exist, keeping W witnesses in the core).
  void commit_smallest(Index m) {
    for (Index r = 0; r < m; ++r) {
      bool ok = true;
      for (Index d : divisors(m)) {
        if (d == m) continue;
        auto it = tower_.find(d);
        if (it != tower_.end() && it->second != r % d) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      if (stipulations_ > 0) {
        if (class_witnesses(m, r) < cfg_.witness_quota) continue;
      }
      commit(m, r);
      return;
    }
    throw Error(Errc::AmbiguousAtHorizon,
                "no residue mod " + std::to_string(m) + " keeps " + std::to_string(cfg_.witness_quota) +
                    " core witnesses below horizon " + std::to_string(cfg_.horizon));
  }

  Decision stipulate(const IndexSet& s) {
    const auto& bits = s.bits();
    Index limit = std::min<Index>(bits.size(), core_bits_.size());
    Index in = 0, out = 0;
    for (Index n = 0; n < limit; ++n) {
      if (!core_bits_[n]) continue;
      (bits[n] ? in : out) += 1;
    }
    int verdict = in >= out ? 1 : 0;
    Index w = verdict ? in : out;
    if (w < cfg_.witness_quota) {
      throw Error(Errc::AmbiguousAtHorizon,
                  "sampled set " + s.str() + ": " + std::to_string(in) + " core witnesses inside, " +
                      std::to_string(out) + " outside, below horizon " + std::to_string(limit) +
                      "; quota " + std::to_string(cfg_.witness_quota));
    }
    ++stipulations_;
    absorb(verdict ? s : complement(s));
    return {s, verdict, Reason::Stipulated, w};
  }

  // Indices past the sampled horizon carry no information and stay in the core.
  void absorb(const IndexSet& chosen) {
    const auto& bits = chosen.bits();
    Index limit = std::min<Index>(bits.size(), core_bits_.size());
    for (Index n = 0; n < limit; ++n) {
      if (!bits[n]) core_bits_[n] = false;
    }
  }

  void append(Decision d, const std::string& key) {
    if (d.verdict == 1 && d.reason == Reason::Residue && d.witness_count == 0 && stipulations_ > 0) {
      throw Error(Errc::InconsistentLedger, "measure-1 set " + d.set.str() + " has no core witnesses");
    }
    cache_.emplace(key, ledger_.size());
    ledger_.push_back(std::move(d));
    if (trace_) trace_(ledger_.back());
  }

  OracleConfig cfg_;
  std::map<Index, Index> tower_;
  std::vector<Decision> ledger_;
  std::unordered_map<std::string, std::size_t> cache_;
  std::vector<bool> core_bits_;
  Index stipulations_ = 0;
  std::function<void(const Decision&)> trace_;
};

}  // namespace hyperseq
