#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperseq/error.hpp"
#include "hyperseq/index_set.hpp"
#include "hyperseq/oracle.hpp"

namespace hyperseq {

using json = nlohmann::json;

// Exact: {"N","m","R","E":[[idx,bool],...]}, or {"N","m","R","h","runs":[[cls,first,last],...]}
// when the exception list would be too long. Sampled: {"H","members":[...]}.
inline json to_json(const IndexSet& s) {
  if (s.is_sampled()) {
    std::vector<Index> members;
    const auto& bits = s.bits();
    for (Index n = 0; n < bits.size(); ++n) {
      if (bits[n]) members.push_back(n);
    }
    return json{{"H", s.horizon()}, {"members", members}};
  }
  json j{{"N", s.threshold()}, {"m", s.modulus()}, {"R", s.residues()}};
  if (auto ex = s.exceptions()) {
    json e = json::array();
    for (const auto& [idx, in] : *ex) e.push_back(json::array({idx, in}));
    j["E"] = e;
  } else {
    j["h"] = s.head_modulus();
    json runs = json::array();
    for (const auto& r : s.head_runs()) runs.push_back(json::array({r.cls, r.first, r.last}));
    j["runs"] = runs;
  }
  return j;
}

inline IndexSet index_set_from_json(const json& j) {
  try {
    if (j.contains("H")) {
      Index H = j.at("H").get<Index>();
      std::vector<bool> bits(H, false);
      for (const auto& m : j.at("members")) {
        Index n = m.get<Index>();
        if (n >= H) throw Error(Errc::InvalidArgument, "sampled member beyond horizon");
        bits[n] = true;
      }
      return IndexSet::from_bits(std::move(bits));
    }
    Index N = j.at("N").get<Index>(), m = j.at("m").get<Index>();
    auto R = j.at("R").get<std::vector<Index>>();
    if (j.contains("E")) {
      std::vector<std::pair<Index, bool>> overrides;
      for (const auto& e : j.at("E")) overrides.emplace_back(e.at(0).get<Index>(), e.at(1).get<bool>());
      return IndexSet::from_exceptions(N, m, R, overrides);
    }
    std::vector<HeadRun> runs;
    for (const auto& r : j.at("runs")) runs.push_back({r.at(0).get<Index>(), r.at(1).get<Index>(), r.at(2).get<Index>()});
    return IndexSet::from_runs(N, m, R, j.at("h").get<Index>(), runs);
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed set: ") + e.what());
  }
}

inline json to_json(const Decision& d) {
  return json{{"set", to_json(d.set)},
              {"verdict", d.verdict},
              {"reason", std::string(reason_name(d.reason))},
              {"witnesses", d.witness_count}};
}

inline Reason reason_from_name(const std::string& s) {
  for (Reason r : {Reason::Cofinite, Reason::Finite, Reason::Residue, Reason::Stipulated}) {
    if (reason_name(r) == s) return r;
  }
  throw Error(Errc::InvalidArgument, "unknown reason '" + s + "'");
}

// {"tower":[[m,r],...],"ledger":[{set,verdict,reason,witnesses},...],"H","W"}; the trivial r_1 is left out.
inline json to_json(const Oracle& o) {
  json tower = json::array();
  for (const auto& [m, r] : o.tower()) {
    if (m > 1) tower.push_back(json::array({m, r}));
  }
  json ledger = json::array();
  for (const auto& d : o.ledger()) ledger.push_back(to_json(d));
  return json{{"tower", tower}, {"ledger", ledger}, {"H", o.config().horizon}, {"W", o.config().witness_quota}};
}

inline Oracle oracle_from_json(const json& j) {
  try {
    OracleConfig cfg{j.at("H").get<Index>(), j.at("W").get<Index>()};
    std::vector<std::pair<Index, Index>> tower;
    for (const auto& t : j.at("tower")) tower.emplace_back(t.at(0).get<Index>(), t.at(1).get<Index>());
    std::vector<Decision> ledger;
    for (const auto& d : j.at("ledger")) {
      int verdict = d.at("verdict").get<int>();
      if (verdict != 0 && verdict != 1) throw Error(Errc::InvalidArgument, "verdict must be 0 or 1");
      ledger.push_back({index_set_from_json(d.at("set")), verdict, reason_from_name(d.at("reason").get<std::string>()),
                        d.value("witnesses", Index{0})});
    }
    return Oracle::restore(cfg, tower, std::move(ledger));
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("malformed oracle state: ") + e.what());
  }
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// FNV-1a 64 of the compact ledger JSON, as 16 hex digits.
inline std::string ledger_digest(const Oracle& o) {
  json ledger = json::array();
  for (const auto& d : o.ledger()) ledger.push_back(to_json(d));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(ledger.dump())));
  return buf;
}

}  // namespace hyperseq
