#include <array>
#include <random>

#include <gtest/gtest.h>

#include "hyperseq/oracle.hpp"

namespace hyperseq {
namespace {

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InconsistentLedger;
}

IndexSet cls(Index m, Index r) { return IndexSet::residues(m, {r}); }

TEST(Oracle, FrechetExtension) {
  Oracle o;
  EXPECT_EQ(o.measure(IndexSet::cofinite_except({0, 1})), 1);
  EXPECT_EQ(o.measure(IndexSet::finite({0, 1, 2})), 0);
  EXPECT_TRUE(o.tower().empty());
  EXPECT_EQ(o.ledger()[0].reason, Reason::Cofinite);
  EXPECT_EQ(o.ledger()[1].reason, Reason::Finite);
}

TEST(Oracle, EvensThenOdds) {
  Oracle o;
  EXPECT_EQ(o.measure(cls(2, 0)), 1);
  EXPECT_EQ(o.committed(2), Index{0});
  EXPECT_EQ(o.measure(cls(2, 1)), 0);
}

TEST(Oracle, DivisorChainCommitmentMatchesTowerEnumeration) {
  Oracle o;
  int verdict = o.measure(cls(6, 5));
  // Enumerate all compatible towers on {2,3,6}; the bottom-up smallest rule picks the
  // lexicographically least (r2, r3) and then the unique r6.
  std::vector<std::array<Index, 3>> towers;
  for (Index r6 = 0; r6 < 6; ++r6) towers.push_back({r6 % 2, r6 % 3, r6});
  std::sort(towers.begin(), towers.end());
  const auto& chosen = towers.front();
  EXPECT_EQ(o.committed(2), chosen[0]);
  EXPECT_EQ(o.committed(3), chosen[1]);
  EXPECT_EQ(o.committed(6), chosen[2]);
  EXPECT_EQ(verdict, chosen[2] == 5 ? 1 : 0);
  EXPECT_EQ(verdict, 0);
  EXPECT_EQ(o.tower().size(), 4u);  // includes the trivial modulus 1
}

TEST(Oracle, VerdictsAreCached) {
  Oracle o;
  o.measure(cls(4, 1));
  auto size = o.ledger().size();
  EXPECT_EQ(o.measure(cls(4, 1)), o.measure(cls(4, 1)));
  EXPECT_EQ(o.ledger().size(), size);
}

TEST(Oracle, ForkIsIndependent) {
  Oracle fresh;
  Oracle copy = fresh.fork();
  EXPECT_TRUE(copy.tower().empty());
  EXPECT_TRUE(copy.ledger().empty());

  Oracle a;
  Oracle b = a.fork();
  EXPECT_EQ(a.measure(cls(3, 2)), b.measure(cls(3, 2)));

  Oracle c;
  Oracle d = c.fork();
  d.force_residue(2, 1);
  auto evens = cls(2, 0);
  EXPECT_EQ(c.measure(evens), 1);
  EXPECT_EQ(d.measure(complement(evens)), 1);
  EXPECT_EQ(d.measure(evens), 0);
  EXPECT_EQ(c.measure(complement(evens)), 0);
  EXPECT_EQ(c.committed(2), Index{0});
  EXPECT_EQ(d.committed(2), Index{1});
}

TEST(Oracle, ForceResidue) {
  Oracle o;
  o.force_residue(2, 1);
  EXPECT_EQ(o.measure(cls(2, 1)), 1);

  Oracle p;
  p.measure(cls(2, 0));
  EXPECT_EQ(code_of([&] { p.force_residue(2, 1); }), Errc::IncompatibleResidue);

  Oracle q;
  q.force_residue(4, 3);
  EXPECT_EQ(q.committed(2), Index{1});
  EXPECT_EQ(code_of([&] { q.force_residue(6, 0); }), Errc::IncompatibleResidue);
}

TEST(Oracle, StipulationChoosesMajorityAndPinsLaterResidues) {
  Oracle o;
  auto mult3 = IndexSet::sampled([](Index n) { return n % 3 == 0; }, kDefaultHorizon);
  EXPECT_EQ(o.measure(mult3), 0);
  EXPECT_EQ(o.ledger().back().reason, Reason::Stipulated);
  // the exact class 0 mod 3 has no witnesses left in the core, so r_3 != 0
  EXPECT_EQ(o.measure(cls(3, 0)), 0);
  EXPECT_EQ(o.committed(3), Index{1});

  Oracle p;
  p.measure(mult3);
  EXPECT_EQ(code_of([&] { p.force_residue(3, 0); }), Errc::ConflictsWithLedger);
  p.force_residue(3, 2);
  EXPECT_EQ(p.measure(cls(3, 2)), 1);
}

TEST(Oracle, StipulationAfterNarrowTowerIsAmbiguous) {
  Oracle o(OracleConfig{1000, 20});
  o.measure(cls(90, 0));
  // the core holds only multiples of 90 below 1000, all of which are multiples of 5
  auto s = IndexSet::sampled([](Index n) { return n % 5 != 0; }, 1000);
  EXPECT_EQ(code_of([&] { o.measure(s); }), Errc::AmbiguousAtHorizon);
}

TEST(Oracle, StipulationTieGoesToQueriedSet) {
  Oracle o;
  auto half = IndexSet::sampled([](Index n) { return n % 2 == 0; }, 100);
  EXPECT_EQ(o.measure(half), 1);
}

TEST(Oracle, AmbiguousWhenTooFewWitnesses) {
  Oracle o(OracleConfig{30, 20});
  auto s = IndexSet::sampled([](Index n) { return n < 25; }, 30);
  // 25 inside, 5 outside: fine
  EXPECT_EQ(o.measure(s), 1);
  auto t = IndexSet::sampled([](Index n) { return n % 2 == 0; }, 30);
  EXPECT_EQ(code_of([&] { o.measure(t); }), Errc::AmbiguousAtHorizon);
}

TEST(OracleProperties, FreenessOnAllSubsetsOfSmallRange) {
  Oracle o;
  for (unsigned mask = 0; mask < (1u << 11); ++mask) {
    std::vector<Index> members;
    for (Index i = 0; i <= 10; ++i) {
      if (mask >> i & 1u) members.push_back(i);
    }
    ASSERT_EQ(o.measure(IndexSet::finite(members)), 0);
    ASSERT_EQ(o.measure(IndexSet::cofinite_except(members)), 1);
  }
}

TEST(OracleProperties, AdditivityAndComplementUnderAllTowersMod12) {
  for (Index r12 = 0; r12 < 12; ++r12) {
    Oracle o;
    o.force_residue(12, r12);
    for (Index m : {1, 2, 3, 4, 6, 12}) {
      for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<Index> rs;
        for (Index r = 0; r < m; ++r) {
          if (mask >> r & 1u) rs.push_back(r);
        }
        auto s = IndexSet::residues(m, rs);
        int mu = o.measure(s);
        ASSERT_EQ(mu + o.measure(complement(s)), 1);
        ASSERT_EQ(mu, (mask >> (r12 % m) & 1u) ? 1 : 0);
      }
    }
    // disjoint pairs modulo 6
    for (unsigned a = 0; a < 64; ++a) {
      for (unsigned b = 0; b < 64; ++b) {
        if (a & b) continue;
        std::vector<Index> ra, rb;
        for (Index r = 0; r < 6; ++r) {
          if (a >> r & 1u) ra.push_back(r);
          if (b >> r & 1u) rb.push_back(r);
        }
        auto s = IndexSet::residues(6, ra), t = IndexSet::residues(6, rb);
        ASSERT_EQ(o.measure(unite(s, t)), o.measure(s) + o.measure(t));
      }
    }
  }
}

TEST(OracleProperties, Monotonicity) {
  Oracle o;
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    Index m = 1 + rng() % 12;
    std::vector<Index> rs, extra;
    for (Index r = 0; r < m; ++r) {
      if (rng() % 2) rs.push_back(r);
    }
    auto s = IndexSet::residues(m, rs);
    for (int i = 0; i < 3; ++i) extra.push_back(rng() % 50);
    auto t = unite(unite(s, IndexSet::residues(3, {static_cast<Index>(rng() % 3)})), IndexSet::finite(extra));
    if (o.measure(s) == 1) {
      ASSERT_EQ(o.measure(t), 1);
    }
    // μ(S∩T) = μ(S)·μ(T)
    ASSERT_EQ(o.measure(intersect(s, t)), o.measure(s) * o.measure(t));
  }
}

TEST(OracleProperties, ReplayIsDeterministic) {
  auto run = [] {
    Oracle o;
    std::vector<int> verdicts;
    verdicts.push_back(o.measure(IndexSet::sampled([](Index n) { return n % 5 != 0; }, 1000)));
    for (Index m : {4, 6, 9, 10}) {
      for (Index r = 0; r < m; r += 3) verdicts.push_back(o.measure(cls(m, r)));
    }
    verdicts.push_back(o.measure(cls(5, 0)));
    return std::make_pair(verdicts, o.tower());
  };
  EXPECT_EQ(run(), run());
}

TEST(Oracle, RestoreReproducesCore) {
  Oracle o;
  o.measure(IndexSet::sampled([](Index n) { return n % 3 == 0; }, kDefaultHorizon));
  o.measure(cls(2, 1));
  std::vector<std::pair<Index, Index>> tower(o.tower().begin(), o.tower().end());
  Oracle back = Oracle::restore(o.config(), tower, o.ledger());
  EXPECT_EQ(back.tower(), o.tower());
  EXPECT_EQ(back.stipulation_count(), 1u);
  Oracle a = o.fork(), b = back.fork();
  EXPECT_EQ(a.measure(cls(3, 0)), b.measure(cls(3, 0)));
  EXPECT_EQ(a.tower(), b.tower());
  for (Index n = 0; n < 100; ++n) EXPECT_EQ(a.in_core(n), b.in_core(n));
}

}  // namespace
}  // namespace hyperseq
