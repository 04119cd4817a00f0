#include <gtest/gtest.h>

#include "hyperseq/dsl.hpp"
#include "hyperseq/monotone.hpp"
#include "support/random_sequences.hpp"

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

// Brute-force inductive rule over an explicit list of terms restricted to `pool`.
std::vector<Index> greedy(const std::vector<Rational>& v, const std::vector<bool>& pool, bool up, std::size_t count) {
  std::vector<Index> out;
  for (Index n = 0; n < v.size() && out.size() < count; ++n) {
    if (!pool[n]) continue;
    if (out.empty() || (up ? v[n] > v[out.back()] : v[n] < v[out.back()])) out.push_back(n);
  }
  return out;
}

bool monotone_as_declared(const Extraction& e, const Sequence& seq) {
  for (std::size_t i = 0; i < e.indices.size(); ++i) {
    if (e.values[i] != seq.at(e.indices[i])) return false;
    if (i == 0) continue;
    if (e.indices[i] <= e.indices[i - 1]) return false;
    const Rational &a = e.values[i - 1], &b = e.values[i];
    bool ok = e.direction == Direction::StrictlyIncreasing   ? a < b
              : e.direction == Direction::StrictlyDecreasing ? a > b
                                                              : a == b;
    if (!ok) return false;
  }
  return true;
}

TEST(Monotone, ConstantSequence) {
  Oracle o;
  auto t = classify(parse_sequence("5"), o);
  EXPECT_EQ(t.which, Case::Constant);
  EXPECT_EQ(t.B, IndexSet::all());
  EXPECT_EQ(t.A, IndexSet::empty());
  EXPECT_EQ(t.C, IndexSet::empty());
  auto e = extract(t, 3);
  EXPECT_EQ(e.indices, (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(e.direction, Direction::Constant);
}

TEST(Monotone, InfinitesimalIsBelowEveryTerm) {
  Oracle o;
  auto seq = parse_sequence("1/(n+1)");
  auto t = classify(seq, o);
  EXPECT_EQ(t.which, Case::Decreasing);
  EXPECT_EQ(t.C, IndexSet::all());
  // Oracle: for each m, {n : 1/(n+1) < 1/(m+1)} is exactly the tail past m, which is cofinite.
  for (Index m = 0; m <= 20; ++m) {
    auto below = (seq - Sequence::constant(seq.at(m))).sign_sets().neg;
    EXPECT_EQ(below, IndexSet::tail(m + 1));
    EXPECT_EQ(o.measure(below), 1);
  }
  auto e = extract(t, 4);
  EXPECT_EQ(e.indices, (std::vector<Index>{0, 1, 2, 3}));
  EXPECT_EQ(e.values, (std::vector<Rational>{1, make_rational(1, 2), make_rational(1, 3), make_rational(1, 4)}));
  EXPECT_EQ(e.direction, Direction::StrictlyDecreasing);
}

TEST(Monotone, IncreasingToOne) {
  Oracle o;
  auto t = classify(parse_sequence("n/(n+1)"), o);
  EXPECT_EQ(t.which, Case::Increasing);
  EXPECT_EQ(t.A, IndexSet::all());
  auto e = extract(t, 5);
  EXPECT_EQ(e.indices, (std::vector<Index>{0, 1, 2, 3, 4}));
}

TEST(Monotone, AlternatingFollowsTheResidue) {
  Oracle base;
  for (Index r2 : {0, 1}) {
    Oracle o = base.fork();
    o.force_residue(2, r2);
    auto t = classify(parse_sequence("per[1,-1]"), o);
    EXPECT_EQ(t.which, Case::Constant);
    EXPECT_EQ(t.B, IndexSet::residues(2, {r2}));
    auto e = extract(t, 3);
    if (r2 == 0) {
      EXPECT_EQ(e.indices, (std::vector<Index>{0, 2, 4}));
      EXPECT_EQ(e.values, (std::vector<Rational>{1, 1, 1}));
    } else {
      EXPECT_EQ(e.indices, (std::vector<Index>{1, 3, 5}));
      EXPECT_EQ(e.values, (std::vector<Rational>{-1, -1, -1}));
    }
  }
}

TEST(Monotone, PrefixThenTail) {
  Oracle o;
  auto seq = parse_sequence("prefix[5,5,5,5; n]");
  auto t = classify(seq, o);
  EXPECT_EQ(t.which, Case::Increasing);
  std::vector<Rational> v;
  for (Index n = 0; n < 20; ++n) v.push_back(seq.at(n));
  auto expected = greedy(v, std::vector<bool>(20, true), true, 3);
  auto e = extract(t, 3);
  EXPECT_EQ(e.indices, expected);
  EXPECT_EQ(e.indices, (std::vector<Index>{0, 6, 7}));
}

TEST(Monotone, FarJumpsUseTheSymbolicSearch) {
  Oracle o;
  // Even terms approach 1 from below; odd terms sit at 0 so A holds both classes.
  auto s = parse_sequence("ifmod(2, 0; 1 - 1/(n+1); 0)");
  auto t = classify(s, o);
  ASSERT_EQ(t.which, Case::Increasing);
  auto e = extract(t, 6);
  EXPECT_EQ(e.indices, (std::vector<Index>{0, 2, 4, 6, 8, 10}));

  // 9, then 5000 zeros, then n: the first larger term lies past the scan budget.
  std::string head = "prefix[9";
  for (int i = 0; i < 5000; ++i) head += ",0";
  auto far = parse_sequence(head + "; n]");
  Oracle p;
  auto tf = classify(far, p);
  ASSERT_EQ(tf.which, Case::Increasing);
  auto ef = extract(tf, 3, 10);
  EXPECT_EQ(ef.indices, (std::vector<Index>{0, 5001, 5002}));
}

TEST(Monotone, SampledConstant) {
  Oracle o;
  auto seq = parse_sequence("rand(3, 0, 1, 2)");
  auto t = classify(seq, o);
  EXPECT_EQ(t.which, Case::Constant);
  EXPECT_TRUE(t.B.is_sampled());
  auto e = extract(t, 10);
  EXPECT_TRUE(monotone_as_declared(e, seq));
  EXPECT_EQ(code_of([&] { (void)extract(t, 100000); }), Errc::SearchBoundExceeded);
  Oracle p;
  EXPECT_EQ(code_of([&] { (void)classify(parse_sequence("rand(3, 0, 1)"), p); }), Errc::AmbiguousAtHorizon);
}

TEST(Monotone, UndefinedClassIsRejected) {
  Oracle o;
  o.force_residue(2, 1);
  EXPECT_EQ(code_of([&] { (void)classify(parse_sequence("ifmod(2, 0; n; 1/(per[1,0]))"), o); }),
            Errc::PreconditionFailed);
}

TEST(Monotone, ExtractRejectsZeroCount) {
  Oracle o;
  auto t = classify(parse_sequence("n"), o);
  EXPECT_EQ(code_of([&] { (void)extract(t, 0); }), Errc::InvalidArgument);
}

TEST(Peaks, Examples) {
  auto digits = parse_sequence("prefix[3,1,4,1,5,9,2,6; 0]");
  auto p = peaks(digits, 8);
  EXPECT_EQ(p.indices, (std::vector<Index>{5, 7}));
  EXPECT_EQ(p.values, (std::vector<Rational>{9, 6}));
  EXPECT_EQ(p.direction, Direction::StrictlyDecreasing);

  auto dec = peaks(parse_sequence("1/(n+1)"), 10);
  EXPECT_EQ(dec.indices.size(), 10u);
  EXPECT_EQ(dec.direction, Direction::StrictlyDecreasing);

  auto inc = peaks(parse_sequence("n"), 10);
  EXPECT_EQ(inc.direction, Direction::StrictlyIncreasing);
  EXPECT_EQ(inc.indices, (std::vector<Index>{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));

  EXPECT_EQ(code_of([&] { (void)peaks(parse_sequence("n"), 0); }), Errc::PrefixTooShort);
}

TEST(PropDecreasing, Examples) {
  Oracle o;
  auto e = extract_decreasing_above_st(parse_sequence("1 + 1/(n+1)"), o, 3);
  EXPECT_EQ(e.indices, (std::vector<Index>{0, 1, 2}));
  EXPECT_EQ(e.values, (std::vector<Rational>{2, make_rational(3, 2), make_rational(4, 3)}));
  EXPECT_EQ(e.direction, Direction::StrictlyDecreasing);

  EXPECT_EQ(code_of([&] { (void)extract_decreasing_above_st(parse_sequence("1 - 1/(n+1)"), o, 3); }),
            Errc::PreconditionFailed);
  EXPECT_EQ(code_of([&] { (void)extract_decreasing_above_st(parse_sequence("n"), o, 3); }),
            Errc::PreconditionFailed);

  Oracle f;
  f.force_residue(2, 0);
  auto seq = parse_sequence("per[2,1]*(1 + 1/(n+1))");
  auto g = extract_decreasing_above_st(seq, f, 4);
  // Oracle: restrict to even n, where the terms 2 + 2/(n+1) decrease toward 2; odd terms are below 2.
  std::vector<Rational> v;
  for (Index n = 0; n < 40; ++n) v.push_back(seq.at(n));
  std::vector<bool> evens(40);
  for (Index n = 0; n < 40; ++n) evens[n] = n % 2 == 0;
  EXPECT_EQ(g.indices, greedy(v, evens, false, 4));
  EXPECT_EQ(g.indices, (std::vector<Index>{0, 2, 4, 6}));
  for (const auto& x : g.values) EXPECT_GT(x, 2);
}

// ---- properties ------------------------------------------------------------

TEST(MonotoneProperties, SoundOnRandomTameCorpus) {
  testing::RandomTame gen(1234);
  Oracle o;
  for (int trial = 0; trial < 300; ++trial) {
    auto seq = gen.next();
    auto t = classify(seq, o);
    ASSERT_EQ(t.mu_a + t.mu_b + t.mu_c, 1);
    for (Index n = 0; n <= 1000; ++n) {
      int hits = t.A.contains(n) + t.B.contains(n) + t.C.contains(n);
      ASSERT_EQ(hits, 1) << seq.str() << " at " << n;
    }
    auto e = extract(t, 40);
    ASSERT_EQ(e.indices.size(), 40u);
    Direction want = t.which == Case::Constant     ? Direction::Constant
                     : t.which == Case::Increasing ? Direction::StrictlyIncreasing
                                                   : Direction::StrictlyDecreasing;
    ASSERT_EQ(e.direction, want);
    ASSERT_TRUE(monotone_as_declared(e, seq)) << seq.str();
  }
}

TEST(MonotoneProperties, MembershipAgreesWithPerIndexQueries) {
  testing::RandomTame gen(99);
  Oracle o;
  for (int trial = 0; trial < 40; ++trial) {
    auto seq = gen.next(2);
    auto t = classify(seq, o);
    // Oracle: n ∈ A iff the standard number u_n is below u, asked directly on a fork.
    Oracle probe = o.fork();
    Hyper u(seq, probe);
    for (Index n = 0; n < 30; ++n) {
      Cmp c = compare(Hyper::embed(seq.at(n), probe), u);
      ASSERT_EQ(t.A.contains(n), c == Cmp::LT) << seq.str() << " at " << n;
      ASSERT_EQ(t.B.contains(n), c == Cmp::EQ) << seq.str() << " at " << n;
      ASSERT_EQ(t.C.contains(n), c == Cmp::GT) << seq.str() << " at " << n;
    }
  }
}

TEST(MonotoneProperties, PeaksMatchBruteForce) {
  testing::RandomTame gen(4321);
  for (int trial = 0; trial < 100; ++trial) {
    auto seq = gen.next();
    auto p = peaks(seq, 120);
    std::vector<Rational> v;
    for (Index n = 0; n < 120; ++n) v.push_back(seq.at(n));
    std::vector<Index> brute;
    for (Index i = 0; i < 120; ++i) {
      bool peak = true;
      for (Index j = i + 1; j < 120; ++j) peak = peak && v[i] > v[j];
      if (peak) brute.push_back(i);
    }
    if (brute.size() >= 2) {
      ASSERT_EQ(p.indices, brute);
    } else {
      ASSERT_EQ(p.indices, greedy(v, std::vector<bool>(120, true), true, 120));
    }
    ASSERT_TRUE(monotone_as_declared(p, seq));
    Oracle o;
    ASSERT_TRUE(monotone_as_declared(extract(classify(seq, o), 20), seq));
  }
}

TEST(MonotoneProperties, OracleBranchCompleteness) {
  testing::RandomTame gen(8);
  for (int trial = 0; trial < 30; ++trial) {
    Rational a = gen.small_rational(), b = gen.small_rational();
    if (a == b) continue;
    Oracle base;
    for (Index r2 : {0, 1}) {
      Oracle o = base.fork();
      o.force_residue(2, r2);
      auto t = classify(Sequence::periodic({a, b}), o);
      ASSERT_EQ(t.which, Case::Constant);
      ASSERT_EQ(t.B, IndexSet::residues(2, {r2}));
    }
  }
}

}  // namespace
}  // namespace hyperseq
