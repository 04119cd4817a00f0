#include <random>

#include <gtest/gtest.h>

#include "hyperseq/dsl.hpp"
#include "hyperseq/saturation.hpp"

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

NestedFamily family(std::string_view text, Index depth = kDefaultDepth) {
  return NestedFamily::from_expr(parse_family(text), depth);
}

TEST(IntervalSet, CanonicalForm) {
  IntervalSet s({Interval{Rational(2), Rational(3)}, Interval{Rational(0), Rational(1)}, Interval{Rational(1), Rational(make_rational(3, 2))},
                 Interval{Rational(5), Rational(4)}});
  ASSERT_EQ(s.components().size(), 2u);
  EXPECT_EQ(s.str(), "[0, 3/2] u [2, 3]");
  EXPECT_TRUE(s.contains(make_rational(3, 2)));
  EXPECT_FALSE(s.contains(make_rational(7, 4)));
  EXPECT_EQ(s.designated(), 0);
  EXPECT_TRUE(IntervalSet::closed(2, 3).subset_of(s));
  EXPECT_FALSE(IntervalSet::closed(1, 2).subset_of(s));
  EXPECT_EQ(intersect(s, IntervalSet::closed(1, 2)).str(), "[1, 3/2] u [2, 2]");
  EXPECT_TRUE(IntervalSet({Interval{Rational(1), Rational(0)}}).empty());

  IntervalSet ray({Interval{std::nullopt, Rational(4)}, Interval{Rational(3), Rational(9)}});
  EXPECT_EQ(ray.str(), "[-inf, 9]");
  EXPECT_FALSE(ray.bounded());
  EXPECT_EQ(ray.designated(), 9);
  EXPECT_EQ(IntervalSet({Interval{}}).designated(), 0);
  EXPECT_EQ(code_of([] { (void)IntervalSet().designated(); }), Errc::EmptyLevel);
}

TEST(IntervalSet, FamilySyntax) {
  auto f = parse_family("[1/3 - 1/(n+1), 1/3 + 1/(n+1)]");
  EXPECT_EQ(f.at(2), IntervalSet::closed(0, make_rational(2, 3)));
  auto g = parse_family("[0, 1/(n+2)] u [1, 1 + 1/(n+2)]");
  EXPECT_EQ(g.at(0).str(), "[0, 1/2] u [1, 3/2]");
  auto h = parse_family("[n, inf]");
  EXPECT_EQ(h.at(4).str(), "[4, inf]");
  EXPECT_EQ(parse_family("[-inf, 0] \xE2\x88\xAA [1, \xE2\x88\x9E]").at(0).str(), "[-inf, 0] u [1, inf]");
  EXPECT_THROW(parse_family("[inf, 0]"), SyntaxError);
  EXPECT_THROW(parse_family("[0, -inf]"), SyntaxError);
  EXPECT_THROW(parse_family("[0, 1"), SyntaxError);
}

TEST(Saturation, ShrinkingToZero) {
  Oracle o;
  auto w = saturation_witness(family("[0, 1/(n+1)]"), o);
  EXPECT_EQ(w.c.repr().as_constant(), Rational(0));
  ASSERT_EQ(w.membership.size(), kDefaultDepth);
  for (const auto& s : w.membership) EXPECT_EQ(s, IndexSet::all());
}

TEST(Saturation, ShrinkingToAThird) {
  Oracle o;
  auto fam = family("[1/3 - 1/(n+1), 1/3 + 1/(n+1)]");
  auto w = saturation_witness(fam, o);
  Rational third = make_rational(1, 3);
  // Oracle: c_n = 1/3 - 1/(n+1) lies in A_m iff 1/(n+1) <= 1/(m+1) iff n >= m.
  for (Index m = 0; m <= 50; ++m) {
    for (Index n = 0; n <= 50; ++n) {
      Rational c = third - make_rational(1, static_cast<long>(n) + 1);
      EXPECT_EQ(c, w.c.repr().at(n));
      bool inside = third - make_rational(1, static_cast<long>(m) + 1) <= c &&
                    c <= third + make_rational(1, static_cast<long>(m) + 1);
      EXPECT_EQ(inside, n >= m);
      if (m < kDefaultDepth) {
        EXPECT_EQ(w.membership[m].contains(n), inside);
      }
    }
  }
  EXPECT_EQ(compare(w.c, third), Cmp::LT);
  EXPECT_EQ(compare(w.c, third - make_rational(1, 1000000)), Cmp::GT);
}

TEST(Saturation, CommonPointWithEmptyStandardIntersection) {
  Oracle o;
  auto level = [](Index n) {
    Rational a = from_index(n);
    return IntervalSet({Interval{a, a}, Interval{a + 1, a + 1}, Interval{a + 2, a + 2}, Interval{a + 3, std::nullopt}});
  };
  auto fam = NestedFamily::from_generator("points from n", level, kDefaultDepth, Sequence::var());
  auto w = saturation_witness(fam, o);
  for (Index n = 0; n < 200; ++n) EXPECT_EQ(w.c.repr().at(n), from_index(n));
  for (Index m = 0; m < kDefaultDepth; ++m) {
    for (Index n = 0; n < 200; ++n) EXPECT_EQ(w.membership[m].contains(n), n >= m);
    EXPECT_EQ(w.measures[m], 1);
  }
  EXPECT_FALSE(is_finite(w.c));
  // no standard natural survives to level k + 1
  for (Index k = 0; k + 1 < kDefaultDepth; ++k) EXPECT_FALSE(fam.level(k + 1).contains(from_index(k)));

  // Without the rule the witness is sampled; the sampled oracle sees the same tails.
  Oracle p;
  auto sampled = saturation_witness(NestedFamily::from_generator("points from n", level), p);
  EXPECT_FALSE(sampled.c.repr().is_tame());
  for (Index m = 0; m < kDefaultDepth; ++m) {
    for (Index n = 0; n < 200; ++n) EXPECT_EQ(sampled.membership[m].contains(n), n >= m);
  }
}

TEST(Saturation, Errors) {
  Oracle o;
  EXPECT_EQ(code_of([&] { (void)saturation_witness(family("[0, n]"), o); }), Errc::NotNested);
  EXPECT_EQ(code_of([&] { (void)saturation_witness(family("[1, 1 - 1/(n+1)]"), o); }), Errc::EmptyLevel);
  EXPECT_EQ(code_of([&] { (void)saturation_witness(family("[0, 1]", 0), o); }), Errc::InvalidArgument);
}

TEST(Fip, Examples) {
  Oracle o;
  auto w = fip_witness({IntervalSet::closed(0, 2), IntervalSet::closed(1, 3), IntervalSet::closed(1, make_rational(3, 2))}, o);
  EXPECT_EQ(w.c.repr().at(0), 0);
  for (Index n = 1; n < 20; ++n) EXPECT_EQ(w.c.repr().at(n), 1);
  EXPECT_EQ(st(w.c).value, 1);

  try {
    fip_witness({IntervalSet::closed(0, 1), IntervalSet::closed(2, 3)}, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::FIPViolated);
    EXPECT_NE(std::string(e.what()).find("{0,1}"), std::string::npos);
  }

  auto five = fip_witness({IntervalSet::point(5)}, o);
  EXPECT_EQ(five.c.repr().as_constant(), Rational(5));
}

TEST(Nearstandard, Examples) {
  Oracle o;
  Hyper y(parse_sequence("1/3 - 1/(n+1)"), o);
  EXPECT_EQ(is_nearstandard(y, IntervalSet::closed(0, 1)), make_rational(1, 3));
  EXPECT_EQ(is_nearstandard(Hyper::embed(make_rational(1, 2), o), IntervalSet::closed(0, 1)), make_rational(1, 2));
  EXPECT_EQ(is_nearstandard(Hyper(parse_sequence("n"), o), IntervalSet({Interval{Rational(0), std::nullopt}})),
            std::nullopt);
  EXPECT_EQ(code_of([&] { (void)is_nearstandard(Hyper::embed(2, o), IntervalSet::closed(0, 1)); }),
            Errc::PreconditionFailed);
  // 30 sampled indices split between 0 and 1: neither side reaches the witness quota.
  Oracle small(OracleConfig{30, 20});
  Hyper coin(parse_sequence("rand(5, 0, 1, 1)"), small);
  EXPECT_EQ(code_of([&] { (void)is_nearstandard(coin, IntervalSet::point(0)); }), Errc::MembershipUndecided);
}

TEST(Cantor, Examples) {
  Oracle o;
  auto a = cantor_intersection(family("[0, 1/(n+1)]"), o);
  EXPECT_TRUE(a.exact);
  EXPECT_EQ(a.value, 0);
  auto b = cantor_intersection(family("[1/3 - 1/(n+1), 1/3 + 1/(n+1)]"), o);
  EXPECT_TRUE(b.exact);
  EXPECT_EQ(b.value, make_rational(1, 3));
  auto fam = family("[0, 1/(n+2)] u [1, 1 + 1/(n+2)]");
  auto c = cantor_intersection(fam, o);
  EXPECT_EQ(c.value, 0);
  for (Index n = 0; n <= 20; ++n) {
    Rational lo = 0, hi = make_rational(1, static_cast<long>(n) + 2);
    EXPECT_TRUE(lo <= c.value && c.value <= hi);
  }
}

TEST(Cantor, CompactnessIsNeeded) {
  Oracle o;
  auto fam = family("[n, inf]");
  auto w = saturation_witness(fam, o);
  EXPECT_FALSE(is_finite(w.c));
  EXPECT_EQ(code_of([&] { (void)cantor_intersection(fam, o); }), Errc::NotBounded);
}

// ---- properties ------------------------------------------------------------

struct RandomFamilies {
  std::mt19937_64 rng;
  long pick(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

  // [a - p/(n+k), b + q/(n+k)] with a <= b
  std::string shrinking() {
    long a = pick(-20, 20), w = pick(0, 5), p = pick(0, 7), q = pick(0, 7), k = pick(1, 4), d = pick(1, 6);
    std::string A = "(" + std::to_string(a) + ")/" + std::to_string(d);
    std::string B = "(" + std::to_string(a + w) + ")/" + std::to_string(d);
    std::string den = "(n+" + std::to_string(k) + ")";
    return "[" + A + " - " + std::to_string(p) + "/" + den + ", " + B + " + " + std::to_string(q) + "/" + den + "]";
  }

  std::vector<IntervalSet> nested_levels(std::size_t depth) {
    Rational lo = pick(-50, 50), hi = lo + pick(1, 100);
    std::vector<IntervalSet> out;
    for (std::size_t i = 0; i < depth; ++i) {
      out.push_back(IntervalSet::closed(lo, hi));
      Rational width = hi - lo;
      lo += width * make_rational(pick(0, 3), 8);
      hi -= width * make_rational(pick(0, 3), 8);
    }
    return out;
  }
};

TEST(SaturationProperties, WitnessContainsEveryTail) {
  RandomFamilies gen{std::mt19937_64(31)};
  Oracle o;
  for (int trial = 0; trial < 500; ++trial) {
    std::string text = gen.shrinking();
    auto fam = family(text);
    auto w = saturation_witness(fam, o);
    for (Index m = 0; m < fam.depth; m += 7) {
      IntervalSet level = fam.level(m);
      for (Index n = m; n <= 1000; n += 13) {
        ASSERT_TRUE(level.contains(w.c.repr().at(n))) << text << " m=" << m << " n=" << n;
        ASSERT_TRUE(w.membership[m].contains(n));
      }
      ASSERT_EQ(w.measures[m], 1);
    }
    auto p = cantor_intersection(fam, o);
    ASSERT_TRUE(p.exact);
    for (Index m = 0; m < fam.depth; ++m) ASSERT_TRUE(fam.level(m).contains(p.value)) << text;
  }
}

TEST(SaturationProperties, ExplicitLevels) {
  RandomFamilies gen{std::mt19937_64(5)};
  Oracle o;
  for (int trial = 0; trial < 60; ++trial) {
    auto levels = gen.nested_levels(64);
    auto fam = NestedFamily::from_levels(levels);
    auto p = cantor_intersection(fam, o);
    for (const auto& l : levels) ASSERT_TRUE(l.contains(p.value));
    // already nested, so the running intersections are the levels themselves
    auto direct = saturation_witness(fam, o);
    auto via_fip = fip_witness(levels, o);
    for (Index n = 0; n < 100; ++n) ASSERT_EQ(direct.c.repr().at(n), via_fip.c.repr().at(n));
  }
}

}  // namespace
}  // namespace hyperseq
