#pragma once

#include <random>

#include "hyperseq/sequence.hpp"

namespace hyperseq::testing {

// Random tame expressions. With `total` set, every denominator is positive on ℕ so
// the sequence is defined everywhere.
class RandomTame {
 public:
  explicit RandomTame(std::uint64_t seed, bool total = true) : rng_(seed), total_(total) {}

  Sequence next(int depth = 3) { return expr(depth); }

  Rational small_rational() {
    long p = pick(-6, 6), q = pick(1, 4);
    return make_rational(p, q);
  }

  long pick(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

 private:
  Sequence positive_denominator() {
    switch (pick(0, 3)) {
      case 0: return Sequence::var() + Sequence::constant(pick(1, 5));
      case 1: return Sequence::var().pow(2) + Sequence::constant(pick(1, 9));
      case 2: {
        std::vector<Rational> pat;
        for (long i = 0, k = pick(2, 3); i < k; ++i) pat.push_back(make_rational(pick(1, 5), pick(1, 3)));
        return Sequence::periodic(pat);
      }
      default: return (Sequence::var() + Sequence::constant(pick(1, 3))) * Sequence::constant(pick(1, 4));
    }
  }

  Sequence leaf() {
    switch (pick(0, 4)) {
      case 0: return Sequence::constant(small_rational());
      case 1:
      case 2: return Sequence::var();
      case 3: {
        std::vector<Rational> pat;
        for (long i = 0, k = pick(2, 4); i < k; ++i) pat.push_back(small_rational());
        return Sequence::periodic(pat);
      }
      default: return Sequence::power_of(Rational(-1));
    }
  }

  Sequence expr(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(0, 9)) {
      case 0: return expr(depth - 1) + expr(depth - 1);
      case 1: return expr(depth - 1) - expr(depth - 1);
      case 2: return expr(depth - 1) * expr(depth - 1);
      case 3:
      case 4:
        if (total_) return expr(depth - 1) / positive_denominator();
        {
          auto den = expr(depth - 1);
          if (auto q = den.as_constant(); q && *q == 0) den = Sequence::var();
          return expr(depth - 1) / den;
        }
      case 5: {
        Index m = static_cast<Index>(pick(2, 4));
        Index r = static_cast<Index>(pick(0, static_cast<long>(m) - 1));
        return Sequence::ifmod(m, r, expr(depth - 1), expr(depth - 1));
      }
      case 6: {
        std::vector<Rational> head;
        for (long i = 0, k = pick(1, 6); i < k; ++i) head.push_back(small_rational());
        return Sequence::prefix(head, expr(depth - 1));
      }
      case 7: {
        auto base = expr(depth - 1);
        long k = pick(total_ ? 0 : -1, 2);
        if (auto q = base.as_constant(); q && *q == 0 && k < 0) k = 1;
        return base.pow(k);
      }
      case 8:
        if (total_) return Sequence::min({expr(depth - 1), expr(depth - 1)});
        return -expr(depth - 1);
      default: return leaf();
    }
  }

  std::mt19937_64 rng_;
  bool total_;
};

}  // namespace hyperseq::testing
