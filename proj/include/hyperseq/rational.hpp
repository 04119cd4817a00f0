#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <string_view>

#include "hyperseq/error.hpp"

namespace hyperseq {

using Rational = mpq_class;
using Integer = mpz_class;

// Indices into ℕ. Everything above kIndexLimit is out of representable range.
using Index = std::uint64_t;
inline constexpr Index kIndexLimit = Index{1} << 62;

inline Rational make_rational(long num, long den = 1) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline Rational from_index(Index n) { return Rational(static_cast<unsigned long>(n)); }

inline int sign(const Rational& q) { return sgn(q); }

inline Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline Integer ceil_of(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

// "p" for integers, "p/q" otherwise; GMP already prints canonical fractions this way.
inline std::string to_string(const Rational& q) { return q.get_str(); }

inline double to_double(const Rational& q) { return q.get_d(); }

// Accepts "p", "p/q", decimals "1.25" and scientific "1e-9", with optional sign.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&](const std::string& why) -> Rational {
    throw SyntaxError(0, "bad rational '" + std::string(text) + "': " + why);
  };
  std::string s(text);
  if (s.empty()) return fail("empty");
  bool neg = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    neg = s[i] == '-';
    ++i;
  }
  auto slash = s.find('/', i);
  if (slash != std::string::npos) {
    std::string p = s.substr(i, slash - i), q = s.substr(slash + 1);
    auto digits = [](const std::string& d) {
      return !d.empty() && d.find_first_not_of("0123456789") == std::string::npos;
    };
    if (!digits(p) || !digits(q)) return fail("expected p/q");
    Integer den(q);
    if (den == 0) throw SyntaxError(slash + 1, "zero denominator", Errc::DivisionByConstantZero);
    Rational r{Integer(p), den};
    r.canonicalize();
    return neg ? Rational(-r) : r;
  }
  Integer mant = 0;
  long exp10 = 0;
  bool any = false, dot = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (c >= '0' && c <= '9') {
      mant = mant * 10 + (c - '0');
      if (dot) --exp10;
      any = true;
    } else if (c == '.' && !dot) {
      dot = true;
    } else if (c == 'e' || c == 'E') {
      ++i;
      if (i >= s.size()) return fail("dangling exponent");
      std::size_t used = 0;
      long e = 0;
      try {
        e = std::stol(s.substr(i), &used);
      } catch (...) {
        return fail("bad exponent");
      }
      if (i + used != s.size()) return fail("trailing characters");
      if (e > 4000 || e < -4000) return fail("exponent out of range");
      exp10 += e;
      i = s.size();
      break;
    } else {
      return fail("unexpected character");
    }
  }
  if (!any) return fail("no digits");
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational r = exp10 < 0 ? Rational(mant, scale) : Rational(mant * scale);
  r.canonicalize();
  return neg ? Rational(-r) : r;
}

inline Index gcd_index(Index a, Index b) { return std::gcd(a, b); }

// lcm with a representability ceiling; throws RepresentationLimit above `cap`.
inline Index lcm_capped(Index a, Index b, Index cap) {
  Index g = std::gcd(a, b);
  Index a_red = a / g;
  if (b != 0 && a_red > cap / b) {
    throw Error(Errc::RepresentationLimit,
                "modulus lcm(" + std::to_string(a) + ", " + std::to_string(b) + ") exceeds " +
                    std::to_string(cap));
  }
  Index l = a_red * b;
  if (l > cap) {
    throw Error(Errc::RepresentationLimit, "modulus " + std::to_string(l) + " exceeds " +
                                               std::to_string(cap));
  }
  return l;
}

}  // namespace hyperseq
