#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "hyperseq/rational.hpp"

namespace hyperseq {

// Dense univariate polynomial over ℚ, coefficients stored low degree first.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly constant(const Rational& q) { return Poly(std::vector<Rational>{q}); }
  static Poly identity() { return Poly(std::vector<Rational>{Rational(0), Rational(1)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  const std::vector<Rational>& coeffs() const { return c_; }

  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
  Rational lead() const { return c_.empty() ? Rational(0) : c_.back(); }

  Rational eval(const Rational& x) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  Rational eval(Index n) const { return eval(from_index(n)); }

  Poly operator-() const {
    Poly r = *this;
    for (auto& a : r.c_) a = -a;
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(i) + b.coeff(i);
    return Poly(std::move(out));
  }

  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(out));
  }

  friend Poly operator*(const Rational& s, const Poly& p) {
    if (s == 0) return {};
    Poly r = p;
    for (auto& a : r.c_) a *= s;
    return r;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

  // Quotient and remainder of Euclidean division; divisor must be nonzero.
  friend std::pair<Poly, Poly> divmod(const Poly& num, const Poly& den) {
    std::vector<Rational> rem = num.c_;
    const int dd = den.degree();
    if (num.degree() < dd) return {Poly{}, num};
    std::vector<Rational> quot(rem.size() - static_cast<std::size_t>(dd));
    const Rational inv_lead = 1 / den.lead();
    for (int i = static_cast<int>(rem.size()) - 1; i >= dd; --i) {
      Rational f = rem[static_cast<std::size_t>(i)] * inv_lead;
      if (f == 0) continue;
      quot[static_cast<std::size_t>(i - dd)] = f;
      for (int j = 0; j <= dd; ++j) rem[static_cast<std::size_t>(i - dd + j)] -= f * den.c_[static_cast<std::size_t>(j)];
    }
    rem.resize(static_cast<std::size_t>(dd));
    return {Poly(std::move(quot)), Poly(std::move(rem))};
  }

  Poly monic() const {
    if (is_zero()) return {};
    return Rational(1 / lead()) * (*this);
  }

  friend Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
      Poly r = divmod(a, b).second;
      a = std::move(b);
      b = r.monic();
    }
    return a.monic();
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<Rational> out(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) out[i - 1] = c_[i] * static_cast<unsigned long>(i);
    return Poly(std::move(out));
  }

  // p(shift + scale·x)
  Poly compose_affine(const Rational& shift, const Rational& scale) const {
    Poly lin(std::vector<Rational>{shift, scale});
    Poly acc;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * lin + constant(*it);
    return acc;
  }

  // Every positive root is below the returned B: only coefficients of sign opposite
  // to the leading one can pull p to zero for x > 1.
  Rational positive_root_bound() const {
    if (degree() <= 0) return Rational(0);
    Rational best = 0;
    int s = sgn(lead());
    for (std::size_t i = 0; i + 1 < c_.size(); ++i) {
      if (sgn(c_[i]) != -s) continue;
      Rational r = abs(c_[i] / lead());
      if (r > best) best = r;
    }
    return best + 1;
  }

  std::string str(const std::string& var = "n") const {
    if (is_zero()) return "0";
    std::string out;
    for (int i = degree(); i >= 0; --i) {
      const Rational& a = c_[static_cast<std::size_t>(i)];
      if (a == 0) continue;
      std::string mag = to_string(abs(a));
      if (!out.empty()) out += a < 0 ? " - " : " + ";
      else if (a < 0) out += "-";
      bool unit = abs(a) == 1;
      if (i == 0) out += mag;
      else {
        if (!unit) out += (a.get_den() == 1 ? mag : "(" + mag + ")") + "*";
        out += var;
        if (i > 1) out += "^" + std::to_string(i);
      }
    }
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<Rational> c_;
};

// Sturm chain of p; counts distinct real roots in open intervals.
class SturmChain {
 public:
  explicit SturmChain(const Poly& p) {
    if (p.is_zero()) return;
    chain_.push_back(p);
    Poly d = p.derivative();
    if (d.is_zero()) return;
    chain_.push_back(d);
    for (;;) {
      Poly r = divmod(chain_[chain_.size() - 2], chain_.back()).second;
      if (r.is_zero()) break;
      chain_.push_back(-r);
    }
  }

  int variations(const Rational& x) const {
    int count = 0, last = 0;
    for (const auto& q : chain_) {
      int s = sgn(q.eval(x));
      if (s == 0) continue;
      if (last != 0 && s != last) ++count;
      last = s;
    }
    return count;
  }

  // Distinct roots in (a, b); neither endpoint may be a root of p.
  int roots_between(const Rational& a, const Rational& b) const {
    return variations(a) - variations(b);
  }

 private:
  std::vector<Poly> chain_;
};

inline constexpr Index kUnbounded = ~Index{0};

// Maximal run of integer points sharing one sign; `last` may be kUnbounded.
struct SignRun {
  Index first;
  Index last;
  int sign;

  friend bool operator==(const SignRun&, const SignRun&) = default;
};

namespace detail {

inline void push_run(std::vector<SignRun>& out, Index first, Index last, int s) {
  if (!out.empty() && out.back().sign == s && out.back().last + 1 == first) {
    out.back().last = last;
    return;
  }
  out.push_back({first, last, s});
}

inline Rational non_root_near(const Poly& p, const Rational& x, int direction) {
  Rational step(1, 2);
  Rational y = x + direction * step;
  while (p.eval(y) == 0) {
    step /= 2;
    y = x + direction * step;
  }
  return y;
}

inline void sign_runs_rec(const Poly& p, const SturmChain& chain, Index a, Index b,
                          std::vector<SignRun>& out) {
  Rational lo = non_root_near(p, from_index(a), -1);
  Rational hi = non_root_near(p, from_index(b), +1);
  if (chain.roots_between(lo, hi) == 0) {
    push_run(out, a, b, sgn(p.eval(a)));
    return;
  }
  if (b - a < 16) {
    for (Index k = a; k <= b; ++k) push_run(out, k, k, sgn(p.eval(k)));
    return;
  }
  Index mid = a + (b - a) / 2;
  sign_runs_rec(p, chain, a, mid, out);
  sign_runs_rec(p, chain, mid + 1, b, out);
}

}  // namespace detail

// Sign of p at every integer k in [lo, hi] (hi may be kUnbounded), as maximal runs.
inline std::vector<SignRun> sign_runs(const Poly& p, Index lo, Index hi = kUnbounded) {
  std::vector<SignRun> out;
  if (hi != kUnbounded && hi < lo) return out;
  if (p.is_constant()) {
    out.push_back({lo, hi, sgn(p.lead())});
    return out;
  }
  Integer bound = ceil_of(p.positive_root_bound());
  Index cut = hi;
  if (hi == kUnbounded || Integer(static_cast<unsigned long>(hi)) > bound) {
    if (hi == kUnbounded && bound >= Integer(static_cast<unsigned long>(kIndexLimit))) {
      throw Error(Errc::RepresentationLimit,
                  "sign changes of " + p.str("k") + " extend beyond index 2^62");
    }
    cut = static_cast<Index>(bound.get_ui());
  }
  if (cut >= lo) {
    SturmChain chain(p);
    detail::sign_runs_rec(p, chain, lo, cut, out);
  }
  if (cut != hi) {
    Index from = std::max(lo, cut + 1);
    detail::push_run(out, from, hi, sgn(p.lead()));
  }
  return out;
}

}  // namespace hyperseq
