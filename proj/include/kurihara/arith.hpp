#pragma once

// Elementary number theory on machine words and GMP integers.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kurihara/errors.hpp"

namespace kurihara {

using Integer = mpz_class;
using Rational = mpq_class;

namespace arith {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Least non-negative residue of a mod m (m > 0).
inline std::int64_t mod(std::int64_t a, std::int64_t m) {
  std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

inline std::uint64_t mod(const Integer& a, std::uint64_t m) {
  return mpz_fdiv_ui(a.get_mpz_t(), m);
}

/// Inverse of a modulo m; throws if gcd(a, m) != 1.
inline std::int64_t invmod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, r = mod(a, m);
  while (r != 0) {
    std::int64_t q = g / r;
    std::tie(g, r) = std::make_pair(r, g - q * r);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) throw InputError("invmod: " + std::to_string(a) + " is not a unit mod " + std::to_string(m));
  return mod(x, m);
}

inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // Deterministic witness set for 64-bit inputs.
  for (std::uint64_t a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

/// Prime factorisation by trial division, as (prime, exponent) pairs in increasing order.
inline std::vector<std::pair<std::uint64_t, int>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, int>> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

inline std::vector<std::uint64_t> prime_divisors(std::uint64_t n) {
  std::vector<std::uint64_t> out;
  for (auto [p, e] : factorize(n)) out.push_back(p);
  return out;
}

inline bool is_squarefree(std::uint64_t n) {
  for (auto [p, e] : factorize(n))
    if (e > 1) return false;
  return true;
}

inline std::vector<std::uint64_t> primes_up_to(std::uint64_t bound) {
  std::vector<std::uint64_t> out;
  if (bound < 2) return out;
  std::vector<bool> composite(bound + 1, false);
  for (std::uint64_t i = 2; i <= bound; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= bound; j += i) composite[j] = true;
  }
  return out;
}

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<long double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

inline std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t phi = n;
  for (auto [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

/// Legendre symbol (a/p) for an odd prime p.
inline int legendre(std::int64_t a, std::uint64_t p) {
  auto r = static_cast<std::uint64_t>(mod(a, static_cast<std::int64_t>(p)));
  if (r == 0) return 0;
  return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

/// Square root of a quadratic residue a modulo an odd prime p (Tonelli-Shanks); smallest root.
inline std::uint64_t sqrt_mod(std::uint64_t a, std::uint64_t p) {
  a %= p;
  if (a == 0) return 0;
  if (powmod(a, (p - 1) / 2, p) != 1) throw InputError("sqrt_mod: non-residue");
  std::uint64_t q = p - 1;
  int s = 0;
  while ((q & 1) == 0) {
    q >>= 1;
    ++s;
  }
  std::uint64_t z = 2;
  while (powmod(z, (p - 1) / 2, p) != p - 1) ++z;
  std::uint64_t m = s, c = powmod(z, q, p), t = powmod(a, q, p), r = powmod(a, (q + 1) / 2, p);
  while (t != 1) {
    std::uint64_t i = 0, tt = t;
    while (tt != 1) {
      tt = mulmod(tt, tt, p);
      ++i;
    }
    std::uint64_t b = c;
    for (std::uint64_t j = 0; j + 1 < m - i; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return std::min(r, p - r);
}

/// Kronecker symbol (a/n) for n > 0.
inline int kronecker(std::int64_t a, std::uint64_t n) {
  if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    if (a % 2 == 0) return 0;
    std::int64_t r = mod(a, 8);
    if (r == 3 || r == 5) result = -result;
  }
  // Jacobi symbol for the odd part.
  std::int64_t m = static_cast<std::int64_t>(n);
  std::int64_t x = mod(a, m);
  while (x != 0) {
    while (x % 2 == 0) {
      x /= 2;
      std::int64_t r = m % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(x, m);
    if (x % 4 == 3 && m % 4 == 3) result = -result;
    x %= m;
  }
  return m == 1 ? result : 0;
}

/// Is D a fundamental discriminant (D = 1 mod 4 squarefree, or D = 4m with m = 2,3 mod 4 squarefree)?
inline bool is_fundamental_discriminant(std::int64_t d) {
  if (d == 0 || d == 1) return false;
  std::uint64_t a = static_cast<std::uint64_t>(d < 0 ? -d : d);
  if (mod(d, 4) == 1) return is_squarefree(a);
  if (mod(d, 4) != 0) return false;
  std::int64_t m = d / 4;
  std::int64_t r = mod(m, 4);
  return (r == 2 || r == 3) && is_squarefree(a / 4);
}

/// p-adic valuation of a non-zero integer; returns cap when p^cap divides it (or it is zero).
inline int valuation(const Integer& x, std::uint64_t p, int cap = std::numeric_limits<int>::max()) {
  if (x == 0) return cap;
  Integer y = x;
  int v = 0;
  while (v < cap && mpz_divisible_ui_p(y.get_mpz_t(), p)) {
    mpz_divexact_ui(y.get_mpz_t(), y.get_mpz_t(), p);
    ++v;
  }
  return v;
}

inline int valuation(std::int64_t x, std::uint64_t p, int cap = std::numeric_limits<int>::max()) {
  return valuation(Integer(static_cast<long>(x)), p, cap);
}

/// p-adic valuation of a non-zero rational.
inline int valuation(const Rational& x, std::uint64_t p) {
  if (x == 0) throw InputError("valuation of zero rational");
  return valuation(Integer(x.get_num()), p) - valuation(Integer(x.get_den()), p);
}

inline Integer ipow(std::uint64_t base, unsigned exp) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
  return r;
}

/// Multiplicative order of a modulo the prime l.
inline std::uint64_t multiplicative_order(std::uint64_t a, std::uint64_t l) {
  std::uint64_t order = l - 1;
  for (auto [r, e] : factorize(l - 1)) {
    while (order % r == 0 && powmod(a, order / r, l) == 1) order /= r;
  }
  return order;
}

inline bool is_primitive_root(std::uint64_t a, std::uint64_t l) {
  if (a % l == 0) return false;
  return multiplicative_order(a, l) == l - 1;
}

/// Smallest primitive root modulo a prime l.
inline std::uint64_t smallest_primitive_root(std::uint64_t l) {
  if (l == 2) return 1;
  for (std::uint64_t g = 2; g < l; ++g)
    if (is_primitive_root(g, l)) return g;
  throw InputError("no primitive root mod " + std::to_string(l));
}

/// Reduce a p-integral rational modulo p^e, as a residue in [0, p^e).
inline Integer reduce_mod(const Rational& x, const Integer& modulus) {
  Integer den = x.get_den();
  Integer inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), modulus.get_mpz_t()) == 0)
    throw HypothesisError("rational " + x.get_str() + " is not integral at the working prime");
  Integer r = Integer(x.get_num()) * inv;
  mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), modulus.get_mpz_t());
  return r;
}

/// Best rational approximation with denominator <= max_den (continued fractions).
inline Rational rationalize(long double x, std::int64_t max_den) {
  long double y = x;
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    long double a = std::floor(y);
    auto ai = static_cast<std::int64_t>(a);
    std::int64_t p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    long double frac = y - a;
    if (std::fabs(frac) < 1e-15L) break;
    y = 1.0L / frac;
  }
  Rational r(static_cast<long>(p1), static_cast<long>(q1));
  r.canonicalize();
  return r;
}

}  // namespace arith

/// A p-adic exponent that may be +infinity (e.g. t_1 for the zero ideal I_1).
class Exponent {
 public:
  constexpr Exponent() = default;
  constexpr explicit Exponent(int v) : value_(v) {}
  static constexpr Exponent infinity() {
    Exponent e;
    e.infinite_ = true;
    return e;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr int value() const {
    if (infinite_) throw InvariantError("value() of an infinite exponent");
    return value_;
  }

  friend constexpr bool operator==(const Exponent& a, const Exponent& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend constexpr bool operator<(const Exponent& a, const Exponent& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr Exponent min(const Exponent& a, const Exponent& b) { return b < a ? b : a; }

  std::string str() const { return infinite_ ? "inf" : std::to_string(value_); }

 private:
  int value_ = 0;
  bool infinite_ = false;
};

}  // namespace kurihara
