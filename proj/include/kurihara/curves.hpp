#pragma once

// Elliptic curves over Q: invariants, traces of Frobenius, twists, conductor splitting.

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "kurihara/arith.hpp"

namespace kurihara {

/// Hypotheses attached to a (curve, p) pair. They are metadata and never computed.
struct CurveFlags {
  bool surjective = false;
  bool manin_ok = false;
  bool condition_cr = false;  // unchecked: cannot be decided from Weierstrass data
};

namespace detail {
struct TraceCache {
  std::mutex mu;
  std::unordered_map<std::uint64_t, std::int64_t> values;
};
}  // namespace detail

class EllipticCurve {
 public:
  EllipticCurve() = default;
  EllipticCurve(std::string label, std::array<Integer, 5> ainvs, std::uint64_t conductor)
      : label_(std::move(label)), a_(std::move(ainvs)), conductor_(conductor) {
    validate();
  }

  const std::string& label() const { return label_; }
  const std::array<Integer, 5>& ainvs() const { return a_; }
  const Integer& a1() const { return a_[0]; }
  const Integer& a2() const { return a_[1]; }
  const Integer& a3() const { return a_[2]; }
  const Integer& a4() const { return a_[3]; }
  const Integer& a6() const { return a_[4]; }
  std::uint64_t conductor() const { return conductor_; }

  Integer b2() const { return a1() * a1() + 4 * a2(); }
  Integer b4() const { return 2 * a4() + a1() * a3(); }
  Integer b6() const { return a3() * a3() + 4 * a6(); }
  Integer b8() const {
    return a1() * a1() * a6() + 4 * a2() * a6() - a1() * a3() * a4() + a2() * a3() * a3() - a4() * a4();
  }
  Integer c4() const { return b2() * b2() - 24 * b4(); }
  Integer c6() const { return -b2() * b2() * b2() + 36 * b2() * b4() - 216 * b6(); }
  Integer discriminant() const {
    Integer B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
  }

  std::map<std::uint64_t, CurveFlags> flags;
  std::optional<int> known_rank;
  std::optional<Integer> known_sha_order;

  bool is_good(std::uint64_t q) const { return conductor_ % q != 0; }

  /// Memoised trace of Frobenius; shared between copies of the curve.
  std::int64_t cached_trace(std::uint64_t q, std::int64_t (*compute)(const EllipticCurve&, std::uint64_t)) const {
    {
      std::lock_guard<std::mutex> lock(cache_->mu);
      auto it = cache_->values.find(q);
      if (it != cache_->values.end()) return it->second;
    }
    std::int64_t v = compute(*this, q);
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->values.emplace(q, v);
    return v;
  }

 private:
  void validate() const {
    Integer d = discriminant();
    if (d == 0) throw InputError(label_ + ": singular Weierstrass model");
    if (conductor_ == 0) throw InputError(label_ + ": conductor must be positive");
    for (auto q : arith::prime_divisors(conductor_)) {
      if (!mpz_divisible_ui_p(d.get_mpz_t(), q))
        throw InputError(label_ + ": conductor prime " + std::to_string(q) + " does not divide the discriminant");
    }
  }

  std::string label_;
  std::array<Integer, 5> a_{};
  std::uint64_t conductor_ = 1;
  std::shared_ptr<detail::TraceCache> cache_ = std::make_shared<detail::TraceCache>();
};

namespace detail {

/// #E(F_q) of the reduced (possibly singular) model by brute force over all pairs.
inline std::uint64_t count_points_pairs(const EllipticCurve& E, std::uint64_t q) {
  std::array<std::int64_t, 5> a{};
  for (int i = 0; i < 5; ++i) a[i] = static_cast<std::int64_t>(arith::mod(E.ainvs()[i], q));
  std::uint64_t count = 1;
  auto Q = static_cast<std::int64_t>(q);
  for (std::int64_t x = 0; x < Q; ++x) {
    for (std::int64_t y = 0; y < Q; ++y) {
      std::int64_t lhs = (y * y + a[0] * x * y + a[2] * y) % Q;
      std::int64_t rhs = (((x * x % Q) * x) + a[1] * x % Q * x + a[3] * x + a[4]) % Q;
      if (lhs == rhs) ++count;
    }
  }
  return count;
}

/// #E(F_q) for odd q via the completed square 4x^3 + b2 x^2 + 2 b4 x + b6.
inline std::uint64_t count_points_naive(const EllipticCurve& E, std::uint64_t q) {
  if (q == 2) return count_points_pairs(E, q);
  std::vector<signed char> chi(q, -1);
  chi[0] = 0;
  for (std::uint64_t y = 1; y < q; ++y) chi[y * y % q] = 1;
  std::uint64_t b2 = arith::mod(E.b2(), q), b4 = arith::mod(E.b4(), q), b6 = arith::mod(E.b6(), q);
  std::int64_t sum = 0;
  for (std::uint64_t x = 0; x < q; ++x) {
    std::uint64_t f = (4 * x % q * x % q * x + b2 * x % q * x + 2 * b4 * x + b6) % q;
    sum += chi[f];
  }
  return static_cast<std::uint64_t>(static_cast<std::int64_t>(q) + 1 + sum);
}

/// Affine arithmetic on y^2 = x^3 + A x + B over F_q.
struct ShortCurve {
  std::uint64_t q, A, B;
  struct Pt {
    std::uint64_t x = 0, y = 0;
    bool inf = true;
    bool operator==(const Pt& o) const { return inf == o.inf && (inf || (x == o.x && y == o.y)); }
  };

  std::uint64_t inv(std::uint64_t v) const { return static_cast<std::uint64_t>(arith::invmod(static_cast<std::int64_t>(v), static_cast<std::int64_t>(q))); }
  std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + q - b; }

  Pt add(const Pt& P, const Pt& R) const {
    if (P.inf) return R;
    if (R.inf) return P;
    std::uint64_t lam;
    if (P.x == R.x) {
      if ((P.y + R.y) % q == 0) return Pt{};
      lam = arith::mulmod((3 * arith::mulmod(P.x, P.x, q) + A) % q, inv(2 * P.y % q), q);
    } else {
      lam = arith::mulmod(sub(R.y, P.y), inv(sub(R.x, P.x)), q);
    }
    std::uint64_t x3 = sub(sub(arith::mulmod(lam, lam, q), P.x), R.x);
    std::uint64_t y3 = sub(arith::mulmod(lam, sub(P.x, x3), q), P.y);
    return Pt{x3, y3, false};
  }
  Pt neg(const Pt& P) const { return P.inf ? P : Pt{P.x, (q - P.y) % q, false}; }
  Pt mul(std::uint64_t n, Pt P) const {
    Pt R;
    while (n > 0) {
      if (n & 1) R = add(R, P);
      P = add(P, P);
      n >>= 1;
    }
    return R;
  }

  Pt random_point(std::mt19937_64& rng) const {
    std::uniform_int_distribution<std::uint64_t> dist(0, q - 1);
    while (true) {
      std::uint64_t x = dist(rng);
      std::uint64_t f = (arith::mulmod(arith::mulmod(x, x, q), x, q) + arith::mulmod(A, x, q) + B) % q;
      if (f == 0) return Pt{x, 0, false};
      if (arith::powmod(f, (q - 1) / 2, q) != 1) continue;
      return Pt{x, arith::sqrt_mod(f, q), false};
    }
  }

  /// Exact order of P, given that some multiple in [lo, hi] annihilates it (baby-step giant-step).
  std::uint64_t order(const Pt& P, std::uint64_t lo, std::uint64_t hi) const {
    if (P.inf) return 1;
    std::uint64_t s = arith::isqrt(hi - lo) + 1;
    std::unordered_map<std::uint64_t, std::pair<std::uint64_t, std::uint64_t>> baby;  // x -> (j, y)
    Pt J;
    for (std::uint64_t j = 0; j <= s; ++j) {
      if (!J.inf) baby.emplace(J.x, std::make_pair(j, J.y));
      J = add(J, P);
    }
    std::uint64_t step = 2 * s + 1;
    Pt G = mul(step, P);
    std::uint64_t c = lo + s;
    Pt R = mul(c, P);
    std::optional<std::uint64_t> m;
    for (std::uint64_t i = 0; c + i * step <= hi + s + step && !m; ++i, R = add(R, G)) {
      std::uint64_t base = c + i * step;
      if (R.inf) {
        m = base;
        break;
      }
      auto it = baby.find(R.x);
      if (it == baby.end()) continue;
      auto [j, y] = it->second;
      m = (y == R.y) ? base - j : base + j;
    }
    if (!m || *m == 0) throw InvariantError("BSGS: no annihilating multiple in the Hasse interval");
    std::uint64_t ord = *m;
    for (auto [r, e] : arith::factorize(ord)) {
      while (ord % r == 0 && mul(ord / r, P).inf) ord /= r;
    }
    return ord;
  }
};

/// #E(F_q) for q > 3 via BSGS on the short model and its quadratic twist.
inline std::uint64_t count_points_bsgs(const EllipticCurve& E, std::uint64_t q) {
  if (q <= 3) return count_points_naive(E, q);
  auto mq = [q](const Integer& z) { return arith::mod(z, q); };
  std::uint64_t A = mq(-27 * E.c4()), B = mq(-54 * E.c6());
  std::uint64_t d = 2;
  while (arith::legendre(static_cast<std::int64_t>(d), q) != -1) ++d;
  ShortCurve C{q, A, B};
  std::uint64_t d2 = arith::mulmod(d, d, q);
  ShortCurve T{q, arith::mulmod(A, d2, q), arith::mulmod(B, arith::mulmod(d2, d, q), q)};

  std::uint64_t w = 2 * arith::isqrt(q) + 2;
  std::uint64_t lo = q + 1 > w ? q + 1 - w : 1, hi = q + 1 + w;
  std::mt19937_64 rng(q);
  std::uint64_t L = 1, Lt = 1;
  for (int iter = 0; iter < 200; ++iter) {
    const ShortCurve& cur = (iter % 2 == 0) ? C : T;
    std::uint64_t o = cur.order(cur.random_point(rng), lo, hi);
    if (iter % 2 == 0)
      L = std::lcm(L, o);
    else
      Lt = std::lcm(Lt, o);
    std::optional<std::uint64_t> found;
    int candidates = 0;
    for (std::uint64_t n = (lo + L - 1) / L * L; n <= hi; n += L) {
      if ((2 * q + 2 - n) % Lt == 0) {
        found = n;
        ++candidates;
      }
    }
    if (candidates == 1) return *found;
    if (candidates == 0) throw InvariantError("BSGS: inconsistent group orders at q=" + std::to_string(q));
  }
  throw InvariantError("BSGS: group order undetermined at q=" + std::to_string(q));
}

inline std::int64_t compute_trace(const EllipticCurve& E, std::uint64_t q) {
  auto Q = static_cast<std::int64_t>(q);
  if (E.is_good(q)) {
    std::uint64_t n = q < 10000 ? count_points_naive(E, q) : count_points_bsgs(E, q);
    return Q + 1 - static_cast<std::int64_t>(n);
  }
  if (q <= 3) {
    // The singular reduction still satisfies a_q = q + 1 - #E(F_q).
    return Q + 1 - static_cast<std::int64_t>(count_points_pairs(E, q));
  }
  Integer disc = E.discriminant(), c4 = E.c4(), c6 = E.c6();
  bool multiplicative = arith::valuation(disc, q, 1) > 0 && arith::mod(c4, q) != 0;
  if (!multiplicative) return 0;
  return arith::legendre(static_cast<std::int64_t>(arith::mod(Integer(-c6), q)), q) == 1 ? 1 : -1;
}

}  // namespace detail

/// Point counts of the reduction at a good prime: full enumeration and baby-step giant-step.
using detail::count_points_bsgs;
using detail::count_points_naive;

/// a_q(E) for a prime q: q + 1 - #E(F_q) at good q, and +1/-1/0 for split/nonsplit/additive at bad q.
inline std::int64_t trace_of_frobenius(const EllipticCurve& E, std::uint64_t q) {
  if (!arith::is_prime(q)) throw InputError("trace_of_frobenius: " + std::to_string(q) + " is not prime");
  return E.cached_trace(q, &detail::compute_trace);
}

/// The change of variables x = u^2 x' + r, y = u^3 y' + s u^2 x' + t, if it yields an integral model.
inline std::optional<std::array<Integer, 5>> transform_model(const std::array<Integer, 5>& a, const Integer& u,
                                                             const Integer& r, const Integer& s, const Integer& t) {
  const auto &a1 = a[0], &a2 = a[1], &a3 = a[2], &a4 = a[3], &a6 = a[4];
  std::array<Integer, 5> num = {
      a1 + 2 * s,
      a2 - s * a1 + 3 * r - s * s,
      a3 + r * a1 + 2 * t,
      a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t,
      a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1,
  };
  const int weight[5] = {1, 2, 3, 4, 6};
  std::array<Integer, 5> out;
  for (int i = 0; i < 5; ++i) {
    Integer den;
    mpz_pow_ui(den.get_mpz_t(), u.get_mpz_t(), weight[i]);
    if (!mpz_divisible_p(num[i].get_mpz_t(), den.get_mpz_t())) return std::nullopt;
    mpz_divexact(out[i].get_mpz_t(), num[i].get_mpz_t(), den.get_mpz_t());
  }
  return out;
}

/// Remove superfluous powers of 2 and 3 from a model by exhaustive search over (r, s, t).
inline std::array<Integer, 5> reduce_model_at_2_and_3(std::array<Integer, 5> a) {
  for (long u : {2L, 3L}) {
    bool progress = true;
    while (progress) {
      progress = false;
      for (long r = 0; r < u * u && !progress; ++r)
        for (long s = 0; s < u && !progress; ++s)
          for (long t = 0; t < u * u * u && !progress; ++t) {
            if (auto m = transform_model(a, Integer(u), Integer(r), Integer(s), Integer(t))) {
              a = *m;
              progress = true;
            }
          }
    }
  }
  // Cremona's normalisation a1, a3 in {0, 1}, a2 in {-1, 0, 1}.
  Integer s = -(a[0] - arith::mod(a[0], 2)) / 2;
  a = *transform_model(a, 1, 0, s, 0);
  Integer r = -((a[1] + 1) - arith::mod(a[1] + 1, 3)) / 3;
  a = *transform_model(a, 1, r, 0, 0);
  Integer t = -(a[2] - arith::mod(a[2], 2)) / 2;
  a = *transform_model(a, 1, 0, 0, t);
  return a;
}

/// E1 and E2 are isomorphic over Q iff c4' = u^4 c4 and c6' = u^6 c6 for some rational u.
inline bool isomorphic(const EllipticCurve& E1, const EllipticCurve& E2) {
  Integer c4 = E1.c4(), c6 = E1.c6(), d4 = E2.c4(), d6 = E2.c6();
  if ((c4 == 0) != (d4 == 0) || (c6 == 0) != (d6 == 0)) return false;
  auto is_power = [](const Rational& x, unsigned k) {
    if (x <= 0 && k % 2 == 0) return false;
    Integer n = x.get_num(), d = x.get_den();
    return mpz_root(n.get_mpz_t(), n.get_mpz_t(), k) != 0 && mpz_root(d.get_mpz_t(), d.get_mpz_t(), k) != 0;
  };
  if (c4 == 0) return is_power(Rational(d6, c6), 6);
  if (c6 == 0) return is_power(Rational(d4, c4), 4);
  Rational r4(d4, c4), r6(d6, c6);
  r4.canonicalize();
  r6.canonicalize();
  Rational u2 = r6 / r4;  // = u^2
  if (!is_power(u2, 2)) return false;
  return u2 * u2 == r4;
}

/// Quadratic twist by a fundamental discriminant D. The conductor is N D^2 when gcd(D, N) = 1;
/// otherwise (e.g. twisting back) it must be supplied by the caller.
inline EllipticCurve quadratic_twist(const EllipticCurve& E, std::int64_t D,
                                     std::optional<std::uint64_t> conductor = std::nullopt) {
  if (!arith::is_fundamental_discriminant(D)) throw InputError("quadratic_twist: " + std::to_string(D) + " is not a fundamental discriminant");
  std::uint64_t absD = static_cast<std::uint64_t>(D < 0 ? -D : D);
  if (!conductor && std::gcd(absD, E.conductor()) != 1)
    throw InputError("quadratic_twist: discriminant shares a prime with the conductor");
  Integer d(static_cast<long>(D));
  std::array<Integer, 5> a = {0, d * E.b2(), 0, 8 * d * d * E.b4(), 16 * d * d * d * E.b6()};
  a = reduce_model_at_2_and_3(a);
  std::string label = E.label() + "^(" + std::to_string(D) + ")";
  EllipticCurve T(label, a, conductor.value_or(E.conductor() * absD * absD));
  T.flags = E.flags;
  return T;
}

/// Root number of the twist: W(E^D) = W(E) chi_D(-N) when gcd(D, N) = 1.
inline int twist_root_number(const EllipticCurve& E, int W, std::int64_t D) {
  int chi = arith::kronecker(D, E.conductor());  // chi_D(N)
  return D < 0 ? -W * chi : W * chi;            // chi_D(-1) = sign(D)
}

/// chi_D(q) for the quadratic character of discriminant D.
inline int quadratic_character(std::int64_t D, std::uint64_t q) { return arith::kronecker(D, q); }

struct FieldSplit {
  std::int64_t D_K = 0;
  std::uint64_t n_plus = 1, n_minus = 1;
  int nu_minus = 0;
  bool nu_minus_even() const { return nu_minus % 2 == 0; }
};

/// Factor N = N+ N- according to splitting in K = Q(sqrt(D_K)).
inline FieldSplit split_conductor(std::uint64_t N, std::int64_t D_K, std::optional<std::uint64_t> p = std::nullopt) {
  if (D_K >= 0 || !arith::is_fundamental_discriminant(D_K))
    throw InputError("split_conductor: D_K must be a negative fundamental discriminant");
  std::uint64_t absD = static_cast<std::uint64_t>(-D_K);
  if (p && absD % *p == 0) throw HypothesisError("split_conductor: p ramifies in K");
  FieldSplit out;
  out.D_K = D_K;
  for (auto [q, e] : arith::factorize(N)) {
    int chi = arith::kronecker(D_K, q);
    if (chi == 0) throw InvariantError("split_conductor: " + std::to_string(q) + " | N ramifies in K");
    std::uint64_t qe = 1;
    for (int i = 0; i < e; ++i) qe *= q;
    if (chi == 1) {
      out.n_plus *= qe;
    } else {
      if (e > 1) throw HypothesisError("split_conductor: N- is not squarefree at " + std::to_string(q));
      out.n_minus *= qe;
      ++out.nu_minus;
    }
  }
  return out;
}

}  // namespace kurihara
