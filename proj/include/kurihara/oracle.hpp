#pragma once

// Periods by the AGM, q-expansion coefficients, and a numerical evaluation of
// 2 pi int_0^oo f(a/b + iy) dy used to calibrate and cross-check the exact symbols.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "kurihara/curves.hpp"
#include "kurihara/modsym.hpp"

namespace kurihara {

using Real = long double;

/// a_1 .. a_nmax of the newform attached to E (index 0 unused).
inline std::vector<std::int64_t> an_coefficients(const EllipticCurve& E, std::size_t nmax) {
  std::vector<std::int64_t> a(nmax + 1, 0);
  if (nmax >= 1) a[1] = 1;
  std::vector<std::uint32_t> spf(nmax + 1, 0);
  for (std::size_t i = 2; i <= nmax; ++i)
    if (spf[i] == 0)
      for (std::size_t j = i; j <= nmax; j += i)
        if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
  for (std::size_t n = 2; n <= nmax; ++n) {
    std::size_t p = spf[n], m = n, pk = 1;
    while (m % p == 0) {
      m /= p;
      pk *= p;
    }
    if (m > 1) {
      a[n] = a[pk] * a[m];
    } else if (pk == p) {
      a[n] = trace_of_frobenius(E, p);
    } else if (E.is_good(p)) {
      a[n] = a[p] * a[n / p] - static_cast<std::int64_t>(p) * a[n / p / p];
    } else {
      a[n] = a[p] * a[n / p];
    }
  }
  return a;
}

struct Periods {
  Real omega_plus = 0;   // least positive real period times the number of real components
  Real omega_minus = 0;  // the matching imaginary period
};

inline Real agm(Real a, Real b) {
  for (int i = 0; i < 100 && std::fabs(a - b) > 1e-30L * std::fabs(a); ++i) {
    Real m = (a + b) / 2;
    b = std::sqrt(a * b);
    a = m;
  }
  return a;
}

/// Roots of x^3 + c2 x^2 + c1 x + c0 (Durand-Kerner, polished by Newton).
inline std::array<std::complex<Real>, 3> cubic_roots(Real c2, Real c1, Real c0) {
  using C = std::complex<Real>;
  auto f = [&](C x) { return ((x + c2) * x + c1) * x + c0; };
  auto df = [&](C x) { return (Real(3) * x + Real(2) * c2) * x + c1; };
  std::array<C, 3> z = {C(0.4L, 0.9L), C(0.4L, 0.9L) * C(0.4L, 0.9L), C(0.4L, 0.9L) * C(0.4L, 0.9L) * C(0.4L, 0.9L)};
  Real scale = 1 + std::fabs(c2) + std::fabs(c1) + std::fabs(c0);
  for (auto& w : z) w *= scale;
  for (int it = 0; it < 2000; ++it) {
    Real change = 0;
    for (int i = 0; i < 3; ++i) {
      C den = 1;
      for (int j = 0; j < 3; ++j)
        if (j != i) den *= (z[i] - z[j]);
      C step = f(z[i]) / den;
      z[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-24L * scale) break;
  }
  for (auto& w : z)
    for (int it = 0; it < 5; ++it) {
      C d = df(w);
      if (std::abs(d) == 0) break;
      w -= f(w) / d;
    }
  return z;
}

inline Periods compute_periods(const EllipticCurve& E) {
  Real b2 = E.b2().get_d(), b4 = E.b4().get_d(), b6 = E.b6().get_d();
  // 4x^3 + b2 x^2 + 2 b4 x + b6
  auto r = cubic_roots(b2 / 4, b4 / 2, b6 / 4);
  const Real pi = std::numbers::pi_v<Real>;
  Periods out;
  if (E.discriminant() > 0) {
    std::array<Real, 3> e = {r[0].real(), r[1].real(), r[2].real()};
    std::sort(e.begin(), e.end(), std::greater<>());
    out.omega_plus = 2 * pi / agm(std::sqrt(e[0] - e[2]), std::sqrt(e[0] - e[1]));
    out.omega_minus = pi / agm(std::sqrt(e[0] - e[2]), std::sqrt(e[1] - e[2]));
  } else {
    int real_idx = 0;
    for (int i = 1; i < 3; ++i)
      if (std::fabs(r[i].imag()) < std::fabs(r[real_idx].imag())) real_idx = i;
    Real e1 = r[real_idx].real();
    std::complex<Real> z = r[(real_idx + 1) % 3];
    Real rr = std::abs(e1 - z);
    Real x = e1 - z.real();
    out.omega_plus = pi / agm(std::sqrt(rr), std::sqrt((rr + x) / 2));
    out.omega_minus = pi / agm(std::sqrt(rr), std::sqrt((rr - x) / 2));
  }
  return out;
}

struct OracleValue {
  Real re = 0, im = 0;  // 2 pi int_0^oo f(a/b + iy) dy, split into real and imaginary parts
  Real plus = 0;        // re / Omega^+
  Real minus = 0;       // im / Omega^-
  std::size_t terms = 0;
};

/// Is the cusp a/b reachable by a single Atkin-Lehner involution W_Q with Q || N?
inline bool oracle_supports(std::uint64_t N, std::int64_t b) {
  std::uint64_t g = std::gcd(static_cast<std::uint64_t>(b), N);
  std::uint64_t Q = N / g;
  if (std::gcd(Q, g) != 1) return false;
  if (Q == N) return true;
  for (auto [q, e] : arith::factorize(Q))
    if (e > 1) return false;  // the W_q eigenvalue is not determined by a_q
  return true;
}

/// Number of q-expansion terms needed for the cusp a/b at ~1e-18 truncation.
inline std::size_t oracle_terms_needed(std::uint64_t N, std::int64_t b) {
  std::uint64_t g = std::gcd(static_cast<std::uint64_t>(b), N);
  Real t = static_cast<Real>(b) * std::sqrt(static_cast<Real>(N / g));
  return static_cast<std::size_t>(std::ceil(7 * t)) + 16;
}

/// Numerical value of the period integral at a/b using coefficients an[1..].
/// Splits the path at a/b + i/(b sqrt Q) and folds the lower half through W_Q.
inline OracleValue numeric_oracle(const EllipticCurve& E, int root_number, const std::vector<std::int64_t>& an,
                                  const Periods& periods, std::int64_t a, std::int64_t b) {
  if (b <= 0 || std::gcd(a < 0 ? -a : a, b) != 1) throw InputError("numeric_oracle: need b > 0 and gcd(a, b) = 1");
  std::uint64_t N = E.conductor();
  if (!oracle_supports(N, b)) throw InputError("numeric_oracle: cusp denominator " + std::to_string(b) + " not supported at level " + std::to_string(N));
  std::uint64_t g = std::gcd(static_cast<std::uint64_t>(b), N);
  std::uint64_t Q = N / g;
  int wQ;
  if (Q == N) {
    wQ = -root_number;
  } else {
    wQ = 1;
    for (auto q : arith::prime_divisors(Q)) wQ *= -static_cast<int>(trace_of_frobenius(E, q));
  }
  std::size_t terms = oracle_terms_needed(N, b);
  if (terms >= an.size())
    throw PrecisionError("numeric_oracle: need " + std::to_string(terms) + " coefficients, have " + std::to_string(an.size() - 1));
  // w with Q a w = 1 mod b
  std::int64_t w = b == 1 ? 0 : arith::invmod(arith::mod(static_cast<std::int64_t>(Q % static_cast<std::uint64_t>(b)) * arith::mod(a, b), b), b);
  const Real pi = std::numbers::pi_v<Real>;
  Real t = 1 / (static_cast<Real>(b) * std::sqrt(static_cast<Real>(Q)));
  Real decay = std::exp(-2 * pi * t);
  Real damp = 1;
  Real re = 0, im = 0;
  std::int64_t am = arith::mod(a, b);
  for (std::size_t n = 1; n <= terms; ++n) {
    damp *= decay;
    if (an[n] == 0) continue;
    Real c = static_cast<Real>(an[n]) / static_cast<Real>(n) * damp;
    Real th1 = 2 * pi * static_cast<Real>(static_cast<std::int64_t>((static_cast<__int128>(n) * am) % b)) / b;
    Real th2 = 2 * pi * static_cast<Real>(static_cast<std::int64_t>((static_cast<__int128>(n) * w) % b)) / b;
    re += c * (std::cos(th1) - wQ * std::cos(th2));
    im += c * (std::sin(th1) + wQ * std::sin(th2));
  }
  OracleValue out;
  out.re = re;
  out.im = im;
  out.plus = re / periods.omega_plus;
  out.minus = im / periods.omega_minus;
  out.terms = terms;
  return out;
}

struct Calibration {
  Rational scale;
  std::vector<std::pair<std::int64_t, std::int64_t>> cusps;  // cusps used (first fixes, rest verify)
  Real max_residual = 0;
};

/// Find the rational period scale with [a/b]^+ = scale * phi_0(a/b), using cusps with b >= 2
/// and confirming on further cusps.
inline Calibration calibrate_period_scale(EigenSymbol& sym, const EllipticCurve& E, int root_number,
                                          std::int64_t max_den = 1000, int confirmations = 2) {
  const std::int64_t kMaxB = 60;
  std::size_t need = 0;
  for (std::int64_t b = 2; b <= kMaxB; ++b)
    if (oracle_supports(E.conductor(), b)) need = std::max(need, oracle_terms_needed(E.conductor(), b));
  auto an = an_coefficients(E, need + 1);
  auto periods = compute_periods(E);
  Calibration cal;
  bool have = false;
  int confirmed = 0;
  for (std::int64_t b = 2; b <= kMaxB && confirmed < confirmations; ++b) {
    if (!oracle_supports(E.conductor(), b)) continue;
    for (std::int64_t a = 1; a < b && confirmed < confirmations; ++a) {
      if (std::gcd(a, b) != 1) continue;
      std::int64_t phi = eval_primitive(sym, a, b);
      auto val = numeric_oracle(E, root_number, an, periods, a, b);
      if (!have) {
        if (phi == 0) continue;
        Real ratio = val.plus / static_cast<Real>(phi);
        Rational s = arith::rationalize(ratio, max_den);
        Real resid = std::fabs(ratio - static_cast<Real>(s.get_d()));
        if (s == 0 || resid > 1e-8L * std::max<Real>(1, std::fabs(ratio)))
          throw PrecisionError("calibrate_period_scale: ratio " + std::to_string(static_cast<double>(ratio)) + " is not a small rational");
        cal.scale = s;
        cal.cusps.emplace_back(a, b);
        have = true;
      } else {
        Real predicted = static_cast<Real>(cal.scale.get_d()) * static_cast<Real>(phi);
        Real resid = std::fabs(predicted - val.plus);
        cal.max_residual = std::max(cal.max_residual, resid);
        if (resid > 1e-7L) throw InvariantError("calibrate_period_scale: confirmation failed at " + std::to_string(a) + "/" + std::to_string(b));
        cal.cusps.emplace_back(a, b);
        if (phi != 0) ++confirmed;
      }
    }
  }
  if (!have || confirmed < confirmations) throw PrecisionError("calibrate_period_scale: not enough supported cusps");
  sym.period_scale = cal.scale;
  return cal;
}

}  // namespace kurihara
