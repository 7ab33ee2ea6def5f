#pragma once

// Local components of the Gross point of conductor 1: theta, i_q(theta), i_q(J),
// and varsigma_q, as matrices with entries known modulo q^m.

#include <array>
#include <optional>
#include <string>

#include "kurihara/arith.hpp"
#include "kurihara/errors.hpp"

namespace kurihara {

/// O_K = Z + Z theta for K = Q(sqrt(-D)), D > 0 (the discriminant of K is -D).
struct QuadraticData {
  std::int64_t D = 0;
  Integer theta_trace;
  Integer theta_norm;
};

inline QuadraticData make_theta(std::int64_t D) {
  if (D <= 0 || !arith::is_fundamental_discriminant(-D)) throw InputError("make_theta: -" + std::to_string(D) + " is not a fundamental discriminant");
  QuadraticData q;
  q.D = D;
  Integer d(static_cast<long>(D));
  if (D % 2 != 0) {
    // theta = (D - sqrt(-D)) / 2
    q.theta_trace = d;
    q.theta_norm = (d * d + d) / 4;
  } else {
    // theta = (D - 2 sqrt(-D)) / 4
    q.theta_trace = d / 2;
    q.theta_norm = (d * d + 4 * d) / 16;
  }
  return q;
}

/// 2x2 matrix over Z/q^m, optionally times a scalar 1/sqrt(scalar_inv_sqrt) kept symbolic.
struct PadicMatrix2 {
  std::uint64_t q = 0;
  unsigned precision = 1;
  std::array<Integer, 4> entries;  // row major, each in [0, q^m)
  std::optional<std::int64_t> inv_sqrt_scalar;

  Integer modulus() const { return arith::ipow(q, precision); }
  const Integer& operator()(int i, int j) const { return entries[2 * i + j]; }
  Integer det() const { return reduce(entries[0] * entries[3] - entries[1] * entries[2]); }
  Integer trace() const { return reduce(entries[0] + entries[3]); }
  Integer reduce(const Integer& x) const {
    Integer m = modulus(), r = x % m;
    if (r < 0) r += m;
    return r;
  }
  bool operator==(const PadicMatrix2& o) const {
    return q == o.q && precision == o.precision && entries == o.entries && inv_sqrt_scalar == o.inv_sqrt_scalar;
  }
};

inline PadicMatrix2 make_matrix(std::uint64_t q, unsigned m, const Integer& a, const Integer& b, const Integer& c, const Integer& d) {
  if (m < 1) throw InputError("precision must be >= 1");
  if (!arith::is_prime(q)) throw InputError("matrix prime " + std::to_string(q) + " is not prime");
  PadicMatrix2 M;
  M.q = q;
  M.precision = m;
  M.entries = {a, b, c, d};
  for (auto& e : M.entries) e = M.reduce(e);
  return M;
}

inline PadicMatrix2 operator*(const PadicMatrix2& A, const PadicMatrix2& B) {
  if (A.q != B.q) throw InputError("matrix product over different primes");
  unsigned m = std::min(A.precision, B.precision);
  return make_matrix(A.q, m, A(0, 0) * B(0, 0) + A(0, 1) * B(1, 0), A(0, 0) * B(0, 1) + A(0, 1) * B(1, 1),
                     A(1, 0) * B(0, 0) + A(1, 1) * B(1, 0), A(1, 0) * B(0, 1) + A(1, 1) * B(1, 1));
}

inline PadicMatrix2 scalar_matrix(std::uint64_t q, unsigned m, const Integer& s) { return make_matrix(q, m, s, 0, 0, s); }

inline PadicMatrix2 scale(const PadicMatrix2& A, const Integer& s) {
  return make_matrix(A.q, A.precision, s * A(0, 0), s * A(0, 1), s * A(1, 0), s * A(1, 1));
}

/// s with s^2 = beta mod q^m and s mod q the smaller square root in [1, q).
inline Integer padic_sqrt(const Integer& beta, std::uint64_t q, unsigned m) {
  if (q == 2 || !arith::is_prime(q)) throw InputError("padic_sqrt: q must be an odd prime");
  if (m < 1) throw InputError("padic_sqrt: precision must be >= 1");
  std::uint64_t b0 = arith::mod(beta, q);
  if (b0 == 0) throw HypothesisError("padic_sqrt: beta is not a unit at " + std::to_string(q));
  if (arith::legendre(static_cast<std::int64_t>(b0), q) != 1)
    throw HypothesisError("padic_sqrt: beta is not a square mod " + std::to_string(q));
  std::uint64_t r = arith::sqrt_mod(b0, q);
  r = std::min(r, q - r);
  // Newton iteration doubles the precision: s <- s - (s^2 - beta) / (2 s).
  Integer s(static_cast<unsigned long>(r));
  unsigned have = 1;
  while (have < m) {
    have = std::min(2 * have, m);
    Integer mod = arith::ipow(q, have);
    Integer inv;
    Integer two_s = (2 * s) % mod;
    mpz_invert(inv.get_mpz_t(), two_s.get_mpz_t(), mod.get_mpz_t());
    s = (s - (s * s - beta) * inv) % mod;
    if (s < 0) s += mod;
  }
  return s;
}

inline PadicMatrix2 local_embedding_theta(std::uint64_t q, const QuadraticData& data, unsigned m = 10) {
  return make_matrix(q, m, data.theta_trace, -data.theta_norm, 1, 0);
}

/// i_q(theta bar) = trd(theta) - i_q(theta).
inline PadicMatrix2 local_embedding_theta_bar(std::uint64_t q, const QuadraticData& data, unsigned m = 10) {
  auto t = local_embedding_theta(q, data, m);
  return make_matrix(q, m, data.theta_trace - t(0, 0), -t(0, 1), -t(1, 0), data.theta_trace - t(1, 1));
}

struct RelationCheck {
  std::string name;
  bool ok = false;
};

struct JEmbedding {
  PadicMatrix2 J;
  Integer sqrt_beta;
  std::vector<RelationCheck> checks;
};

/// i_q(J) = sqrt(beta) [[-1, trd(theta)], [0, 1]], with J^2 = beta and J theta = theta-bar J checked mod q^m.
inline JEmbedding local_embedding_J(std::uint64_t q, const QuadraticData& data, const Integer& beta, unsigned m = 10,
                                    bool other_branch = false) {
  JEmbedding out;
  out.sqrt_beta = padic_sqrt(beta, q, m);
  if (other_branch) out.sqrt_beta = (arith::ipow(q, m) - out.sqrt_beta) % arith::ipow(q, m);
  const Integer& s = out.sqrt_beta;
  out.J = make_matrix(q, m, -s, s * data.theta_trace, 0, s);
  auto J2 = out.J * out.J;
  out.checks.push_back({"J^2 = beta Id", J2 == scalar_matrix(q, m, beta)});
  out.checks.push_back({"det J = -beta", out.J.det() == out.J.reduce(-beta)});
  auto lhs = out.J * local_embedding_theta(q, data, m);
  auto rhs = local_embedding_theta_bar(q, data, m) * out.J;
  out.checks.push_back({"J theta = theta-bar J", lhs == rhs});
  return out;
}

enum class GrossCase { away, split_Nplus, p_split, p_inert };

inline GrossCase parse_gross_case(const std::string& s) {
  if (s == "away") return GrossCase::away;
  if (s == "split_Nplus") return GrossCase::split_Nplus;
  if (s == "p_split") return GrossCase::p_split;
  if (s == "p_inert") return GrossCase::p_inert;
  throw InputError("unknown Gross point case '" + s + "'");
}

inline std::string to_string(GrossCase c) {
  switch (c) {
    case GrossCase::away: return "away";
    case GrossCase::split_Nplus: return "split_Nplus";
    case GrossCase::p_split: return "p_split";
    case GrossCase::p_inert: return "p_inert";
  }
  return "?";
}

/// Where q sits relative to p, N^+ and K; used to reject inconsistent case requests.
struct GrossContext {
  std::uint64_t p = 0;
  std::uint64_t n_plus = 1;
};

/// Root of x^2 - trd x + nrd mod q^m giving the image of theta (needs q split in K, q odd).
inline Integer theta_root(std::uint64_t q, const QuadraticData& data, unsigned m) {
  // theta = (trd - sqrt(-D)) / 2 in both parity cases
  Integer mod = arith::ipow(q, m);
  Integer s = padic_sqrt(Integer(static_cast<long>(-data.D)), q, m);
  Integer inv2 = (mod + 1) / 2;
  Integer r = ((data.theta_trace - s) * inv2) % mod;
  if (r < 0) r += mod;
  return r;
}

struct GrossComponent {
  GrossCase kind;
  PadicMatrix2 matrix;
  std::vector<RelationCheck> checks;
};

inline GrossComponent gross_point_component(std::uint64_t q, GrossCase kind, const QuadraticData& data, const GrossContext& ctx,
                                            unsigned m = 10) {
  if (!arith::is_prime(q)) throw InputError("gross_point_component: q must be prime");
  int chi = arith::kronecker(-data.D, q);
  bool q_is_p = (q == ctx.p);
  bool q_divides_nplus = ctx.n_plus % q == 0;
  GrossComponent out{kind, {}, {}};
  switch (kind) {
    case GrossCase::away:
      if (q_is_p || q_divides_nplus) throw InputError("gross_point_component: q divides p N^+, not an away prime");
      out.matrix = make_matrix(q, m, 1, 0, 0, 1);
      break;
    case GrossCase::split_Nplus: {
      if (q_is_p || !q_divides_nplus) throw InputError("gross_point_component: split_Nplus needs q | N^+, q != p");
      if (chi != 1) throw InputError("gross_point_component: q does not split in K");
      if (q == 2) throw InputError("gross_point_component: q = 2 is not supported");
      Integer r = theta_root(q, data, m);
      Integer rbar = data.theta_trace - r;
      out.matrix = make_matrix(q, m, r, rbar, 1, 1);
      out.matrix.inv_sqrt_scalar = data.D;
      // unscaled det = theta - theta-bar, whose square is -D; after the 1/sqrt(D) scalar, det^2 = -1/D.
      Integer det = out.matrix.det();
      out.checks.push_back({"(theta - theta-bar)^2 = -D", out.matrix.reduce(det * det) == out.matrix.reduce(-data.D)});
      out.checks.push_back({"det varsigma_q is a unit at q", arith::mod(det, q) != 0});
      break;
    }
    case GrossCase::p_split: {
      if (!q_is_p) throw InputError("gross_point_component: p_split needs q = p");
      if (chi != 1) throw InputError("gross_point_component: p does not split in K");
      Integer r = theta_root(q, data, m);
      out.matrix = make_matrix(q, m, r, -1, 1, 0);
      Integer minpoly = r * r - data.theta_trace * r + data.theta_norm;
      out.checks.push_back({"theta-image is a root of x^2 - trd x + nrd", out.matrix.reduce(minpoly) == 0});
      out.checks.push_back({"det = 1", out.matrix.det() == 1});
      break;
    }
    case GrossCase::p_inert:
      if (!q_is_p) throw InputError("gross_point_component: p_inert needs q = p");
      if (chi != -1) throw InputError("gross_point_component: p is not inert in K");
      out.matrix = make_matrix(q, m, 0, 1, -1, 0);
      out.checks.push_back({"det = 1", out.matrix.det() == 1});
      break;
  }
  return out;
}

/// Residue conditions on beta that can be checked locally: a unit square at q | p N^+, a unit at q | D.
inline std::vector<RelationCheck> check_beta_conditions(const Integer& beta, std::uint64_t p, std::uint64_t n_plus, std::int64_t D) {
  std::vector<RelationCheck> out;
  out.push_back({"beta < 0", beta < 0});
  auto primes = arith::prime_divisors(p * n_plus);
  for (auto q : primes) {
    if (q == 2) continue;
    std::uint64_t b = arith::mod(beta, q);
    out.push_back({"beta is a unit square at " + std::to_string(q), b != 0 && arith::legendre(static_cast<std::int64_t>(b), q) == 1});
  }
  for (auto q : arith::prime_divisors(static_cast<std::uint64_t>(D)))
    out.push_back({"beta is a unit at " + std::to_string(q), arith::mod(beta, q) != 0});
  return out;
}

/// Cayley-Hamilton for i_q(theta) over Z: M^2 - trd M + nrd = 0 exactly, with trace trd and det nrd.
inline bool char_poly_matches(const QuadraticData& data) {
  const Integer& t = data.theta_trace;
  const Integer& n = data.theta_norm;
  std::array<Integer, 4> M = {t, -n, 1, 0};
  std::array<Integer, 4> M2 = {M[0] * M[0] + M[1] * M[2], M[0] * M[1] + M[1] * M[3], M[2] * M[0] + M[3] * M[2], M[2] * M[1] + M[3] * M[3]};
  bool ch = M2[0] - t * M[0] + n == 0 && M2[1] - t * M[1] == 0 && M2[2] - t * M[2] == 0 && M2[3] - t * M[3] + n == 0;
  return ch && M[0] + M[3] == t && M[0] * M[3] - M[1] * M[2] == n;
}

}  // namespace kurihara
