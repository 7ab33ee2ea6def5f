#pragma once

// Kolyvagin-type prime families and the ideals I_n = sum_{q | n} I_q.

#include <algorithm>
#include <future>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kurihara/curves.hpp"

namespace kurihara {

enum class Family { cyc, ac, adm };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::cyc: return "cyc";
    case Family::ac: return "ac";
    case Family::adm: return "adm";
  }
  return "?";
}

inline Family parse_family(const std::string& s) {
  if (s == "cyc") return Family::cyc;
  if (s == "ac") return Family::ac;
  if (s == "adm") return Family::adm;
  throw InputError("unknown prime family '" + s + "'");
}

constexpr int kDefaultValuationCap = 12;

struct KolyvaginPrime {
  std::uint64_t q = 0;
  Family family = Family::cyc;
  int v1 = 0;           // v_p(q - 1) (cyc) or v_p(q + 1) (ac); 0 for adm
  int v2 = 0;           // v_p(a_q - q - 1), v_p(a_q) or v_p(a_q - eps (q + 1)); == cap means ">= cap"
  int epsilon = 0;      // +-1 for adm, 0 otherwise
  bool ambiguous = false;  // both signs satisfy the adm congruence (cannot happen when q != +-1 mod p)
  std::int64_t a_q = 0;

  /// Exponent t_q with I_q = p^{t_q} Z_p.
  int exponent() const { return family == Family::adm ? v2 : std::min(v1, v2); }
  bool operator==(const KolyvaginPrime&) const = default;
};

struct SieveContext {
  std::optional<std::int64_t> D_K;  // needed for ac / adm
};

/// Classify a single prime q; returns nothing if q is not in the family at level k.
inline std::optional<KolyvaginPrime> classify_prime(Family family, const EllipticCurve& E, const SieveContext& ctx,
                                                    std::uint64_t p, int k, std::uint64_t q,
                                                    int cap = kDefaultValuationCap) {
  if (q == p || E.conductor() % q == 0) return std::nullopt;
  if (family != Family::cyc) {
    if (!ctx.D_K) throw InputError("sieve: the " + to_string(family) + " family needs D_K");
    if (arith::kronecker(*ctx.D_K, q) != -1) return std::nullopt;
  }
  KolyvaginPrime kp;
  kp.q = q;
  kp.family = family;
  auto Q = static_cast<long>(q);
  switch (family) {
    case Family::cyc: {
      kp.v1 = arith::valuation(Integer(Q - 1), p, cap);
      if (kp.v1 < k) return std::nullopt;
      kp.a_q = trace_of_frobenius(E, q);
      kp.v2 = arith::valuation(Integer(static_cast<long>(kp.a_q) - Q - 1), p, cap);
      if (kp.v2 < k) return std::nullopt;
      break;
    }
    case Family::ac: {
      kp.v1 = arith::valuation(Integer(Q + 1), p, cap);
      if (kp.v1 < k) return std::nullopt;
      kp.a_q = trace_of_frobenius(E, q);
      kp.v2 = arith::valuation(Integer(static_cast<long>(kp.a_q)), p, cap);
      if (kp.v2 < k) return std::nullopt;
      break;
    }
    case Family::adm: {
      if (q % p == 1 || q % p == p - 1) return std::nullopt;
      kp.a_q = trace_of_frobenius(E, q);
      int vp = arith::valuation(Integer(static_cast<long>(kp.a_q) - Q - 1), p, cap);
      int vm = arith::valuation(Integer(static_cast<long>(kp.a_q) + Q + 1), p, cap);
      kp.ambiguous = vp >= 1 && vm >= 1;
      kp.epsilon = vp >= vm ? 1 : -1;
      kp.v2 = std::max(vp, vm);
      if (kp.v2 < k) return std::nullopt;
      break;
    }
  }
  return kp;
}

/// All primes q <= bound in the family at level k, ascending. Parallel over prime ranges.
inline std::vector<KolyvaginPrime> sieve(Family family, const EllipticCurve& E, const SieveContext& ctx, std::uint64_t p,
                                         int k, std::uint64_t bound, int cap = kDefaultValuationCap) {
  if (p < 5 || !arith::is_prime(p)) throw InputError("sieve: p must be a prime >= 5");
  if (k < 1) throw InputError("sieve: k must be >= 1");
  if (bound < 2) throw InputError("sieve: bound must be >= 2");
  auto primes = arith::primes_up_to(bound);
  unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 8));
  std::vector<std::future<std::vector<KolyvaginPrime>>> parts;
  std::size_t chunk = (primes.size() + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = w * chunk, hi = std::min(primes.size(), lo + chunk);
    if (lo >= hi) break;
    parts.push_back(std::async(std::launch::async, [&, lo, hi] {
      std::vector<KolyvaginPrime> out;
      for (std::size_t i = lo; i < hi; ++i)
        if (auto kp = classify_prime(family, E, ctx, p, k, primes[i], cap)) out.push_back(*kp);
      return out;
    }));
  }
  std::vector<KolyvaginPrime> out;
  for (auto& f : parts) {
    auto v = f.get();
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

enum class ParityClass { none, def, ind };

inline std::string to_string(ParityClass c) {
  switch (c) {
    case ParityClass::none: return "none";
    case ParityClass::def: return "def";
    case ParityClass::ind: return "ind";
  }
  return "?";
}

struct SquarefreeIndex {
  std::uint64_t n = 1;
  std::vector<KolyvaginPrime> factors;  // ascending q
  Exponent t = Exponent::infinity();    // I_n = p^t Z_p; infinite for n = 1
  ParityClass parity = ParityClass::none;

  int nu() const { return static_cast<int>(factors.size()); }
};

/// All squarefree products n <= max_n with nu(n) <= max_nu of primes from one family.
/// For adm primes, nu_minus classifies n as def (nu(n N^-) odd) or ind (even).
inline std::vector<SquarefreeIndex> build_indices(const std::vector<KolyvaginPrime>& primes, int max_nu, std::uint64_t max_n,
                                                  std::optional<int> nu_minus = std::nullopt) {
  if (!primes.empty()) {
    for (auto& kp : primes)
      if (kp.family != primes.front().family) throw InputError("build_indices: primes from mixed families");
  }
  std::vector<KolyvaginPrime> sorted = primes;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.q < b.q; });
  bool adm = !sorted.empty() && sorted.front().family == Family::adm;
  if (adm && !nu_minus) throw InputError("build_indices: adm indices need nu(N^-)");
  std::vector<SquarefreeIndex> out;
  SquarefreeIndex cur;
  auto classify = [&](SquarefreeIndex& idx) {
    if (adm || nu_minus) {
      int total = idx.nu() + nu_minus.value_or(0);
      idx.parity = (total % 2 == 1) ? ParityClass::def : ParityClass::ind;
    }
  };
  // Depth-first enumeration over increasing prime indices.
  auto dfs = [&](auto&& self, std::size_t start) -> void {
    classify(cur);
    out.push_back(cur);
    if (cur.nu() >= max_nu) return;
    for (std::size_t i = start; i < sorted.size(); ++i) {
      const auto& kp = sorted[i];
      if (cur.n > max_n / kp.q) break;
      SquarefreeIndex saved = cur;
      cur.n *= kp.q;
      cur.factors.push_back(kp);
      cur.t = min(cur.t, Exponent(kp.exponent()));
      self(self, i + 1);
      cur = std::move(saved);
    }
  };
  dfs(dfs, 0);
  std::stable_sort(out.begin(), out.end(), [](const SquarefreeIndex& a, const SquarefreeIndex& b) {
    return a.nu() != b.nu() ? a.nu() < b.nu() : a.n < b.n;
  });
  return out;
}

}  // namespace kurihara
