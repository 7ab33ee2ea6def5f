#pragma once

// Kurihara numbers delta~_n = sum_{a in (Z/n)^x} [a/n]^+ prod_{l | n} log_{eta_l}(a)  (mod I_n)
// and their vanishing-order / divisibility statistics.

#include <atomic>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "kurihara/modsym.hpp"
#include "kurihara/sieves.hpp"

namespace kurihara {

/// log_eta(a) mod (l - 1) for every a in [1, l), built by one walk around the cycle.
class DiscreteLogTable {
 public:
  DiscreteLogTable(std::uint64_t l, std::uint64_t eta) : l_(l), eta_(eta) {
    if (!arith::is_prime(l)) throw InputError("discrete_log_table: " + std::to_string(l) + " is not prime");
    if (l >= 1000000) throw InputError("discrete_log_table: l must be below 10^6");
    if (!arith::is_primitive_root(eta % l, l))
      throw InputError("discrete_log_table: " + std::to_string(eta) + " is not a primitive root mod " + std::to_string(l));
    log_.assign(l, 0);
    std::uint64_t x = 1;
    for (std::uint64_t e = 0; e + 1 < l; ++e) {
      log_[x] = static_cast<std::uint32_t>(e);
      x = x * (eta % l) % l;
    }
  }

  std::uint64_t prime() const { return l_; }
  std::uint64_t eta() const { return eta_; }
  std::uint32_t log(std::uint64_t a) const {
    a %= l_;
    if (a == 0) throw InputError("discrete log of 0");
    return log_[a];
  }

 private:
  std::uint64_t l_, eta_;
  std::vector<std::uint32_t> log_;
};

inline DiscreteLogTable discrete_log_table(std::uint64_t l, std::uint64_t eta) { return DiscreteLogTable(l, eta); }

struct KuriharaNumber {
  SquarefreeIndex index;
  Integer residue;       // canonical representative in [0, p^{t_n}); for n = 1 the class of [0]^+ mod p^cap
  int valuation = 0;     // in [0, t_n]; t_n means zero in Z_p / I_n (saturated)
  bool saturated = false;
  bool is_zero = false;  // delta~_n = 0 in its ambient ring (for n = 1: [0]^+ = 0 exactly)
  std::map<std::uint64_t, std::uint64_t> eta_choices;
  std::optional<Rational> exact_value;  // n = 1 only: [0]^+
};

using EtaOverrides = std::map<std::uint64_t, std::uint64_t>;

namespace detail {

/// phi_0({a/n, oo}) via the dense table when available (hot loop of the Kurihara sums).
inline std::int64_t fast_symbol(const EigenSymbol& sym, std::int64_t a, std::int64_t b) {
  if (sym.table.empty()) return eval_primitive(sym, a, b);
  const auto N = static_cast<std::int64_t>(sym.level);
  const std::int32_t* tab = sym.table.data();
  std::int64_t qm1 = 0, qm2 = 1;
  std::int64_t x = a, y = b, total = 0;
  std::int64_t sign = 1;  // det_k = p_k q_{k-1} - p_{k-1} q_k = (-1)^(k+1)
  while (y != 0) {
    std::int64_t qt = x / y, r = x - qt * y;
    if (r < 0) {
      r += y;
      --qt;
    }
    std::int64_t qk = qt * qm1 + qm2;
    sign = -sign;
    std::int64_t c = (sign * qk) % N;
    if (c < 0) c += N;
    total += tab[c * N + qm1 % N];
    qm2 = qm1;
    qm1 = qk;
    x = y;
    y = r;
  }
  return -total;
}

}  // namespace detail

/// delta~_n for one index. eta defaults to the smallest primitive root of each l | n.
inline KuriharaNumber kurihara_number(const EigenSymbol& sym, const SquarefreeIndex& idx, std::uint64_t p,
                                      const EtaOverrides& eta = {}, int cap = kDefaultValuationCap) {
  if (!sym.period_scale) throw InputError("kurihara_number: uncalibrated eigensymbol");
  require_p_integral(sym, p);
  KuriharaNumber out;
  out.index = idx;
  if (idx.n == 1) {
    Rational v = eval_plus(sym, 0, 1);
    out.exact_value = v;
    out.is_zero = (v == 0);
    out.valuation = out.is_zero ? cap : std::min(cap, arith::valuation(v, p));
    out.saturated = out.is_zero;
    out.residue = arith::reduce_mod(v, arith::ipow(p, static_cast<unsigned>(cap)));
    return out;
  }
  for (auto& f : idx.factors)
    if (f.family != Family::cyc) throw InputError("kurihara_number: only cyc indices carry Kurihara numbers");
  if (idx.t.is_infinite()) throw InvariantError("kurihara_number: n > 1 with infinite t_n");
  int t = idx.t.value();
  if (t == 0) throw ResolutionError("kurihara_number: t_n = 0 for n = " + std::to_string(idx.n) + "; increase k");
  Integer Mz = arith::ipow(p, static_cast<unsigned>(t));
  if (Mz >= Integer(1) << 62) throw InputError("kurihara_number: p^t_n too large");
  const std::uint64_t M = Mz.get_ui();

  std::vector<DiscreteLogTable> logs;
  for (auto& f : idx.factors) {
    auto it = eta.find(f.q);
    std::uint64_t e = it != eta.end() ? it->second : arith::smallest_primitive_root(f.q);
    logs.emplace_back(f.q, e);
    out.eta_choices[f.q] = e;
    if ((f.q - 1) % M != 0) throw InvariantError("kurihara_number: p^t_n does not divide l - 1");
  }
  const std::size_t r = logs.size();
  const auto n = static_cast<std::int64_t>(idx.n);
  std::vector<std::uint64_t> res(r, 0), ell(r);
  std::vector<std::vector<std::uint64_t>> lg(r);  // log mod M, and log of the negative
  std::vector<std::vector<std::uint64_t>> lgneg(r);
  for (std::size_t j = 0; j < r; ++j) {
    ell[j] = logs[j].prime();
    lg[j].assign(ell[j], 0);
    lgneg[j].assign(ell[j], 0);
    for (std::uint64_t a = 1; a < ell[j]; ++a) {
      lg[j][a] = logs[j].log(a) % M;
      lgneg[j][a] = logs[j].log(ell[j] - a) % M;
    }
  }
  // [a/n]^+ = [-a/n]^+, so pair a with n - a.
  unsigned __int128 acc = 0;
  for (std::int64_t a = 1; 2 * a < n; ++a) {
    bool unit = true;
    std::uint64_t prod = 1, prodneg = 1;
    for (std::size_t j = 0; j < r; ++j) {
      if (++res[j] == ell[j]) res[j] = 0;
      if (res[j] == 0) unit = false;
    }
    if (!unit) continue;
    for (std::size_t j = 0; j < r; ++j) {
      prod = prod * lg[j][res[j]] % M;
      prodneg = prodneg * lgneg[j][res[j]] % M;
    }
    std::uint64_t w = (prod + prodneg) % M;
    if (w == 0) continue;
    std::int64_t phi = detail::fast_symbol(sym, a, n);
    if (phi == 0) continue;
    std::uint64_t ph = static_cast<std::uint64_t>(arith::mod(phi, static_cast<std::int64_t>(M)));
    acc = (acc + static_cast<unsigned __int128>(ph) * w) % M;
  }
  Integer S(static_cast<unsigned long>(static_cast<std::uint64_t>(acc)));
  Integer scaled = arith::reduce_mod(*sym.period_scale * Rational(S), Mz);
  out.residue = scaled;
  out.is_zero = (scaled == 0);
  out.saturated = out.is_zero;
  out.valuation = out.is_zero ? t : arith::valuation(scaled, p, t);
  return out;
}

/// Kurihara numbers for a batch of indices, parallel over n, results in input order.
inline std::vector<KuriharaNumber> kurihara_numbers(const EigenSymbol& sym, const std::vector<SquarefreeIndex>& indices,
                                                    std::uint64_t p, const EtaOverrides& eta = {},
                                                    int cap = kDefaultValuationCap, unsigned threads = 0) {
  std::vector<KuriharaNumber> out(indices.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= indices.size()) return;
      try {
        out[i] = kurihara_number(sym, indices[i], p, eta, cap);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

// ---------------------------------------------------------------------------
// Statistics

struct Stratum {
  int nu = 0;
  std::size_t count = 0;
  std::size_t nonzero = 0;
  std::optional<int> value;            // min valuation over nonzero members (upper bound for the true partial)
  std::optional<int> saturation_floor;  // min t_n over members that vanish in their quotient
  bool exact = false;                  // nu = 0: the stratum is {1} and the value is exact
  std::string bound_kind() const { return exact ? "exact_on_region" : "upper_bound_semantics"; }
};

struct DeltaStats {
  std::optional<int> ord;        // smallest nu with a nonzero member
  bool ord_certified = false;    // every smaller stratum is nonempty and vanishes identically
  std::map<int, Stratum> strata;
  std::optional<int> partial_infty;
  std::string region;
  std::vector<std::string> warnings;

  std::optional<int> partial(int i) const {
    auto it = strata.find(i);
    if (it == strata.end()) return std::nullopt;
    return it->second.value;
  }
};

/// ord, partial^(i), partial^(oo) from a collection covering `region`.
/// A member that is zero in Z_p / I_n lies in every p^j Z_p / I_n, so it does not constrain partial^(i).
inline DeltaStats delta_stats(const std::vector<KuriharaNumber>& collection, const std::string& region, int max_nu) {
  DeltaStats st;
  st.region = region;
  for (int i = 0; i <= max_nu; ++i) st.strata[i].nu = i;
  for (auto& kn : collection) {
    int nu = kn.index.nu();
    if (nu > max_nu) continue;
    auto& s = st.strata[nu];
    s.exact = (nu == 0);
    ++s.count;
    if (kn.is_zero) {
      int floor = kn.index.t.is_infinite() ? kn.valuation : kn.index.t.value();
      s.saturation_floor = s.saturation_floor ? std::min(*s.saturation_floor, floor) : floor;
    } else {
      ++s.nonzero;
      s.value = s.value ? std::min(*s.value, kn.valuation) : kn.valuation;
    }
  }
  for (auto it = st.strata.begin(); it != st.strata.end();) {
    if (it->second.count == 0) {
      st.warnings.push_back("stratum nu=" + std::to_string(it->first) + " is empty on the region");
      it = st.strata.erase(it);
    } else {
      ++it;
    }
  }
  bool gap = false;
  for (int i = 0; i <= max_nu; ++i) {
    auto it = st.strata.find(i);
    if (it == st.strata.end()) {
      gap = true;
      continue;
    }
    if (it->second.nonzero > 0) {
      st.ord = i;
      st.ord_certified = !gap;
      break;
    }
  }
  for (auto& [i, s] : st.strata)
    if (s.value) st.partial_infty = st.partial_infty ? std::min(*st.partial_infty, *s.value) : *s.value;
  if (!st.ord) st.warnings.push_back("every Kurihara number vanishes on the region: ord is inconclusive");
  // Monotonicity within a parity class is expected; report violations rather than hide them.
  for (auto& [i, s] : st.strata) {
    auto next = st.strata.find(i + 2);
    if (next != st.strata.end() && s.value && next->second.value && *next->second.value > *s.value && st.ord && i >= *st.ord)
      st.warnings.push_back("partial^(" + std::to_string(i + 2) + ") > partial^(" + std::to_string(i) + ")");
  }
  return st;
}

/// Statistics that a curve with Selmer group (Q_p/Z_p)^corank + sum (Z/p^{d_i})^2 would produce,
/// with partial^(oo) = base. Strata below the corank vanish identically.
inline DeltaStats synthetic_stats(int corank, const std::vector<int>& exponents, int base = 0) {
  DeltaStats st;
  st.region = "synthetic";
  std::vector<int> pairs;
  for (int d : exponents) {
    pairs.push_back(d);
    pairs.push_back(d);
  }
  std::sort(pairs.begin(), pairs.end(), std::greater<>());
  int total = base;
  for (int d : pairs) total += d;
  for (int i = 0; i < corank; ++i) {
    Stratum s;
    s.nu = i;
    s.count = 1;
    s.exact = (i == 0);
    s.saturation_floor = kDefaultValuationCap;
    st.strata[i] = s;
  }
  int value = total;
  for (std::size_t j = 0; j <= pairs.size() + 1; ++j) {
    Stratum s;
    s.nu = corank + static_cast<int>(j);
    s.count = 1;
    s.nonzero = 1;
    s.exact = (s.nu == 0);
    s.value = value;
    st.strata[s.nu] = s;
    if (j < pairs.size()) value -= pairs[j];
  }
  st.ord = corank;
  st.ord_certified = true;
  st.partial_infty = base;
  return st;
}

}  // namespace kurihara
