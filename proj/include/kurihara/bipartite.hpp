#pragma once

// Statistics-level algebra of bipartite Euler systems over R = Z/p^k:
// the partial-profile of lambda, its inversion and k -> oo limit, and a
// bookkeeping simulator for Selmer modules along admissible primes.

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "kurihara/selmer_predict.hpp"

namespace kurihara {

struct ArtinianContext {
  std::uint64_t p = 5;
  int k = 1;  // length of R = Z/p^k
  void validate() const {
    if (k < 1) throw InputError("ArtinianContext: k must be >= 1");
  }
};

using Profile = std::map<int, int>;  // even r -> partial^(r)

inline void require_shape(const std::vector<int>& d) {
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] <= 0) throw InputError("shape exponents must be positive");
    if (i > 0 && d[i] > d[i - 1]) throw InputError("shape exponents must be non-increasing");
  }
}

/// partial^(r)(lambda) = min{k, delta + sum_{i >= r/2 + 1} d_i} for r = 0, 2, ..., 2 len(d) + 2.
inline Profile lambda_profile(const std::vector<int>& d, int delta, const ArtinianContext& ctx) {
  ctx.validate();
  require_shape(d);
  if (delta < 0) throw InputError("lambda_profile: delta must be >= 0");
  Profile out;
  long tail = std::accumulate(d.begin(), d.end(), 0L);
  for (std::size_t j = 0; j <= d.size() + 1; ++j) {
    out[2 * static_cast<int>(j)] = static_cast<int>(std::min<long>(ctx.k, delta + tail));
    if (j < d.size()) tail -= d[j];
  }
  return out;
}

struct RecoveredShape {
  std::vector<int> exponents;
  int delta = 0;
};

/// d_i = partial^(2(i-1)) - partial^(2i); delta is the terminal value.
inline RecoveredShape recover_shape(const Profile& profile, const ArtinianContext& ctx) {
  ctx.validate();
  if (profile.empty()) throw InputError("recover_shape: empty profile");
  int expected = 0;
  for (auto& [r, v] : profile) {
    if (r != expected) throw InputError("recover_shape: profile must list r = 0, 2, 4, ... without gaps");
    expected += 2;
    if (v < 0) throw InputError("recover_shape: negative partial");
    if (v >= ctx.k)
      throw InputError("recover_shape: k too small (partial^(" + std::to_string(r) + ") = " + std::to_string(v) +
                       " is saturated at k = " + std::to_string(ctx.k) + "; need k >= " + std::to_string(ctx.k + 1) +
                       ", and k > delta + sum d_i in general)");
  }
  RecoveredShape out;
  auto it = profile.begin();
  int prev = it->second;
  for (++it; it != profile.end(); ++it) {
    int diff = prev - it->second;
    if (diff < 0) throw InputError("recover_shape: profile increases at r = " + std::to_string(it->first));
    if (diff > 0) {
      if (!out.exponents.empty() && diff > out.exponents.back())
        throw InputError("recover_shape: differences increase at r = " + std::to_string(it->first));
      if (out.exponents.size() * 2 + 2 != static_cast<std::size_t>(it->first))
        throw InputError("recover_shape: a zero difference is followed by a positive one");
      out.exponents.push_back(diff);
    }
    prev = it->second;
  }
  if (profile.size() < 2 || std::prev(profile.end())->second != std::prev(profile.end(), 2)->second)
    throw InputError("recover_shape: profile does not reach its terminal value");
  out.delta = prev;
  return out;
}

struct LimitResult {
  Profile profile;
  bool stabilized = true;
  std::vector<int> unstable;  // r with values still saturated at the largest k
};

/// partial^(r)(lambda) = lim_k partial^(r)(lambda^(k)), with consistency and monotonicity checks.
inline LimitResult limit_profile(const std::map<int, Profile>& profiles) {
  if (profiles.empty()) throw InputError("limit_profile: no profiles");
  for (auto it = profiles.begin(); it != profiles.end(); ++it) {
    if (it->first < 1) throw InputError("limit_profile: k must be >= 1");
    for (auto jt = std::next(it); jt != profiles.end(); ++jt) {
      for (auto& [r, v] : jt->second) {
        auto f = it->second.find(r);
        if (f == it->second.end()) continue;
        if (f->second > v) throw InputError("limit_profile: partial^(" + std::to_string(r) + ") decreases in k");
        if (f->second != std::min(it->first, v))
          throw InputError("limit_profile: profiles at k = " + std::to_string(it->first) + " and " + std::to_string(jt->first) +
                           " are not compatible under reduction");
      }
    }
  }
  LimitResult out;
  auto& [kmax, top] = *profiles.rbegin();
  out.profile = top;
  for (auto& [r, v] : top)
    if (v >= kmax) {
      out.stabilized = false;
      out.unstable.push_back(r);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic Selmer walk

/// Sel_F(n) = R^e + M_n + M_n with M_n = sum R/m^{d_i}; lengths, parities and indices only.
struct SyntheticSelmerState {
  std::vector<std::uint64_t> n;  // synthetic primes, in the order added
  int e = 0;                     // 0: n definite, 1: n indefinite
  int rho = 0;                   // dim over R/m of the mod-m Selmer group
  std::vector<int> m_exponents;  // canonical representative of M_n, non-increasing
  int m_length = 0;
  int stub_exponent = 0;         // Stub_n = m^{stub_exponent} * (cyclic target)

  void refresh(int k) {
    std::erase_if(m_exponents, [](int d) { return d == 0; });
    std::sort(m_exponents.begin(), m_exponents.end(), std::greater<>());
    m_length = std::accumulate(m_exponents.begin(), m_exponents.end(), 0);
    stub_exponent = std::min(m_length, k);
  }
  bool definite() const { return e == 0; }
};

inline SyntheticSelmerState initial_state(const std::vector<int>& shape, const ArtinianContext& ctx) {
  ctx.validate();
  require_shape(shape);
  for (int d : shape)
    if (d > ctx.k) throw ConstraintError("initial_state: exponent " + std::to_string(d) + " exceeds k");
  SyntheticSelmerState s;
  s.e = 0;
  s.m_exponents = shape;
  s.refresh(ctx.k);
  s.rho = 2 * static_cast<int>(s.m_exponents.size());
  return s;
}

struct StepRecord {
  int a = 0, b = 0;
  SyntheticSelmerState before, after;
};

/// Add one admissible prime l with loc_l image of length a (b = k - a).
inline SyntheticSelmerState simulate_prime_step(const SyntheticSelmerState& s, int a, const ArtinianContext& ctx,
                                                std::uint64_t ell = 0) {
  ctx.validate();
  if (a < 0 || a > ctx.k) throw ConstraintError("simulate_prime_step: need 0 <= a <= k");
  const int b = ctx.k - a;
  SyntheticSelmerState t = s;
  t.n.push_back(ell ? ell : s.n.size() + 1);
  t.e = 1 - s.e;
  if (s.definite()) {
    // Sel_F(n) = M + M; the image is cut from the largest cyclic factor: length(M_nl) = length(M_n) - a.
    int d1 = s.m_exponents.empty() ? 0 : s.m_exponents.front();
    if (a > d1)
      throw ConstraintError("simulate_prime_step: localization length a = " + std::to_string(a) + " exceeds the largest factor " +
                            std::to_string(d1) + " of M_n");
    if (!t.m_exponents.empty()) t.m_exponents.front() -= a;
    bool killed = a > 0 && a == d1;  // mod-m localization nonzero iff the factor maps injectively
    t.rho = s.rho + (killed ? -1 : 1);
  } else {
    // Sel_F(n) = R + M + M; the image comes from the free part: length(M_nl) = length(M_n) + b.
    if (b > 0) t.m_exponents.push_back(b);
    t.rho = s.rho + (a == ctx.k ? -1 : 1);
  }
  t.refresh(ctx.k);
  if (t.m_length < 0) throw ConstraintError("simulate_prime_step: negative length");
  int expected_len = s.definite() ? s.m_length - a : s.m_length + b;
  if (t.m_length != expected_len) throw InvariantError("simulate_prime_step: length relation broken");
  return t;
}

/// Index of lambda_n (definite) or kappa_n (indefinite) in a system with rigidity constant delta.
inline int synthetic_index(const SyntheticSelmerState& s, int delta, const ArtinianContext& ctx) {
  return std::min(ctx.k, delta + s.m_length);
}

struct WalkCheck {
  std::size_t steps = 0;
  std::size_t failures = 0;
  int min_def_index = 0, min_ind_index = 0;
  std::vector<std::string> messages;
};

/// Random feasible walk; asserts a + b = k, e = rho mod 2, m_length >= 0, stub membership,
/// the reciprocity index relations, and rigidity of delta.
inline WalkCheck synthetic_walk(const std::vector<int>& shape, int delta, std::size_t steps, const ArtinianContext& ctx,
                                std::uint64_t seed, std::vector<StepRecord>* log = nullptr) {
  if (delta < 0 || delta > ctx.k) throw InputError("synthetic_walk: need 0 <= delta <= k");
  std::mt19937_64 rng(seed);
  auto state = initial_state(shape, ctx);
  WalkCheck wc;
  wc.min_def_index = ctx.k + 1;
  wc.min_ind_index = ctx.k + 1;
  auto fail = [&](const std::string& m) {
    ++wc.failures;
    if (wc.messages.size() < 20) wc.messages.push_back(m);
  };
  auto record_index = [&](const SyntheticSelmerState& s) {
    int idx = synthetic_index(s, delta, ctx);
    if (idx < s.stub_exponent) fail("index below stub exponent");
    if (s.definite()) wc.min_def_index = std::min(wc.min_def_index, idx);
    else wc.min_ind_index = std::min(wc.min_ind_index, idx);
  };
  record_index(state);
  // Two forced steps first: kill M completely, so both parities meet an empty M_n (rigidity witnesses).
  std::vector<int> forced;
  {
    auto probe = state;
    while (!probe.m_exponents.empty() || !probe.definite()) {
      int a = probe.definite() ? (probe.m_exponents.empty() ? 0 : probe.m_exponents.front()) : ctx.k;
      forced.push_back(a);
      probe = simulate_prime_step(probe, a, ctx);
    }
    forced.push_back(0);  // definite with M = 0 -> indefinite with M = 0
  }
  for (std::size_t i = 0; i < steps; ++i) {
    int a;
    if (i < forced.size()) {
      a = forced[i];
    } else if (state.definite()) {
      int d1 = state.m_exponents.empty() ? 0 : state.m_exponents.front();
      a = std::uniform_int_distribution<int>(0, d1)(rng);
    } else {
      // bias towards a = k so M does not grow without bound
      a = (rng() % 2 == 0) ? ctx.k : std::uniform_int_distribution<int>(0, ctx.k)(rng);
    }
    auto next = simulate_prime_step(state, a, ctx);
    int b = ctx.k - a;
    ++wc.steps;
    if (a + b != ctx.k) fail("a + b != k");
    if ((next.e - next.rho) % 2 != 0) fail("e != rho mod 2");
    if (next.m_length < 0) fail("negative m_length");
    if (next.stub_exponent < 0 || next.stub_exponent > ctx.k) fail("stub exponent out of range");
    // Explicit reciprocity as index bookkeeping.
    int ind_n = synthetic_index(state, delta, ctx), ind_nl = synthetic_index(next, delta, ctx);
    if (state.definite()) {
      if (ind_n != std::min(ctx.k, ind_nl + a)) fail("first reciprocity law: ind(lambda_n) != ind(kappa_nl) + a");
    } else {
      if (ind_nl != std::min(ctx.k, ind_n + b)) fail("second reciprocity law: ind(lambda_nl) != ind(kappa_n) + b");
    }
    if (log) log->push_back({a, b, state, next});
    state = std::move(next);
    record_index(state);
  }
  if (steps >= forced.size()) {
    if (wc.min_def_index != delta || wc.min_ind_index != delta)
      fail("rigidity: min def index " + std::to_string(wc.min_def_index) + ", min ind index " + std::to_string(wc.min_ind_index) +
           ", delta " + std::to_string(delta));
  }
  return wc;
}

}  // namespace kurihara
