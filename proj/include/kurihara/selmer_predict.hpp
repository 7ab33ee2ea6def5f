#pragma once

// From divisibility statistics to Selmer structure, and the structural
// Gross-Zagier / Waldspurger dictionaries between Kurihara numbers of E, E^K
// and the Heegner / bipartite systems over K.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "kurihara/numbers.hpp"

namespace kurihara {

/// (Q_p/Z_p)^corank + sum_i (Z/p^{d_i})^2 with d_1 >= d_2 >= ... > 0.
struct ModuleShape {
  int corank = 0;
  std::vector<int> exponents;

  int exponent_sum() const { return std::accumulate(exponents.begin(), exponents.end(), 0); }
  /// length of the finite part, counting both copies of each cyclic factor
  int length() const { return 2 * exponent_sum(); }
  void normalize() {
    std::erase_if(exponents, [](int d) { return d == 0; });
    std::sort(exponents.begin(), exponents.end(), std::greater<>());
  }
  void validate() const {
    if (corank < 0) throw InputError("ModuleShape: negative corank");
    for (std::size_t i = 0; i < exponents.size(); ++i) {
      if (exponents[i] <= 0) throw InputError("ModuleShape: exponents must be positive");
      if (i > 0 && exponents[i] > exponents[i - 1]) throw InputError("ModuleShape: exponents must be non-increasing");
    }
  }
  std::string str() const {
    std::string s = "(Q_p/Z_p)^" + std::to_string(corank);
    for (int d : exponents) s += " + (Z/p^" + std::to_string(d) + ")^2";
    return s;
  }
  bool operator==(const ModuleShape&) const = default;
};

/// An asserted identity between two integers, reported rather than assumed.
struct Identity {
  std::string name;
  long lhs = 0;
  long rhs = 0;
  bool ok = true;
};

inline Identity make_identity(std::string name, long lhs, long rhs) { return {std::move(name), lhs, rhs, lhs == rhs}; }

inline void require_identities(const std::vector<Identity>& ids) {
  for (auto& id : ids)
    if (!id.ok)
      throw InvariantError("identity failed: " + id.name + " (" + std::to_string(id.lhs) + " != " + std::to_string(id.rhs) + ")");
}

struct FittingEntry {
  int i = 0;
  std::optional<int> exponent;  // Fitt_i = p^exponent Z_p, or the zero ideal when empty
};

struct SelmerPrediction {
  ModuleShape shape;
  std::vector<FittingEntry> fitting;
  int length_div_quotient = 0;  // partial^(ord) - partial^(oo)
  std::string evidence = "certified_on_region";
  std::vector<Identity> identities;
};

namespace detail {
[[noreturn]] inline void diagnosis(const std::string& what) {
  throw InconclusiveError("predict_selmer: " + what + " (search region too small or hypothesis failure)");
}
}  // namespace detail

/// Selmer structure over Q from (ord, partial^(i), partial^(oo)).
inline SelmerPrediction predict_selmer_Q(const DeltaStats& stats) {
  if (!stats.ord) throw InconclusiveError("predict_selmer: ord is inconclusive on the region");
  if (!stats.ord_certified) throw InconclusiveError("predict_selmer: ord is not certified (a smaller stratum is empty)");
  if (!stats.partial_infty) throw InvariantError("predict_selmer: finite ord but no partial^(oo)");
  const int ord = *stats.ord;
  const int base = *stats.partial_infty;
  auto first = stats.partial(ord);
  if (!first) throw InvariantError("predict_selmer: stratum ord has no value");
  SelmerPrediction out;
  out.shape.corank = ord;
  int cur = *first;
  std::vector<int> values = {cur};
  for (int i = 1; cur != base; ++i) {
    auto next = stats.partial(ord + 2 * i);
    if (!next) detail::diagnosis("partial^(" + std::to_string(ord + 2 * i) + ") is missing before reaching partial^(oo)");
    int diff = cur - *next;
    if (diff <= 0) detail::diagnosis("partial^(i) is not strictly decreasing at i = " + std::to_string(ord + 2 * i));
    if (diff % 2 != 0) detail::diagnosis("odd difference at i = " + std::to_string(ord + 2 * i));
    if (!out.shape.exponents.empty() && diff / 2 > out.shape.exponents.back())
      detail::diagnosis("exponents increase at i = " + std::to_string(ord + 2 * i));
    out.shape.exponents.push_back(diff / 2);
    cur = *next;
    values.push_back(cur);
  }
  for (int i = 0; i < ord; ++i) out.fitting.push_back({i, std::nullopt});
  for (std::size_t j = 0; j < values.size(); ++j) out.fitting.push_back({ord + 2 * static_cast<int>(j), values[j] - base});
  out.length_div_quotient = *first - base;
  out.identities.push_back(make_identity("length(Sel_/div) = partial^(ord) - partial^(oo)", out.shape.length(), out.length_div_quotient));
  require_identities(out.identities);
  return out;
}

/// Sel(K) = Sel(Q, E) + Sel(Q, E^K) when E(K)[p] = 0.
inline ModuleShape combine_over_K(const ModuleShape& a, const ModuleShape& b) {
  ModuleShape out;
  out.corank = a.corank + b.corank;
  out.exponents = a.exponents;
  out.exponents.insert(out.exponents.end(), b.exponents.begin(), b.exponents.end());
  out.normalize();
  return out;
}

struct HeegnerProfile {
  int ord_kappa = 0;
  std::vector<int> normalized_partials;  // partial^(ord+j)(kappa) - partial^(oo)(kappa), j = 0, 1, ...
  int root_number_side = 1;              // +1: r^+ > r^- (E carries the larger corank)
  ModuleShape shape_E, shape_EK;
  std::vector<Identity> identities;
  std::optional<Identity> tamagawa_expectation;  // informational only
};

namespace detail {
/// P(0) = sum small + sum large; steps small_i at even offsets, large_i at odd offsets.
inline std::vector<int> interleave_profile(const std::vector<int>& small, const std::vector<int>& large) {
  std::size_t L = std::max(small.size(), large.size());
  int total = std::accumulate(small.begin(), small.end(), 0) + std::accumulate(large.begin(), large.end(), 0);
  std::vector<int> P = {total};
  for (std::size_t i = 0; i < L; ++i) {
    P.push_back(P.back() - (i < small.size() ? small[i] : 0));
    P.push_back(P.back() - (i < large.size() ? large[i] : 0));
  }
  return P;
}
}  // namespace detail

/// Heegner-point Kolyvagin system profile predicted from the shapes of E and E^K (nu(N^-) even).
inline HeegnerProfile heegner_profile_from_shapes(const ModuleShape& E, const ModuleShape& EK, int W) {
  if (W != 1 && W != -1) throw InputError("root number must be +-1");
  if (std::abs(E.corank - EK.corank) != 1)
    throw HypothesisError("Err term ambiguous: |ord(delta~_E) - ord(delta~_E^K)| = " + std::to_string(std::abs(E.corank - EK.corank)) +
                          " (the a_i^+- are undetermined unless the coranks differ by one)");
  HeegnerProfile hp;
  hp.shape_E = E;
  hp.shape_EK = EK;
  hp.ord_kappa = std::min(E.corank, EK.corank);
  int s = E.corank > EK.corank ? 1 : -1;
  int sign = W * ((hp.ord_kappa + 1) % 2 == 0 ? 1 : -1);
  if (sign != s)
    throw HypothesisError("root number W = " + std::to_string(W) + " is incompatible with ord(delta~_E) = " + std::to_string(E.corank) +
                          ", ord(delta~_E^K) = " + std::to_string(EK.corank));
  hp.root_number_side = s;
  const ModuleShape& large = s == 1 ? E : EK;
  const ModuleShape& small = s == 1 ? EK : E;
  hp.normalized_partials = detail::interleave_profile(small.exponents, large.exponents);
  const auto& P = hp.normalized_partials;
  auto& ids = hp.identities;
  ids.push_back(make_identity("2(partial^(ord)(kappa) - partial^(oo)(kappa)) = spread(E) + spread(E^K)", 2L * P.front(),
                              E.length() + EK.length()));
  ids.push_back(make_identity("ord(kappa) + 1 = max(ord delta~_E, ord delta~_E^K)", hp.ord_kappa + 1, std::max(E.corank, EK.corank)));
  ids.push_back(make_identity("ord(kappa) = min(ord delta~_E, ord delta~_E^K)", hp.ord_kappa, std::min(E.corank, EK.corank)));
  int parity_gap = hp.ord_kappa - small.corank;
  ids.push_back({"ord(kappa) - r^small is even and >= 0", parity_gap, 0, parity_gap >= 0 && parity_gap % 2 == 0});
  ids.push_back(make_identity("partial^(oo)(kappa) normalized to 0", P.back(), 0));
  for (std::size_t i = 1; 2 * i < P.size(); ++i) {
    long dl = i <= large.exponents.size() ? 2L * large.exponents[i - 1] : 0;
    long ds = i <= small.exponents.size() ? 2L * small.exponents[i - 1] : 0;
    ids.push_back(make_identity("large side difference " + std::to_string(i) + " = 2(P(2i-1) - P(2i))", dl, 2L * (P[2 * i - 1] - P[2 * i])));
    ids.push_back(make_identity("small side difference " + std::to_string(i) + " = 2(P(2i-2) - P(2i-1))", ds, 2L * (P[2 * i - 2] - P[2 * i - 1])));
  }
  for (std::size_t j = 1; j < P.size(); ++j)
    if (P[j] > P[j - 1]) ids.push_back({"normalized partials non-increasing", P[j], P[j - 1], false});
  require_identities(ids);
  return hp;
}

inline HeegnerProfile predict_heegner_profile(const DeltaStats& stats_E, const DeltaStats& stats_EK, int W) {
  auto pe = predict_selmer_Q(stats_E);
  auto pk = predict_selmer_Q(stats_EK);
  return heegner_profile_from_shapes(pe.shape, pk.shape, W);
}

/// Recover (shape_E, shape_EK) from a Heegner profile and the root number.
inline std::pair<ModuleShape, ModuleShape> invert_heegner_profile(int ord_kappa, const std::vector<int>& P, int W) {
  int s = W * ((ord_kappa + 1) % 2 == 0 ? 1 : -1);
  ModuleShape small, large;
  small.corank = ord_kappa;
  large.corank = ord_kappa + 1;
  for (std::size_t i = 1; 2 * i < P.size(); ++i) {
    small.exponents.push_back(P[2 * i - 2] - P[2 * i - 1]);
    large.exponents.push_back(P[2 * i - 1] - P[2 * i]);
  }
  small.normalize();
  large.normalize();
  return s == 1 ? std::make_pair(large, small) : std::make_pair(small, large);
}

/// Attach the (conjectural) Tamagawa expectation partial^(oo)(kappa) = sum v_p(c_q) as information only.
inline void attach_tamagawa_expectation(HeegnerProfile& hp, long observed_base, const std::map<std::uint64_t, std::uint64_t>& tamagawa,
                                        std::uint64_t p) {
  long expected = 0;
  for (auto [q, c] : tamagawa) expected += arith::valuation(static_cast<std::int64_t>(c), p);
  hp.tamagawa_expectation = make_identity("partial^(oo)(kappa) vs sum v_p(c_q) (expectation, not asserted)", observed_base, expected);
}

struct WaldspurgerProfile {
  int ord_lambda = 0;
  std::map<int, int> normalized_partials;  // even offset r -> partial^(ord+r)(lambda) - partial^(oo)(lambda)
  std::vector<int> steps;                  // successive differences, = merged exponents
  ModuleShape merged;
  std::vector<Identity> identities;
};

inline WaldspurgerProfile waldspurger_profile_from_shapes(const ModuleShape& E, const ModuleShape& EK) {
  WaldspurgerProfile wp;
  wp.ord_lambda = E.corank + EK.corank;
  if (wp.ord_lambda % 2 != 0)
    throw HypothesisError("ord(delta~_E) + ord(delta~_E^K) = " + std::to_string(wp.ord_lambda) +
                          " is odd; the definite side needs an even corank over K");
  wp.merged = combine_over_K(E, EK);
  wp.steps = wp.merged.exponents;
  int P = wp.merged.exponent_sum();
  wp.normalized_partials[0] = P;
  for (std::size_t i = 0; i < wp.steps.size(); ++i) {
    P -= wp.steps[i];
    wp.normalized_partials[2 * static_cast<int>(i + 1)] = P;
  }
  wp.identities.push_back(make_identity("2(partial^(ord)(lambda) - partial^(oo)(lambda)) = spread(E) + spread(E^K)",
                                        2L * wp.normalized_partials.at(0), E.length() + EK.length()));
  wp.identities.push_back(make_identity("length(Sel(K)_/div) = spread(E) + spread(E^K)", wp.merged.length(), E.length() + EK.length()));
  wp.identities.push_back(make_identity("ord(lambda) = corank Sel(K)", wp.ord_lambda, wp.merged.corank));
  wp.identities.push_back(make_identity("partial^(oo)(lambda) normalized to 0", wp.normalized_partials.rbegin()->second, 0));
  require_identities(wp.identities);
  return wp;
}

inline WaldspurgerProfile predict_waldspurger_profile(const DeltaStats& stats_E, const DeltaStats& stats_EK) {
  auto pe = predict_selmer_Q(stats_E);
  auto pk = predict_selmer_Q(stats_EK);
  return waldspurger_profile_from_shapes(pe.shape, pk.shape);
}

}  // namespace kurihara
