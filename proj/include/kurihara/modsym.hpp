#pragma once

// Weight-2 Manin symbols for Gamma_0(N), plus quotient, Hecke operators, and the
// rational eigensymbol of an elliptic curve evaluated by the continued-fraction trick.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kurihara/arith.hpp"
#include "kurihara/curves.hpp"

namespace kurihara {

/// P^1(Z/N): pairs (c:d) with gcd(c, d, N) = 1 modulo scaling by units.
class P1List {
 public:
  explicit P1List(std::uint64_t N) : N_(static_cast<std::int64_t>(N)) {
    if (N == 0) throw InputError("P1List: level must be positive");
    for (std::int64_t g = 1; g <= N_; ++g) {
      if (N_ % g != 0) continue;
      auto& units = units_[g];
      std::int64_t m = N_ / g;
      for (std::int64_t u = 1; u <= N_; ++u) {
        if (std::gcd(u % N_, N_) == 1 && (u - 1) % m == 0) units.push_back(u % N_);
      }
    }
    // Canonical representatives: (g : d) with g | N, d minimal in its orbit.
    for (std::int64_t g = 1; g <= N_; ++g) {
      if (N_ % g != 0) continue;
      std::int64_t c = g % N_;
      for (std::int64_t d = 0; d < N_; ++d) {
        if (std::gcd(std::gcd(c, d), N_) != 1) continue;
        auto rep = normalize_unchecked(c, d);
        if (rep.second == d) {
          index_.emplace(key(c, d), static_cast<int>(reps_.size()));
          reps_.emplace_back(c, d);
        }
      }
    }
    if (N_ <= kDenseLimit) {
      dense_.assign(static_cast<std::size_t>(N_ * N_), -1);
      for (std::int64_t c = 0; c < N_; ++c)
        for (std::int64_t d = 0; d < N_; ++d)
          if (std::gcd(std::gcd(c, d), N_) == 1) dense_[c * N_ + d] = lookup(c, d);
    }
  }

  static constexpr std::int64_t kDenseLimit = 2048;

  std::int64_t level() const { return N_; }
  std::size_t size() const { return reps_.size(); }
  const std::pair<std::int64_t, std::int64_t>& rep(int i) const { return reps_[i]; }

  /// Index of (c:d); the pair must satisfy gcd(c, d, N) = 1.
  int index(std::int64_t c, std::int64_t d) const {
    c = arith::mod(c, N_);
    d = arith::mod(d, N_);
    if (!dense_.empty()) {
      int i = dense_[c * N_ + d];
      if (i < 0) throw InputError("P1List: (c:d) not in P^1(Z/N)");
      return i;
    }
    if (std::gcd(std::gcd(c, d), N_) != 1) throw InputError("P1List: (c:d) not in P^1(Z/N)");
    return lookup(c, d);
  }

 private:
  static std::int64_t key(std::int64_t c, std::int64_t d) { return (c << 32) | d; }

  int lookup(std::int64_t c, std::int64_t d) const {
    auto rep = normalize_unchecked(c, d);
    return index_.at(key(rep.first, rep.second));
  }

  std::pair<std::int64_t, std::int64_t> normalize_unchecked(std::int64_t c, std::int64_t d) const {
    if (N_ == 1) return {0, 0};
    std::int64_t g = std::gcd(c, N_);
    std::int64_t m = N_ / g;
    // Find a unit u mod N with u * (c / g) = 1 mod m.
    std::int64_t u = 1;
    if (m > 1) {
      std::int64_t c1 = (c / g) % m;
      std::int64_t inv = arith::invmod(c1, m);
      u = inv;
      while (std::gcd(u, N_) != 1) u += m;
    }
    std::int64_t d0 = static_cast<std::int64_t>(static_cast<__int128>(u) * d % N_);
    std::int64_t best = N_;
    for (std::int64_t v : units_.at(g)) best = std::min<std::int64_t>(best, static_cast<std::int64_t>(static_cast<__int128>(v) * d0 % N_));
    return {g % N_, best};
  }

  std::int64_t N_;
  std::vector<std::pair<std::int64_t, std::int64_t>> reps_;
  std::unordered_map<std::int64_t, int> index_;
  std::map<std::int64_t, std::vector<std::int64_t>> units_;
  std::vector<int> dense_;
};

/// [SL_2(Z) : Gamma_0(N)].
inline std::uint64_t gamma0_index(std::uint64_t N) {
  std::uint64_t idx = N;
  for (auto q : arith::prime_divisors(N)) idx = idx / q * (q + 1);
  return idx;
}

/// Expected dimension of the plus quotient of weight-2 modular symbols for Gamma_0(N):
/// genus + (number of cusps up to negation) - 1.
inline std::uint64_t plus_dimension_formula(std::uint64_t N) {
  std::int64_t mu = static_cast<std::int64_t>(gamma0_index(N));
  std::int64_t nu2 = 0, nu3 = 0;
  if (N % 4 != 0) {
    nu2 = 1;
    for (auto q : arith::prime_divisors(N)) nu2 *= (q == 2) ? 1 : 1 + arith::kronecker(-4, q);
  }
  if (N % 9 != 0) {
    nu3 = 1;
    for (auto q : arith::prime_divisors(N)) nu3 *= (q == 3) ? 1 : 1 + arith::kronecker(-3, q);
  }
  std::int64_t cusps = 0, cusp_orbits = 0;
  for (std::uint64_t d = 1; d <= N; ++d) {
    if (N % d != 0) continue;
    std::uint64_t g = std::gcd(d, N / d);
    std::uint64_t phi = arith::euler_phi(g);
    cusps += static_cast<std::int64_t>(phi);
    cusp_orbits += g > 2 ? static_cast<std::int64_t>(phi / 2) : 1;
  }
  // 12 g = 12 + mu - 3 nu2 - 4 nu3 - 6 c
  std::int64_t twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * cusps;
  std::int64_t genus = twelve_g / 12;
  return static_cast<std::uint64_t>(genus + cusp_orbits - 1);
}

namespace detail {

using SparseRow = std::vector<std::pair<int, Integer>>;  // sorted by column

inline void add_scaled(SparseRow& out, const SparseRow& a, const Integer& fa, const SparseRow& b, const Integer& fb) {
  out.clear();
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.emplace_back(a[i].first, fa * a[i].second);
      ++i;
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, fb * b[j].second);
      ++j;
    } else {
      Integer v = fa * a[i].second + fb * b[j].second;
      if (v != 0) out.emplace_back(a[i].first, v);
      ++i;
      ++j;
    }
  }
}

inline void make_primitive(SparseRow& r) {
  Integer g = 0;
  for (auto& [c, v] : r) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  if (g > 1)
    for (auto& [c, v] : r) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
}

/// Right nullspace of a dense rational matrix (rows x cols), as column vectors.
inline std::vector<std::vector<Rational>> nullspace(std::vector<std::vector<Rational>> A, std::size_t cols) {
  std::size_t rows = A.size();
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t piv = r;
    while (piv < rows && A[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(A[piv], A[r]);
    Rational inv = 1 / A[r][c];
    for (std::size_t j = c; j < cols; ++j) A[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0) continue;
      Rational f = A[i][c];
      for (std::size_t j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  std::vector<bool> is_pivot(cols, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<std::vector<Rational>> basis;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(cols, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < pivot_col.size(); ++i) v[pivot_col[i]] = -A[i][f];
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace detail

/// Plus quotient of the Manin-symbol space for Gamma_0(N), with exact coordinates.
class ManinSpace {
 public:
  static constexpr std::uint64_t kDefaultCap = 10000;

  explicit ManinSpace(std::uint64_t N, std::uint64_t cap = kDefaultCap) : p1_(check_cap(N, cap)), N_(static_cast<std::int64_t>(N)) {
    build();
  }

  std::uint64_t level() const { return static_cast<std::uint64_t>(N_); }
  const P1List& p1() const { return p1_; }
  std::size_t num_generators() const { return p1_.size(); }
  std::size_t dimension() const { return basis_.size(); }

  /// Coordinates of the Manin symbol (c:d) in the quotient basis.
  std::vector<Rational> coordinates(std::int64_t c, std::int64_t d) const {
    int i = p1_.index(c, d);
    std::vector<Rational> out(dimension(), Rational(0));
    if (sign_[i] == 0) return out;
    const auto& e = expr_[root_[i]];
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = sign_[i] * e[j];
    return out;
  }

  /// Coordinates of generator i (index into P^1).
  const std::vector<Rational>& root_expression(int i, int& sign) const {
    sign = sign_[i];
    return expr_[root_[i] < 0 ? 0 : root_[i]];
  }

  /// Matrix of T_q (q prime, q not dividing N) acting on the basis: row b = T_q(basis b).
  const std::vector<std::vector<Rational>>& hecke_matrix(std::uint64_t q) const {
    auto it = hecke_cache_.find(q);
    if (it != hecke_cache_.end()) return it->second;
    if (!arith::is_prime(q) || static_cast<std::int64_t>(q) % N_ == 0 || N_ % static_cast<std::int64_t>(q) == 0)
      throw InputError("hecke_matrix: need a prime not dividing the level");
    auto Q = static_cast<std::int64_t>(q);
    // Merel's matrices [[a, b], [c, d]] with ad - bc = q, a > b >= 0, d > c >= 0.
    std::vector<std::array<std::int64_t, 4>> merel;
    for (std::int64_t a = 1; a <= Q; ++a)
      for (std::int64_t b = 0; b < a; ++b)
        for (std::int64_t c = 0; c * (a - b) <= Q - a; ++c) {
          if ((Q + b * c) % a != 0) continue;
          std::int64_t d = (Q + b * c) / a;
          if (d > c) merel.push_back({a, b, c, d});
        }
    std::size_t dim = dimension();
    std::vector<std::vector<Rational>> M(dim, std::vector<Rational>(dim, Rational(0)));
    for (std::size_t bi = 0; bi < dim; ++bi) {
      auto [c, d] = p1_.rep(basis_[bi]);
      std::map<int, long> counts;  // column -> signed multiplicity
      for (auto& h : merel) {
        int i = p1_.index(c * h[0] + d * h[2], c * h[1] + d * h[3]);
        if (sign_[i] != 0) counts[root_[i]] += sign_[i];
      }
      for (auto& [col, m] : counts) {
        if (m == 0) continue;
        const auto& e = expr_[col];
        for (std::size_t j = 0; j < dim; ++j)
          if (e[j] != 0) M[bi][j] += Rational(m) * e[j];
      }
    }
    return hecke_cache_.emplace(q, std::move(M)).first->second;
  }

 private:
  static std::uint64_t check_cap(std::uint64_t N, std::uint64_t cap) {
    if (N == 0) throw InputError("build_manin_space: level must be positive");
    if (N > cap) throw InputError("build_manin_space: level " + std::to_string(N) + " exceeds the configured cap " + std::to_string(cap));
    return N;
  }

  void build() {
    const int n = static_cast<int>(p1_.size());
    // Two-term relations x = -xS and x = x eta via a signed BFS.
    root_.assign(n, -1);
    sign_.assign(n, 0);
    std::vector<int> comp_of(n, -1), rel_sign(n, 0);
    std::vector<bool> comp_zero;
    std::vector<int> comp_root;
    for (int s = 0; s < n; ++s) {
      if (comp_of[s] >= 0) continue;
      int comp = static_cast<int>(comp_root.size());
      comp_root.push_back(s);
      comp_zero.push_back(false);
      std::queue<int> todo;
      comp_of[s] = comp;
      rel_sign[s] = 1;
      todo.push(s);
      while (!todo.empty()) {
        int i = todo.front();
        todo.pop();
        auto [c, d] = p1_.rep(i);
        std::pair<int, int> nbrs[2] = {{p1_.index(d, -c), -1}, {p1_.index(-c, d), 1}};
        for (auto [j, sg] : nbrs) {
          int want = rel_sign[i] * sg;
          if (comp_of[j] < 0) {
            comp_of[j] = comp;
            rel_sign[j] = want;
            todo.push(j);
          } else if (rel_sign[j] != want) {
            comp_zero[comp] = true;
          }
        }
      }
    }
    // Free columns are the non-zero components.
    std::vector<int> col_of_comp(comp_root.size(), -1);
    int ncols = 0;
    for (std::size_t k = 0; k < comp_root.size(); ++k)
      if (!comp_zero[k]) col_of_comp[k] = ncols++;
    for (int i = 0; i < n; ++i) {
      int col = col_of_comp[comp_of[i]];
      root_[i] = col;
      sign_[i] = col < 0 ? 0 : rel_sign[i];
    }
    col_rep_.assign(ncols, -1);
    for (int i = 0; i < n; ++i)
      if (root_[i] >= 0 && col_rep_[root_[i]] < 0 && rel_sign[i] == 1) col_rep_[root_[i]] = i;

    // Three-term relations x + x tau + x tau^2 = 0, one per tau-orbit.
    std::vector<detail::SparseRow> pivot_rows;
    std::unordered_map<int, int> pivot_of_col;  // column -> creation index
    std::vector<int> pivot_col_by_time;
    std::vector<bool> seen(n, false);
    for (int i = 0; i < n; ++i) {
      if (seen[i]) continue;
      auto [c, d] = p1_.rep(i);
      int j = p1_.index(d, -c - d), k = p1_.index(-c - d, c);
      seen[i] = seen[j] = seen[k] = true;
      std::map<int, Integer> acc;
      for (int t : {i, j, k})
        if (sign_[t] != 0) acc[root_[t]] += sign_[t];
      detail::SparseRow row;
      for (auto& [col, v] : acc)
        if (v != 0) row.emplace_back(col, v);
      reduce_and_insert(row, pivot_rows, pivot_of_col, pivot_col_by_time);
    }

    // Basis = non-pivot columns; back-substitute pivots in reverse creation order.
    for (int col = 0; col < ncols; ++col)
      if (!pivot_of_col.count(col)) basis_col_.push_back(col);
    std::size_t dim = basis_col_.size();
    std::vector<int> basis_index(ncols, -1);
    for (std::size_t b = 0; b < dim; ++b) basis_index[basis_col_[b]] = static_cast<int>(b);
    expr_.assign(ncols, std::vector<Rational>(dim, Rational(0)));
    for (std::size_t b = 0; b < dim; ++b) expr_[basis_col_[b]][b] = 1;
    for (int t = static_cast<int>(pivot_rows.size()) - 1; t >= 0; --t) {
      int pc = pivot_col_by_time[t];
      const auto& row = pivot_rows[t];
      Integer a;
      std::vector<Rational> acc(dim, Rational(0));
      for (auto& [col, v] : row) {
        if (col == pc) {
          a = v;
          continue;
        }
        const auto& e = expr_[col];
        for (std::size_t j = 0; j < dim; ++j)
          if (e[j] != 0) acc[j] += Rational(v) * e[j];
      }
      for (std::size_t j = 0; j < dim; ++j) {
        acc[j] = -acc[j] / Rational(a);
        acc[j].canonicalize();
      }
      expr_[pc] = std::move(acc);
    }
    for (int col : basis_col_) basis_.push_back(col_rep_[col]);
  }

  static void reduce_and_insert(detail::SparseRow row, std::vector<detail::SparseRow>& pivot_rows,
                                std::unordered_map<int, int>& pivot_of_col, std::vector<int>& pivot_col_by_time) {
    detail::SparseRow tmp;
    while (!row.empty()) {
      // Eliminate the pivot column of smallest creation time present in the row.
      int best_t = -1;
      Integer coeff;
      for (auto& [col, v] : row) {
        auto it = pivot_of_col.find(col);
        if (it != pivot_of_col.end() && (best_t < 0 || it->second < best_t)) {
          best_t = it->second;
          coeff = v;
        }
      }
      if (best_t < 0) break;
      const auto& prow = pivot_rows[best_t];
      int pc = pivot_col_by_time[best_t];
      Integer pv;
      for (auto& [col, v] : prow)
        if (col == pc) pv = v;
      Integer g;
      mpz_gcd(g.get_mpz_t(), pv.get_mpz_t(), coeff.get_mpz_t());
      detail::add_scaled(tmp, row, Integer(pv / g), prow, Integer(-coeff / g));
      row.swap(tmp);
      detail::make_primitive(row);
    }
    if (row.empty()) return;
    std::size_t best = 0;
    for (std::size_t i = 1; i < row.size(); ++i)
      if (abs(row[i].second) < abs(row[best].second)) best = i;
    detail::make_primitive(row);
    pivot_of_col.emplace(row[best].first, static_cast<int>(pivot_rows.size()));
    pivot_col_by_time.push_back(row[best].first);
    pivot_rows.push_back(std::move(row));
  }

  P1List p1_;
  std::int64_t N_;
  std::vector<int> root_, sign_, col_rep_, basis_col_, basis_;
  std::vector<std::vector<Rational>> expr_;
  mutable std::map<std::uint64_t, std::vector<std::vector<Rational>>> hecke_cache_;
};

inline ManinSpace build_manin_space(std::uint64_t N, std::uint64_t cap = ManinSpace::kDefaultCap) { return ManinSpace(N, cap); }

/// The plus eigensymbol of E as a primitive integral functional on Manin symbols.
struct EigenSymbol {
  std::string curve_label;
  std::uint64_t level = 1;
  std::vector<Rational> coordinates;   // functional on the quotient basis (primitive integral scaling)
  Rational normalization_scalar = 1;   // factor applied to the first eigenvector found
  std::vector<std::int64_t> values;    // phi_0 on every element of P^1(Z/N), indexed by P1List
  std::vector<std::uint64_t> probe_primes;
  std::optional<Rational> period_scale;  // [a/b]^+ = period_scale * phi_0({a/b, oo})

  std::shared_ptr<const P1List> p1;
  std::vector<std::int32_t> table;  // dense (c mod N, d mod N) -> value, when N is small

  std::int64_t symbol_value(std::int64_t c, std::int64_t d) const {
    auto N = static_cast<std::int64_t>(level);
    c = arith::mod(c, N);
    d = arith::mod(d, N);
    if (!table.empty()) return table[static_cast<std::size_t>(c * N + d)];
    return values[p1->index(c, d)];
  }

  void build_table() {
    auto N = static_cast<std::int64_t>(level);
    table.clear();
    if (N > P1List::kDenseLimit) return;
    table.assign(static_cast<std::size_t>(N * N), 0);
    for (std::int64_t c = 0; c < N; ++c)
      for (std::int64_t d = 0; d < N; ++d)
        if (std::gcd(std::gcd(c, d), N) == 1) table[c * N + d] = static_cast<std::int32_t>(values[p1->index(c, d)]);
  }
};

/// Cut the plus quotient down to the simultaneous eigenline T_q = a_q(E) for good q.
inline EigenSymbol isolate_eigensymbol(const ManinSpace& space, const EllipticCurve& E, std::size_t max_probes = 60,
                                       std::size_t extra_checks = 0) {
  if (space.level() != E.conductor()) throw InputError("isolate_eigensymbol: level differs from the conductor");
  std::size_t dim = space.dimension();
  std::vector<std::vector<Rational>> K;  // basis of the current subspace (vectors of length dim)
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<Rational> e(dim, Rational(0));
    e[i] = 1;
    K.push_back(std::move(e));
  }
  EigenSymbol sym;
  sym.curve_label = E.label();
  sym.level = space.level();
  std::uint64_t q = 1;
  std::size_t used = 0;
  while (K.size() > 1) {
    if (used >= max_probes)
      throw AmbiguityError("isolate_eigensymbol: eigenspace of dimension " + std::to_string(K.size()) + " after " +
                           std::to_string(used) + " probe primes");
    do ++q;
    while (!arith::is_prime(q) || space.level() % q == 0);
    ++used;
    sym.probe_primes.push_back(q);
    const auto& M = space.hecke_matrix(q);
    Rational a(static_cast<long>(trace_of_frobenius(E, q)));
    // A = (M - a I) K, columns indexed by the current basis vectors.
    std::vector<std::vector<Rational>> A(dim, std::vector<Rational>(K.size(), Rational(0)));
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t k = 0; k < K.size(); ++k) {
        Rational s = -a * K[k][r];
        for (std::size_t j = 0; j < dim; ++j)
          if (M[r][j] != 0 && K[k][j] != 0) s += M[r][j] * K[k][j];
        A[r][k] = s;
      }
    auto null = detail::nullspace(A, K.size());
    std::vector<std::vector<Rational>> K2;
    for (auto& c : null) {
      std::vector<Rational> v(dim, Rational(0));
      for (std::size_t k = 0; k < K.size(); ++k)
        if (c[k] != 0)
          for (std::size_t j = 0; j < dim; ++j) v[j] += c[k] * K[k][j];
      K2.push_back(std::move(v));
    }
    K = std::move(K2);
    if (K.empty()) throw AmbiguityError("isolate_eigensymbol: no eigenvector with the eigenvalues of " + E.label());
  }
  if (K.empty()) throw AmbiguityError("isolate_eigensymbol: empty space at level " + std::to_string(space.level()));

  // Values on every generator, then primitive integral scaling.
  const auto& v = K[0];
  const auto& P1 = space.p1();
  std::vector<Rational> vals(P1.size(), Rational(0));
  for (std::size_t i = 0; i < P1.size(); ++i) {
    auto [c, d] = P1.rep(static_cast<int>(i));
    auto coords = space.coordinates(c, d);
    Rational s = 0;
    for (std::size_t j = 0; j < dim; ++j) s += coords[j] * v[j];
    vals[i] = s;
  }
  Integer den = 1, num = 0;
  for (auto& x : vals) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
  for (auto& x : vals) {
    Integer n = x.get_num() * (den / x.get_den());
    mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), n.get_mpz_t());
  }
  if (num == 0) throw AmbiguityError("isolate_eigensymbol: plus eigensymbol vanishes identically");
  Rational scalar(den, num);
  scalar.canonicalize();
  // Deterministic sign: first non-zero generator value positive.
  for (auto& x : vals)
    if (x != 0) {
      if (x < 0) scalar = -scalar;
      break;
    }
  sym.normalization_scalar = scalar;
  for (auto& x : v) sym.coordinates.push_back(x * scalar);
  sym.values.resize(P1.size());
  for (std::size_t i = 0; i < P1.size(); ++i) {
    Rational w = vals[i] * scalar;
    if (w.get_den() != 1 || !w.get_num().fits_slong_p()) throw InvariantError("isolate_eigensymbol: non-integral value");
    sym.values[i] = w.get_num().get_si();
  }
  sym.p1 = std::make_shared<P1List>(space.level());
  sym.build_table();

  // Optional extra verification of the eigen property beyond the probes.
  for (std::size_t extra = 0; extra < extra_checks;) {
    do ++q;
    while (!arith::is_prime(q) || space.level() % q == 0);
    const auto& M = space.hecke_matrix(q);
    Rational a(static_cast<long>(trace_of_frobenius(E, q)));
    for (std::size_t r = 0; r < dim; ++r) {
      Rational s = 0;
      for (std::size_t j = 0; j < dim; ++j) s += M[r][j] * sym.coordinates[j];
      if (s != a * sym.coordinates[r]) throw InvariantError("isolate_eigensymbol: eigen property fails at q=" + std::to_string(q));
    }
    ++extra;
  }
  return sym;
}

/// phi_0({a/b, oo}) by the continued-fraction decomposition into unimodular paths.
inline std::int64_t eval_primitive(const EigenSymbol& sym, std::int64_t a, std::int64_t b) {
  if (b <= 0) throw InputError("eval_primitive: denominator must be positive");
  std::int64_t g = std::gcd(a < 0 ? -a : a, b);
  if (g != 1) throw InputError("eval_primitive: gcd(a, b) must be 1");
  // Convergents p_k/q_k of a/b with p_{-2}/q_{-2} = 0/1 and p_{-1}/q_{-1} = 1/0.
  std::int64_t pm2 = 0, qm2 = 1, pm1 = 1, qm1 = 0;
  std::int64_t x = a, y = b;
  std::int64_t total = 0;
  while (y != 0) {
    std::int64_t qt = x / y, r = x % y;
    if (r < 0) {
      r += y;
      --qt;
    }
    std::int64_t pk = qt * pm1 + pm2, qk = qt * qm1 + qm2;
    // det = p_k q_{k-1} - p_{k-1} q_k = (-1)^(k+1)
    std::int64_t det = pk * qm1 - pm1 * qk;
    total += sym.symbol_value(det * qk, qm1);
    pm2 = pm1, qm2 = qm1, pm1 = pk, qm1 = qk;
    x = y;
    y = r;
  }
  return -total;
}

/// [a/b]^+ as an exact rational; requires a calibrated period scale.
inline Rational eval_plus(const EigenSymbol& sym, std::int64_t a, std::int64_t b) {
  if (!sym.period_scale) throw InputError("eval_plus: eigensymbol has no period scale (run the calibration)");
  if (b == 0) {
    if (a != 0) throw InputError("eval_plus: b = 0 is only accepted for a = 0");
    b = 1;
  }
  return *sym.period_scale * Rational(static_cast<long>(eval_primitive(sym, a, b)));
}

/// Are all values [a/b]^+ p-integral? (phi_0 is primitive, so this is v_p(scale) >= 0.)
inline void require_p_integral(const EigenSymbol& sym, std::uint64_t p) {
  if (!sym.period_scale) throw InputError("require_p_integral: uncalibrated eigensymbol");
  if (*sym.period_scale == 0) return;
  if (arith::valuation(*sym.period_scale, p) < 0)
    throw HypothesisError(sym.curve_label + ": modular symbols are not " + std::to_string(p) +
                          "-integral (period scale " + sym.period_scale->get_str() + ")");
}

}  // namespace kurihara
