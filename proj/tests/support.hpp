#pragma once

#include <map>
#include <mutex>

#include "kurihara.hpp"

namespace ktest {

using namespace kurihara;

inline const std::vector<CurveRecord>& records() {
  static const auto recs = ingest(std::string(KURIHARA_DATA_DIR) + "/curves.jsonl").records;
  return recs;
}

inline const CurveRecord& record(const std::string& label) { return find_record(records(), label); }
inline EllipticCurve curve(const std::string& label) { return make_curve(record(label)); }

/// Calibrated eigensymbol, built once per label.
inline const EigenSymbol& symbol(const std::string& label) {
  static std::mutex mu;
  static std::map<std::string, EigenSymbol> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(label);
  if (it == cache.end()) {
    auto& r = record(label);
    it = cache.emplace(label, load_or_build_symbol(make_curve(r), r.root_number).symbol).first;
  }
  return it->second;
}

/// #E(F_q) by enumerating every (x, y) in F_q^2, plus the point at infinity.
inline std::uint64_t brute_count(const EllipticCurve& E, std::uint64_t q) {
  auto red = [&](const Integer& z) { return static_cast<std::int64_t>(arith::mod(z, q)); };
  std::int64_t a1 = red(E.a1()), a2 = red(E.a2()), a3 = red(E.a3()), a4 = red(E.a4()), a6 = red(E.a6());
  std::int64_t Q = static_cast<std::int64_t>(q);
  std::uint64_t count = 1;
  for (std::int64_t x = 0; x < Q; ++x) {
    std::int64_t rhs = (((x * x % Q) * x + a2 * (x * x % Q) + a4 * x + a6) % Q + Q) % Q;
    for (std::int64_t y = 0; y < Q; ++y)
      if (((y * y + a1 * x % Q * y + a3 * y) % Q + Q) % Q == rhs) ++count;
  }
  return count;
}

inline std::int64_t brute_trace(const EllipticCurve& E, std::uint64_t q) {
  return static_cast<std::int64_t>(q + 1) - static_cast<std::int64_t>(brute_count(E, q));
}

/// a^e mod l by repeated multiplication.
inline std::uint64_t slow_pow(std::uint64_t a, std::uint64_t e, std::uint64_t l) {
  std::uint64_t r = 1 % l;
  for (std::uint64_t i = 0; i < e; ++i) r = r * (a % l) % l;
  return r;
}

}  // namespace ktest
