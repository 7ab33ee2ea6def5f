#pragma once

#include <vector>

namespace ktest {

/// Every non-increasing sequence of positive integers with sum <= max_sum (including the empty one).
inline std::vector<std::vector<int>> partitions_up_to(int max_sum) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int remaining, int cap) -> void {
    out.push_back(cur);
    for (int d = std::min(remaining, cap); d >= 1; --d) {
      cur.push_back(d);
      self(self, remaining - d, d);
      cur.pop_back();
    }
  };
  rec(rec, max_sum, max_sum);
  return out;
}

}  // namespace ktest
