#pragma once

// Independent reference computations used by tests. They deliberately take a
// different route from the library: natural logs, dense arrays, and mutual
// information summed cell by cell instead of via joint entropy.

#include <cmath>
#include <vector>

namespace oracles {

inline double entropy_nats(const std::vector<double>& counts) {
  double total = 0.0;
  for (double c : counts) total += c;
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h += (c / total) * std::log(total / c);
  }
  return h;
}

inline double normalized_entropy(const std::vector<double>& counts) {
  std::size_t support = 0;
  for (double c : counts) support += c > 0.0 ? 1 : 0;
  if (support < 2) return 0.0;
  return entropy_nats(counts) / std::log(static_cast<double>(support));
}

/// table[r][c] = joint count of (x=r, y=c).
inline double normalized_mutual_information(const std::vector<std::vector<double>>& table) {
  const std::size_t rows = table.size();
  const std::size_t cols = table.empty() ? 0 : table[0].size();
  std::vector<double> px(rows, 0.0), py(cols, 0.0);
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      px[r] += table[r][c];
      py[c] += table[r][c];
      total += table[r][c];
    }
  }
  double mi = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double n = table[r][c];
      if (n <= 0.0) continue;
      mi += (n / total) * std::log((n * total) / (px[r] * py[c]));
    }
  }
  const double denom = entropy_nats(px) + entropy_nats(py);
  if (denom <= 0.0) return 0.0;
  return 2.0 * mi / denom;
}

}  // namespace oracles
