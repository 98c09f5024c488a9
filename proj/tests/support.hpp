#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "lapspec/lapspec.hpp"

namespace testsupport {

using lapspec::Graph;

/// Erdos-Renyi G(n, p), redrawn until connected.
inline Graph random_connected_gnp(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  for (;;) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 1; i <= n; ++i) {
      for (int j = i + 1; j <= n; ++j) {
        if (coin(rng)) pairs.emplace_back(i, j);
      }
    }
    auto g = lapspec::build_graph(n, pairs);
    if (g.is_connected()) return g;
  }
}

/// Uniform random labelled tree from a Pruefer sequence.
inline Graph random_tree(int n, std::mt19937_64& rng) {
  if (n == 1) return lapspec::build_graph(1, {});
  if (n == 2) return lapspec::build_graph(2, {{1, 2}});
  std::uniform_int_distribution<int> pick(1, n);
  std::vector<int> seq(static_cast<std::size_t>(n - 2));
  for (auto& s : seq) s = pick(rng);
  std::vector<int> degree(static_cast<std::size_t>(n + 1), 1);
  for (int s : seq) ++degree[static_cast<std::size_t>(s)];
  std::vector<std::pair<int, int>> pairs;
  for (int s : seq) {
    for (int leaf = 1; leaf <= n; ++leaf) {
      if (degree[static_cast<std::size_t>(leaf)] == 1) {
        pairs.emplace_back(leaf, s);
        --degree[static_cast<std::size_t>(leaf)];
        --degree[static_cast<std::size_t>(s)];
        break;
      }
    }
  }
  int u = 0;
  for (int v = 1; v <= n; ++v) {
    if (degree[static_cast<std::size_t>(v)] == 1) {
      if (u == 0) {
        u = v;
      } else {
        pairs.emplace_back(u, v);
      }
    }
  }
  return lapspec::build_graph(n, pairs);
}

/// Closed-form spectrum of the combinatorial Laplacian of C_n, ascending.
inline std::vector<double> ring_spectrum(int n) {
  std::vector<double> v;
  for (int k = 0; k < n; ++k) v.push_back(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n));
  std::sort(v.begin(), v.end());
  return v;
}

inline std::vector<double> ring_distinct(int n) {
  std::vector<double> v;
  for (int k = 0; k <= n / 2; ++k) v.push_back(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n));
  std::sort(v.begin(), v.end());
  return v;
}

/// Binomial coefficient by exact integer arithmetic.
inline std::uint64_t choose(unsigned k, unsigned s) {
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= s; ++i) r = r * (k - s + i) / i;
  return r;
}

template <typename S>
double max_abs_diff(const std::vector<S>& a, const std::vector<S>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(lapspec::to_double(a[i] - b[i])));
  return m;
}

}  // namespace testsupport
