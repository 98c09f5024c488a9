#pragma once

// Simple undirected graphs: construction, generators, and the plain-text
// edge-list file format.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lapspec/error.hpp"
#include "lapspec/random.hpp"

namespace lapspec {

/// Unordered node pair, 1-based, stored with i < j.
struct Edge {
  int i = 0;
  int j = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline std::string to_string(const Edge& e) {
  return "{" + std::to_string(e.i) + "," + std::to_string(e.j) + "}";
}

class Graph {
 public:
  int node_count() const { return n_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  /// Degree of every node, index 0 is node 1.
  std::vector<int> degrees() const {
    std::vector<int> d(static_cast<std::size_t>(n_), 0);
    for (const auto& e : edges_) {
      ++d[static_cast<std::size_t>(e.i - 1)];
      ++d[static_cast<std::size_t>(e.j - 1)];
    }
    return d;
  }

  bool is_connected() const {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n_));
    for (const auto& e : edges_) {
      adj[static_cast<std::size_t>(e.i - 1)].push_back(e.j - 1);
      adj[static_cast<std::size_t>(e.j - 1)].push_back(e.i - 1);
    }
    std::vector<char> seen(static_cast<std::size_t>(n_), 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int visited = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[static_cast<std::size_t>(v)]) {
        if (!seen[static_cast<std::size_t>(w)]) {
          seen[static_cast<std::size_t>(w)] = 1;
          ++visited;
          stack.push_back(w);
        }
      }
    }
    return visited == n_;
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend Graph build_graph(int n, const std::vector<std::pair<int, int>>& pairs);

  int n_ = 0;
  std::vector<Edge> edges_;  // sorted
};

/// Validates a node count and edge list into a simple graph. Pairs may be
/// given in either orientation.
inline Graph build_graph(int n, const std::vector<std::pair<int, int>>& pairs) {
  if (n < 1) {
    throw Error(ErrorKind::BadParameters, "node count must be >= 1, got " + std::to_string(n));
  }
  std::set<Edge> seen;
  for (const auto& [a, b] : pairs) {
    const Edge e{std::min(a, b), std::max(a, b)};
    if (e.i < 1 || e.j > n) {
      throw Error(ErrorKind::IndexOutOfRange,
                  "pair " + to_string(e) + " outside [1," + std::to_string(n) + "]");
    }
    if (a == b) {
      throw Error(ErrorKind::SelfLoop, "pair " + to_string(e));
    }
    if (!seen.insert(e).second) {
      throw Error(ErrorKind::DuplicateEdge, "pair " + to_string(e));
    }
  }
  Graph g;
  g.n_ = n;
  g.edges_.assign(seen.begin(), seen.end());
  return g;
}

inline Graph generate_ring(int n) {
  if (n < 3) {
    throw Error(ErrorKind::TooSmall, "ring needs n >= 3, got " + std::to_string(n));
  }
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  for (int v = 1; v < n; ++v) pairs.emplace_back(v, v + 1);
  pairs.emplace_back(n, 1);
  return build_graph(n, pairs);
}

/// Degree-proportional growth: start from a star on m+1 nodes, then each new
/// node links to m distinct existing nodes drawn with probability
/// proportional to their current degree.
inline Graph generate_preferential_attachment(int n, int m, std::uint64_t seed) {
  if (m < 1 || n < m + 1) {
    throw Error(ErrorKind::BadParameters,
                "need m >= 1 and n >= m+1, got n=" + std::to_string(n) + " m=" + std::to_string(m));
  }
  Rng rng(seed);
  std::vector<std::pair<int, int>> pairs;
  // Node v appears deg(v) times.
  std::vector<int> endpoints;
  for (int leaf = 2; leaf <= m + 1; ++leaf) {
    pairs.emplace_back(1, leaf);
    endpoints.push_back(1);
    endpoints.push_back(leaf);
  }
  for (int v = m + 2; v <= n; ++v) {
    std::vector<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      const int t = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (int t : targets) {
      pairs.emplace_back(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return build_graph(n, pairs);
}

// Graph file: first non-comment line `n`, then one `i j` per line, 1-based.
// `#` starts a comment anywhere on a line.

inline Graph read_graph(std::istream& in) {
  std::string line;
  int n = -1;
  std::vector<std::pair<int, int>> pairs;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto bad = [&] {
      return Error(ErrorKind::Io, "graph file line " + std::to_string(lineno) + ": '" + line + "'");
    };
    try {
      std::size_t used = 0;
      const int a = std::stoi(first, &used);
      if (used != first.size()) throw bad();
      if (n < 0) {
        n = a;
        std::string extra;
        if (ls >> extra) throw bad();
        continue;
      }
      int b;
      std::string extra;
      if (!(ls >> b) || (ls >> extra)) throw bad();
      pairs.emplace_back(a, b);
    } catch (const std::logic_error&) {
      throw bad();
    }
  }
  if (n < 0) throw Error(ErrorKind::Io, "graph file has no node count");
  return build_graph(n, pairs);
}

inline Graph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open graph file " + path);
  return read_graph(in);
}

inline void write_graph(std::ostream& out, const Graph& g) {
  out << g.node_count() << '\n';
  for (const auto& e : g.edges()) out << e.i << ' ' << e.j << '\n';
}

inline void write_graph_file(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write graph file " + path);
  write_graph(out, g);
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path);
}

}  // namespace lapspec
