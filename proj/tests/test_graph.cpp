#include <gtest/gtest.h>

#include <sstream>

#include "lapspec/lapspec.hpp"
#include "support.hpp"

using namespace lapspec;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no lapspec::Error thrown";
  return ErrorKind::Io;
}

}  // namespace

TEST(BuildGraph, PathOnTwoNodes) {
  const auto g = build_graph(2, {{1, 2}});
  EXPECT_EQ(g.node_count(), 2);
  ASSERT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.edges()[0], (Edge{1, 2}));
}

TEST(BuildGraph, NormalizesOrientation) {
  const auto g = build_graph(3, {{3, 1}, {2, 1}});
  EXPECT_EQ(g.edges(), (std::vector<Edge>{{1, 2}, {1, 3}}));
}

TEST(BuildGraph, RejectsInvalidPairs) {
  EXPECT_EQ(kind_of([] { build_graph(3, {{1, 1}}); }), ErrorKind::SelfLoop);
  EXPECT_EQ(kind_of([] { build_graph(3, {{1, 2}, {2, 1}}); }), ErrorKind::DuplicateEdge);
  EXPECT_EQ(kind_of([] { build_graph(3, {{1, 4}}); }), ErrorKind::IndexOutOfRange);
  EXPECT_EQ(kind_of([] { build_graph(3, {{0, 2}}); }), ErrorKind::IndexOutOfRange);
  EXPECT_EQ(kind_of([] { build_graph(0, {}); }), ErrorKind::BadParameters);
}

TEST(BuildGraph, ErrorNamesOffendingPair) {
  try {
    build_graph(5, {{1, 2}, {4, 2}, {2, 4}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("{2,4}"), std::string::npos) << e.what();
  }
}

TEST(BuildGraph, TwelveRingFromPairs) {
  std::vector<std::pair<int, int>> pairs;
  for (int v = 1; v < 12; ++v) pairs.emplace_back(v, v + 1);
  pairs.emplace_back(12, 1);
  EXPECT_EQ(build_graph(12, pairs), generate_ring(12));
}

TEST(Ring, Shapes) {
  const auto tri = generate_ring(3);
  EXPECT_EQ(tri.edge_count(), 3u);
  const auto c12 = generate_ring(12);
  EXPECT_EQ(c12.edge_count(), 12u);
  for (int d : c12.degrees()) EXPECT_EQ(d, 2);
  EXPECT_TRUE(c12.is_connected());
  EXPECT_EQ(kind_of([] { generate_ring(2); }), ErrorKind::TooSmall);
}

TEST(PreferentialAttachment, TreeForSingleEdgePerNode) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto g = generate_preferential_attachment(10, 1, seed);
    EXPECT_EQ(g.edge_count(), 9u);
    EXPECT_TRUE(g.is_connected());
  }
  const auto p2 = generate_preferential_attachment(2, 1, 5);
  EXPECT_EQ(p2.edges(), (std::vector<Edge>{{1, 2}}));
}

TEST(PreferentialAttachment, EdgeCountForLargerM) {
  for (int m = 1; m <= 4; ++m) {
    const auto g = generate_preferential_attachment(20, m, 3);
    EXPECT_EQ(g.edge_count(), static_cast<std::size_t>(m + (20 - m - 1) * m));
    EXPECT_TRUE(g.is_connected());
  }
}

TEST(PreferentialAttachment, DeterministicInSeed) {
  EXPECT_EQ(generate_preferential_attachment(10, 1, 42), generate_preferential_attachment(10, 1, 42));
  std::ostringstream a, b;
  write_graph(a, generate_preferential_attachment(30, 2, 9));
  write_graph(b, generate_preferential_attachment(30, 2, 9));
  EXPECT_EQ(a.str(), b.str());
  bool any_differs = false;
  for (std::uint64_t s = 1; s < 10; ++s) {
    any_differs |= !(generate_preferential_attachment(10, 1, 0) == generate_preferential_attachment(10, 1, s));
  }
  EXPECT_TRUE(any_differs);
}

TEST(PreferentialAttachment, RejectsBadParameters) {
  EXPECT_EQ(kind_of([] { generate_preferential_attachment(5, 0, 1); }), ErrorKind::BadParameters);
  EXPECT_EQ(kind_of([] { generate_preferential_attachment(3, 3, 1); }), ErrorKind::BadParameters);
}

TEST(GraphFile, RoundTripAndComments) {
  std::istringstream in("# a path\n3\n2 3  # tail\n\n1 2\n");
  const auto g = read_graph(in);
  EXPECT_EQ(g, build_graph(3, {{1, 2}, {2, 3}}));
  std::ostringstream out;
  write_graph(out, g);
  EXPECT_EQ(out.str(), "3\n1 2\n2 3\n");
}

TEST(GraphFile, MalformedInput) {
  std::istringstream empty("# nothing\n");
  EXPECT_EQ(kind_of([&] { read_graph(empty); }), ErrorKind::Io);
  std::istringstream junk("3\n1 x\n");
  EXPECT_EQ(kind_of([&] { read_graph(junk); }), ErrorKind::Io);
  std::istringstream loop("3\n2 2\n");
  EXPECT_EQ(kind_of([&] { read_graph(loop); }), ErrorKind::SelfLoop);
  EXPECT_EQ(kind_of([] { read_graph_file("/nonexistent/graph.txt"); }), ErrorKind::Io);
}

// ----------------------------------------------------------------- Laplacian

TEST(Laplacian, PathOnTwoNodes) {
  const auto g = build_graph(2, {{1, 2}});
  const auto L = laplacian(g, LaplacianKind::Combinatorial);
  Eigen::Matrix2d want;
  want << 1, -1, -1, 1;
  EXPECT_EQ(L.entries, want);
  const auto R = laplacian(g, LaplacianKind::NormalizedRandomWalk);
  want << 0, 1, 1, 0;
  EXPECT_EQ(R.entries, want);
}

TEST(Laplacian, IsolatedNodeHasNoRandomWalk) {
  const auto g = build_graph(3, {{1, 2}});
  EXPECT_NO_THROW(laplacian(g, LaplacianKind::Combinatorial));
  EXPECT_EQ(kind_of([&] { laplacian(g, LaplacianKind::NormalizedRandomWalk); }), ErrorKind::IsolatedNode);
}

TEST(Laplacian, StructuralInvariants) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 20;
    const auto g = testsupport::random_connected_gnp(n, 0.3, rng);
    const auto deg = g.degrees();
    const auto L = laplacian(g, LaplacianKind::Combinatorial).entries;
    const auto R = laplacian(g, LaplacianKind::NormalizedRandomWalk).entries;
    EXPECT_EQ(L, L.transpose());
    for (int i = 0; i < n; ++i) {
      EXPECT_EQ(L.row(i).sum(), 0.0);
      EXPECT_EQ(L(i, i), deg[static_cast<std::size_t>(i)]);
      EXPECT_NEAR(R.row(i).sum(), 1.0, 1e-15);
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        EXPECT_TRUE(L(i, j) == 0.0 || L(i, j) == -1.0);
        EXPECT_EQ(R(i, j) != 0.0, L(i, j) != 0.0);
        if (R(i, j) != 0.0) EXPECT_DOUBLE_EQ(R(i, j), 1.0 / deg[static_cast<std::size_t>(i)]);
      }
    }
  }
}

// ------------------------------------------------------------- eig_reference

TEST(EigReference, SmallCases) {
  const auto g = build_graph(2, {{1, 2}});
  const auto d1 = eig_reference(laplacian(g, LaplacianKind::Combinatorial));
  EXPECT_NEAR(d1.eigenvalues(0), 0.0, 1e-15);
  EXPECT_NEAR(d1.eigenvalues(1), 2.0, 1e-15);
  const auto d2 = eig_reference(laplacian(g, LaplacianKind::NormalizedRandomWalk));
  EXPECT_NEAR(d2.eigenvalues(0), -1.0, 1e-15);
  EXPECT_NEAR(d2.eigenvalues(1), 1.0, 1e-15);
}

TEST(EigReference, RingMatchesCirculantFormula) {
  for (int n : {3, 4, 5, 8, 12, 17}) {
    const auto dec = eig_reference(laplacian(generate_ring(n), LaplacianKind::Combinatorial));
    const auto want = testsupport::ring_spectrum(n);
    for (int i = 0; i < n; ++i) EXPECT_NEAR(dec.eigenvalues(i), want[static_cast<std::size_t>(i)], 1e-12) << n;
  }
  const auto c4 = eig_reference(laplacian(generate_ring(4), LaplacianKind::Combinatorial));
  EXPECT_NEAR(c4.eigenvalues(1), 2.0, 1e-12);
  EXPECT_NEAR(c4.eigenvalues(2), 2.0, 1e-12);
  EXPECT_NEAR(c4.eigenvalues(3), 4.0, 1e-12);
}

TEST(EigReference, TwelveRingHasSevenDistinctValues) {
  const auto dec = eig_reference(laplacian(generate_ring(12), LaplacianKind::Combinatorial));
  const auto distinct = distinct_values(dec.eigenvalues);
  ASSERT_EQ(distinct.size(), 7u);
  const double r3 = std::sqrt(3.0);
  const std::vector<double> want{0, 2 - r3, 1, 2, 3, 2 + r3, 4};
  for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(distinct[i], want[i], 1e-12);
  std::vector<int> mult(7, 0);
  for (int i = 0; i < 12; ++i) {
    for (std::size_t k = 0; k < 7; ++k) mult[k] += std::abs(dec.eigenvalues(i) - want[k]) < 1e-9 ? 1 : 0;
  }
  EXPECT_EQ(mult, (std::vector<int>{1, 2, 2, 2, 2, 2, 1}));
}

TEST(EigReference, ResidualInvariantsOnRandomGraphs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 29;
    const auto g = trial % 3 == 0 ? testsupport::random_tree(n, rng)
                                  : testsupport::random_connected_gnp(n, 0.25, rng);
    for (auto kind : {LaplacianKind::Combinatorial, LaplacianKind::NormalizedRandomWalk}) {
      const auto m = laplacian(g, kind);
      const auto dec = eig_reference(m);
      const double mn = m.entries.norm();
      for (int i = 0; i < n; ++i) {
        const auto u = dec.right.col(i);
        EXPECT_LE((m.entries * u - dec.eigenvalues(i) * u).norm(), 1e-10 * mn * u.norm());
      }
      EXPECT_LE((dec.left * dec.right - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-10);
      for (int i = 1; i < n; ++i) EXPECT_LE(dec.eigenvalues(i - 1), dec.eigenvalues(i));
      if (kind == LaplacianKind::Combinatorial) {
        EXPECT_LE(std::abs(dec.eigenvalues(0)), 1e-10);
        EXPECT_GT(dec.eigenvalues(1), 1e-10);
      } else {
        EXPECT_LE(dec.eigenvalues.cwiseAbs().maxCoeff(), 1.0 + 1e-10);
      }
    }
  }
}

TEST(EigReference, SignConventionAndDeterminism) {
  const auto m = laplacian(generate_ring(12), LaplacianKind::NormalizedRandomWalk);
  const auto a = eig_reference(m);
  const auto b = eig_reference(m);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
  EXPECT_EQ(a.right, b.right);
  for (int i = 0; i < 12; ++i) {
    const auto col = a.right.col(i);
    const double scale = col.cwiseAbs().maxCoeff();
    for (int r = 0; r < 12; ++r) {
      if (std::abs(col(r)) > 1e-12 * scale) {
        EXPECT_GT(col(r), 0.0);
        break;
      }
    }
  }
}

TEST(EigReference, RejectsNonSquare) {
  SystemMatrix<double> m{Eigen::MatrixXd::Zero(2, 3), LaplacianKind::Combinatorial};
  EXPECT_EQ(kind_of([&] { eig_reference(m); }), ErrorKind::DimensionMismatch);
}
