// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "fsim/compat.hpp"
#include "fsim/graph.hpp"

namespace fsim {
namespace {

// Textbook SimRank on a dense matrix, written independently of the engine.
std::vector<std::vector<double>> textbook_simrank(const LabeledDigraph& g,
                                                  double c, std::size_t iters) {
  const auto n = g.num_nodes();
  std::vector<std::vector<NodeId>> in(n);
  for (const auto& e : g.edges()) in[e.dst].push_back(e.src);
  std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) s[a][a] = 1.0;
  for (std::size_t k = 0; k < iters; ++k) {
    auto next = s;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        if (in[a].empty() || in[b].empty()) {
          next[a][b] = 0.0;
          continue;
        }
        double total = 0.0;
        for (NodeId i : in[a]) {
          for (NodeId j : in[b]) total += s[i][j];
        }
        next[a][b] = c * total / static_cast<double>(in[a].size() * in[b].size());
      }
    }
    s = std::move(next);
  }
  return s;
}

CompatOptions fixed(std::size_t iters, double decay = 0.8) {
  CompatOptions o;
  o.decay = decay;
  o.max_iterations = iters;
  o.fixed_iterations = true;
  return o;
}

TEST(SimRank, NoInNeighborsScoresZeroAndDiagonalIsOne) {
  auto g = make_graph({"A", "A", "A"}, {{0, 1}, {0, 2}});
  auto r = run_simrank(g, CompatOptions{});
  for (NodeId u = 0; u < 3; ++u) EXPECT_EQ(*r.scores.find(u, u), 1.0);
  EXPECT_EQ(*r.scores.find(0, 1), 0.0);
  EXPECT_EQ(*r.scores.find(2, 0), 0.0);
}

TEST(SimRank, SharedInNeighborOneStep) {
  auto g = make_graph({"A", "A", "A"}, {{0, 1}, {0, 2}});
  auto r = run_simrank(g, fixed(1));
  EXPECT_NEAR(*r.scores.find(1, 2), 0.8, 1e-15);
}

TEST(SimRank, MatchesTextbookImplementation) {
  std::mt19937_64 rng(500);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = random_gnp_graph(1 + rng() % 30, 0.1, 1, rng);
    const std::size_t iters = 1 + rng() % 12;
    auto r = run_simrank(g, fixed(iters));
    auto ref = textbook_simrank(g, 0.8, iters);
    r.scores.for_each([&](NodeId u, NodeId v, double s) {
      EXPECT_NEAR(s, ref[u][v], 1e-12);
    });
  }
}

TEST(SimRank, SymmetricAndMonotone) {
  std::mt19937_64 rng(8);
  auto g = random_gnp_graph(20, 0.15, 1, rng);
  std::vector<double> prev;
  for (std::size_t k = 1; k <= 8; ++k) {
    auto r = run_simrank(g, fixed(k));
    const auto s = r.scores.scores();
    const std::size_t n = g.num_nodes();
    for (std::size_t u = 0; u < n; ++u) {
      for (std::size_t v = 0; v < n; ++v) EXPECT_EQ(s[u * n + v], s[v * n + u]);
    }
    if (!prev.empty()) {
      for (std::size_t i = 0; i < s.size(); ++i) EXPECT_GE(s[i], prev[i] - 1e-15);
    }
    prev.assign(s.begin(), s.end());
  }
}

TEST(SimRank, ConvergesWithinCap) {
  std::mt19937_64 rng(1);
  auto g = random_gnp_graph(25, 0.1, 1, rng);
  CompatOptions o;
  auto r = run_simrank(g, o);
  EXPECT_TRUE(r.report.converged);
  EXPECT_LE(r.report.iterations, o.cap());
  EXPECT_EQ(o.cap(), 26u);
}

TEST(CompatOptions, Validation) {
  CompatOptions o;
  o.decay = 1.0;
  EXPECT_THROW(o.validate(), ConfigError);
  o.decay = 0.5;
  o.workers = 0;
  EXPECT_THROW(o.validate(), ConfigError);
  EXPECT_THROW(parse_rolesim_normalizer("sum"), ConfigError);
}

TEST(RoleSim, InitialisationFromDegrees) {
  // Node 0 has degree 2, node 3 degree 8 (undirected).
  std::vector<Edge> e{{0, 1}, {2, 0}};
  for (NodeId v = 4; v < 12; ++v) e.push_back({3, v});
  auto g = make_graph(std::vector<std::string>(12, "A"), e);
  auto init = rolesim_initial_scores(g);
  EXPECT_DOUBLE_EQ(init[0 * 12 + 3], 0.25);
}

TEST(RoleSim, SelfSimilarityIsOneEveryIteration) {
  std::mt19937_64 rng(2);
  auto g = random_gnp_graph(12, 0.2, 1, rng);
  for (auto norm : {RoleSimNormalizer::kRootOfProduct, RoleSimNormalizer::kMax}) {
    for (std::size_t k = 1; k <= 5; ++k) {
      auto r = run_rolesim(g, norm, fixed(k));
      for (NodeId u = 0; u < g.num_nodes(); ++u) {
        EXPECT_NEAR(*r.scores.find(u, u), 1.0, 1e-12);
      }
    }
  }
}

// Automorphisms of a small graph's undirected view, by trying every
// permutation.
std::vector<std::vector<NodeId>> automorphisms(const LabeledDigraph& g) {
  const auto u = undirected_view(g);
  std::vector<NodeId> p(g.num_nodes());
  std::iota(p.begin(), p.end(), 0u);
  std::vector<std::vector<NodeId>> out;
  do {
    bool ok = true;
    for (NodeId a = 0; a < g.num_nodes() && ok; ++a) {
      for (NodeId b = 0; b < g.num_nodes() && ok; ++b) {
        ok = u.has_edge(a, b) == u.has_edge(p[a], p[b]);
      }
    }
    if (ok) out.push_back(p);
  } while (std::next_permutation(p.begin(), p.end()));
  return out;
}

TEST(RoleSim, AutomorphicNodesConvergeToOne) {
  auto path = make_graph({"A", "A", "A", "A"}, {{0, 1}, {1, 2}, {2, 3}});
  const auto autos = automorphisms(path);
  ASSERT_EQ(autos.size(), 2u);  // identity and reversal
  for (auto norm : {RoleSimNormalizer::kRootOfProduct, RoleSimNormalizer::kMax}) {
    CompatOptions o;
    o.epsilon = 1e-9;
    o.max_iterations = 200;
    auto r = run_rolesim(path, norm, o);
    ASSERT_TRUE(r.report.converged);
    for (const auto& p : autos) {
      for (NodeId a = 0; a < 4; ++a) {
        EXPECT_NEAR(*r.scores.find(a, p[a]), 1.0, 1e-9);
      }
    }
    EXPECT_LT(*r.scores.find(0, 1), 1.0 - 1e-3);
  }
}

TEST(RoleSim, LowerBoundForNonIsolatedPairs) {
  std::mt19937_64 rng(3);
  auto g = random_gnp_graph(14, 0.15, 1, rng);
  const double decay = 0.7;
  for (auto norm : {RoleSimNormalizer::kRootOfProduct, RoleSimNormalizer::kMax}) {
    CompatOptions o;
    o.decay = decay;
    auto r = run_rolesim(g, norm, o);
    r.scores.for_each([&](NodeId u, NodeId v, double s) {
      EXPECT_LE(s, 1.0);
      if (!undirected_neighbors(g, u).empty() && !undirected_neighbors(g, v).empty()) {
        EXPECT_GE(s, 1.0 - decay - 1e-12);
      }
    });
  }
}

TEST(RoleSim, DeterministicAcrossWorkers) {
  std::mt19937_64 rng(4);
  auto g = random_gnp_graph(40, 0.1, 1, rng);
  CompatOptions o;
  auto base = run_rolesim(g, RoleSimNormalizer::kMax, o);
  o.workers = 4;
  auto other = run_rolesim(g, RoleSimNormalizer::kMax, o);
  EXPECT_TRUE(std::equal(base.scores.scores().begin(), base.scores.scores().end(),
                         other.scores.scores().begin()));
}

TEST(KBisimEquivalence, LevelZeroIsLabelEquality) {
  auto g = make_graph({"A", "B", "A"}, {{0, 1}, {1, 2}});
  EXPECT_TRUE(verify_kbisim_theorem(g, 0));
}

TEST(KBisimEquivalence, ChainLevelOne) {
  auto g = make_graph({"A", "A", "A"}, {{0, 1}, {1, 2}});
  EXPECT_TRUE(verify_kbisim_theorem(g, 1));
  auto sig = kbisim_signatures(g, 1);
  EXPECT_EQ(sig.sig[0], sig.sig[1]);
  EXPECT_NE(sig.sig[0], sig.sig[2]);
}

TEST(KBisimEquivalence, RandomGraphs) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    auto g = random_gnp_graph(1 + rng() % 10, 0.2, 2, rng);
    for (std::size_t k = 0; k <= 3; ++k) {
      EXPECT_TRUE(kbisim_theorem_violations(g, k).empty()) << "k=" << k;
    }
  }
}

}  // namespace
}  // namespace fsim
