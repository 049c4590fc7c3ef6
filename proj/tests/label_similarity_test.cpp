// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "fsim/graph.hpp"
#include "fsim/label_similarity.hpp"

namespace fsim {
namespace {

// Full-matrix Levenshtein.
std::size_t reference_edit(const std::string& a, const std::string& b) {
  std::vector<std::vector<std::size_t>> d(a.size() + 1,
                                          std::vector<std::size_t>(b.size() + 1));
  for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
  }
  return d[a.size()][b.size()];
}

// Jaro-Winkler written from the textbook definition, shorter string first.
double reference_jw(std::string s1, std::string s2) {
  if (s1 == s2) return 1.0;
  if (s1.size() > s2.size() || (s1.size() == s2.size() && s1 > s2)) {
    std::swap(s1, s2);
  }
  if (s1.empty()) return 0.0;
  const int window =
      std::max(0, static_cast<int>(std::max(s1.size(), s2.size())) / 2 - 1);
  std::vector<bool> used1(s1.size()), used2(s2.size());
  int m = 0;
  for (int i = 0; i < static_cast<int>(s1.size()); ++i) {
    const int lo = std::max(0, i - window);
    const int hi = std::min(static_cast<int>(s2.size()) - 1, i + window);
    for (int j = lo; j <= hi; ++j) {
      if (!used2[j] && s1[i] == s2[j]) {
        used1[i] = used2[j] = true;
        ++m;
        break;
      }
    }
  }
  if (m == 0) return 0.0;
  std::string a, b;
  for (std::size_t i = 0; i < s1.size(); ++i) if (used1[i]) a += s1[i];
  for (std::size_t j = 0; j < s2.size(); ++j) if (used2[j]) b += s2[j];
  int half = 0;
  for (std::size_t i = 0; i < a.size(); ++i) half += a[i] != b[i];
  const double t = half / 2.0;
  const double jaro = (m / static_cast<double>(s1.size()) +
                       m / static_cast<double>(s2.size()) + (m - t) / m) /
                      3.0;
  int l = 0;
  while (l < 4 && l < static_cast<int>(s1.size()) && s1[l] == s2[l]) ++l;
  return jaro + l * 0.1 * (1.0 - jaro);
}

std::vector<std::string> small_corpus() {
  std::vector<std::string> out{""};
  const std::string alphabet = "abc";
  std::vector<std::string> frontier{""};
  for (int len = 1; len <= 3; ++len) {
    std::vector<std::string> next;
    for (const auto& s : frontier) {
      for (char c : alphabet) next.push_back(s + c);
    }
    out.insert(out.end(), next.begin(), next.end());
    frontier = next;
  }
  return out;
}

std::string random_string(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(0, 9), ch(0, 4);
  std::string s(static_cast<std::size_t>(len(rng)), 'a');
  for (auto& c : s) c = static_cast<char>('a' + ch(rng));
  return s;
}

TEST(Indicator, IdentityAndDistinct) {
  EXPECT_EQ(label_sim(LabelFn::kIndicator, "A", "A"), 1.0);
  EXPECT_EQ(label_sim(LabelFn::kIndicator, "A", "B"), 0.0);
}

TEST(NormalizedEdit, KittenSitting) {
  EXPECT_EQ(edit_distance("kitten", "sitting"), reference_edit("kitten", "sitting"));
  EXPECT_NEAR(label_sim(LabelFn::kEdit, "kitten", "sitting"), 1.0 - 3.0 / 7.0, 1e-12);
  EXPECT_NEAR(label_sim(LabelFn::kEdit, "kitten", "sitting"), 0.5714, 1e-4);
}

TEST(NormalizedEdit, BothEmptyIsOne) {
  EXPECT_EQ(normalized_edit_similarity("", ""), 1.0);
}

TEST(NormalizedEdit, MatchesReferenceOnRandomPairs) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 2000; ++i) {
    auto a = random_string(rng), b = random_string(rng);
    EXPECT_EQ(edit_distance(a, b), reference_edit(a, b)) << a << " / " << b;
  }
}

TEST(JaroWinkler, DwayneDuane) {
  EXPECT_NEAR(reference_jw("DWAYNE", "DUANE"), 0.84, 1e-12);
  EXPECT_NEAR(label_sim(LabelFn::kJaroWinkler, "DWAYNE", "DUANE"), 0.84, 1e-12);
}

TEST(JaroWinkler, ClassicValues) {
  EXPECT_NEAR(jaro_winkler_similarity("MARTHA", "MARHTA"), 0.961111, 1e-6);
  EXPECT_NEAR(jaro_winkler_similarity("DIXON", "DICKSONX"), 0.813333, 1e-6);
}

TEST(JaroWinkler, MatchesReferenceOnRandomPairs) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 2000; ++i) {
    auto a = random_string(rng), b = random_string(rng);
    if (a == b) continue;
    EXPECT_NEAR(jaro_winkler_similarity(a, b), reference_jw(a, b), 1e-12)
        << a << " / " << b;
  }
}

class LabelFnProperties : public ::testing::TestWithParam<LabelFn> {};

TEST_P(LabelFnProperties, DefinitenessOverSmallAlphabet) {
  const auto corpus = small_corpus();
  for (const auto& a : corpus) {
    for (const auto& b : corpus) {
      const double s = label_sim(GetParam(), a, b);
      EXPECT_EQ(s == 1.0, a == b) << a << " / " << b;
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0);
    }
  }
}

TEST_P(LabelFnProperties, SymmetricOnRandomPairs) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 3000; ++i) {
    auto a = random_string(rng), b = random_string(rng);
    EXPECT_EQ(label_sim(GetParam(), a, b), label_sim(GetParam(), b, a))
        << a << " / " << b;
  }
}

INSTANTIATE_TEST_SUITE_P(AllFunctions, LabelFnProperties,
                         ::testing::Values(LabelFn::kIndicator, LabelFn::kEdit,
                                           LabelFn::kJaroWinkler));

TEST(LabelFnNames, RoundTrip) {
  for (auto fn : {LabelFn::kIndicator, LabelFn::kEdit, LabelFn::kJaroWinkler}) {
    EXPECT_EQ(parse_label_fn(to_string(fn)), fn);
  }
  EXPECT_EQ(to_string(LabelFn::kJaroWinkler), "jw");
  EXPECT_THROW(parse_label_fn("cosine"), ConfigError);
}

TEST(LabelSimMatrix, AgreesWithDirectEvaluation) {
  auto g1 = make_graph({"alpha", "beta", "", "alpha"}, {});
  auto g2 = make_graph({"alpine", "beta", "gamma"}, {});
  for (auto fn : {LabelFn::kIndicator, LabelFn::kEdit, LabelFn::kJaroWinkler}) {
    LabelSimMatrix m(fn, g1, g2);
    for (NodeId u = 0; u < g1.num_nodes(); ++u) {
      for (NodeId v = 0; v < g2.num_nodes(); ++v) {
        EXPECT_EQ(m(g1.label(u), g2.label(v)),
                  label_sim(fn, g1.label_name(u), g2.label_name(v)));
      }
    }
  }
}

}  // namespace
}  // namespace fsim
