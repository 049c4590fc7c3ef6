// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "fsim/engine.hpp"
#include "fsim/io.hpp"

namespace fsim {
namespace {

LabeledDigraph parse(const std::string& edges, const std::string& labels) {
  std::istringstream e(edges), l(labels);
  return load_graph(e, l);
}

TEST(FormatScore, SixDecimals) {
  EXPECT_EQ(format_score(19.0 / 21.0), "0.904762");
  EXPECT_EQ(format_score(16.0 / 21.0), "0.761905");
  EXPECT_EQ(format_score(1.0), "1.000000");
  EXPECT_EQ(format_score(0.0), "0.000000");
}

TEST(WriteScores, SortedByInternalIdsWithExternalNames) {
  auto g1 = parse("b\ta\n", "b\tX\na\tY\n");
  auto g2 = parse("", "q\tX\np\tY\n");
  FSimConfig cfg;
  cfg.label_fn = LabelFn::kIndicator;
  cfg.theta = 1.0;
  auto r = iterate_to_convergence(g1, g2, cfg);
  std::ostringstream out;
  write_scores(out, r.scores, g1, g2);
  std::istringstream lines(out.str());
  std::string first, second, extra;
  std::getline(lines, first);
  std::getline(lines, second);
  EXPECT_EQ(first.substr(0, 4), "b\tq\t");
  EXPECT_EQ(second.substr(0, 4), "a\tp\t");
  EXPECT_FALSE(std::getline(lines, extra));
}

TEST(ReadScores, RoundTripsWrittenTables) {
  auto g1 = random_graph(20, 50, 3, 1);
  auto g2 = random_graph(18, 40, 3, 2);
  FSimConfig cfg;
  cfg.theta = 0.7;
  auto r = iterate_to_convergence(g1, g2, cfg);
  std::ostringstream out;
  RunManifest m;
  m.add("variant", "bj");
  m.write_header(out);
  write_scores(out, r.scores, g1, g2);
  std::istringstream in(out.str());
  auto t = read_scores(in, g1, g2);
  ASSERT_EQ(t.size(), r.scores.size());
  r.scores.for_each([&](NodeId u, NodeId v, double s) {
    ASSERT_TRUE(t.find(u, v).has_value());
    EXPECT_EQ(format_score(*t.find(u, v)), format_score(s));
  });
}

TEST(ReadScores, RejectsMalformedLines) {
  auto g = parse("", "a\tA\n");
  std::istringstream bad_fields("a\ta\n");
  EXPECT_THROW(read_scores(bad_fields, g, g), ParseError);
  std::istringstream bad_number("a\ta\tx1\n");
  EXPECT_THROW(read_scores(bad_number, g, g), ParseError);
  std::istringstream unknown("a\tz\t0.5\n");
  EXPECT_THROW(read_scores(unknown, g, g), ParseError);
}

TEST(ReadTruth, ResolvesNamesAndListsUnknowns) {
  auto g1 = parse("", "a\tA\nb\tB\n");
  auto g2 = parse("", "x\tA\ny\tB\n");
  std::istringstream ok("# truth\nb\ty\na\tx\n");
  auto pairs = read_truth(ok, g1, g2);
  EXPECT_EQ(pairs, (std::vector<std::pair<NodeId, NodeId>>{{1, 1}, {0, 0}}));
  std::istringstream bad("a\tx\nzz\tqq\n");
  try {
    read_truth(bad, g1, g2);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("zz"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("qq"), std::string::npos);
  }
}

TEST(ReadRelevance, Grades) {
  std::istringstream ok("a\t2\nb\t0\n");
  auto rel = read_relevance(ok);
  EXPECT_EQ(rel.at("a"), 2);
  EXPECT_EQ(rel.at("b"), 0);
  std::istringstream bad("a\t3\n");
  EXPECT_THROW(read_relevance(bad), ParseError);
}

TEST(FormatParam, ShortestRoundTrip) {
  EXPECT_EQ(format_param(0.4), "0.4");
  EXPECT_EQ(format_param(1e-8), "1e-08");
  EXPECT_EQ(std::stod(format_param(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(RunManifest, HeaderAndTsv) {
  RunManifest m;
  FSimConfig cfg;
  add_config(m, cfg);
  std::ostringstream h, t;
  m.write_header(h);
  m.write_tsv(t);
  EXPECT_NE(h.str().find("# variant\tbj\n"), std::string::npos);
  EXPECT_NE(h.str().find("# theta\t0\n"), std::string::npos);
  EXPECT_NE(h.str().find("# epsilon\t0.01\n"), std::string::npos);
  EXPECT_EQ(t.str().substr(0, 10), "key\tvalue\n");
  EXPECT_NE(t.str().find("beta\t0.5\n"), std::string::npos);
  EXPECT_EQ(h.str().find("workers"), std::string::npos);
  EXPECT_NE(t.str().find("workers\t1\n"), std::string::npos);
}

}  // namespace
}  // namespace fsim
