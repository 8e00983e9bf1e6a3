#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "abba_vsm/error.hpp"
#include "abba_vsm/quantizer.hpp"
#include "oracles.hpp"

using namespace abba;

namespace {

SegmentSequence seq_of(std::vector<Segment> segs, std::uint64_t id = 0) {
  SegmentSequence s;
  s.sample_id = id;
  std::int64_t total = 0;
  for (const auto& g : segs) total += g.len;
  s.segments = std::move(segs);
  s.original_length = total + 1;
  return s;
}

std::vector<Point2> random_points(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Point2> pts(n);
  for (auto& p : pts) p = {g(rng), g(rng)};
  return pts;
}

double dist2(const Point2& a, const Point2& b) {
  return (a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]);
}

}  // namespace

TEST(ClusterSorting, ThreePointSweep) {
  const std::vector<Point2> pts{{0.0, 0.0}, {0.1, 0.0}, {1.0, 1.0}};
  const auto c = cluster_sorting(pts, 0.5);
  ASSERT_EQ(c.centers.size(), 2u);
  EXPECT_DOUBLE_EQ(c.centers[0][0], 0.05);
  EXPECT_DOUBLE_EQ(c.centers[0][1], 0.0);
  EXPECT_EQ(c.centers[1], (Point2{1.0, 1.0}));
  EXPECT_EQ(c.assignment, (std::vector<std::size_t>{0, 0, 1}));
}

TEST(ClusterSorting, EveryMemberWithinToleranceOfItsSeed) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = random_points(rng, 200);
    const double ct = 0.05 + 0.5 * static_cast<double>(trial) / 50.0;
    const auto c = cluster_sorting(pts, ct);
    // Group diameter is at most 2 ct, so every member is within 2 ct of the
    // mean. Sizes are non-increasing by construction of the alphabet order.
    std::vector<std::size_t> sizes(c.centers.size(), 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      ASSERT_LT(c.assignment[i], c.centers.size());
      ++sizes[c.assignment[i]];
      EXPECT_LE(std::sqrt(dist2(pts[i], c.centers[c.assignment[i]])), 2 * ct + 1e-12);
    }
    EXPECT_TRUE(std::is_sorted(sizes.rbegin(), sizes.rend()));
    for (auto s : sizes) EXPECT_GT(s, 0u);
  }
}

TEST(ClusterKMeans, MatchesExhaustiveTwoPartition) {
  const std::vector<Point2> pts{{0.0, 0.0}, {0.0, 0.1}, {10.0, 10.0}, {10.0, 10.1}};
  const auto expect = oracle::best_two_partition({pts.begin(), pts.end()});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto c = cluster_kmeans(pts, 2, seed);
    ASSERT_EQ(c.centers.size(), 2u);
    std::sort(c.centers.begin(), c.centers.end());
    for (int g = 0; g < 2; ++g)
      for (int d = 0; d < 2; ++d) EXPECT_NEAR(c.centers[g][d], expect[g][d], 1e-12);
    EXPECT_NEAR(c.centers[0][1], 0.05, 1e-12);
    EXPECT_NEAR(c.centers[1][1], 10.05, 1e-12);
  }
}

TEST(ClusterKMeans, WellSeparatedRandomPairs) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 0.1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Point2> pts;
    const std::size_t n = 4 + rng() % 8;
    for (std::size_t i = 0; i < n; ++i) {
      const double off = i % 2 ? 5.0 : -5.0;
      pts.push_back({off + g(rng), g(rng)});
    }
    const auto expect = oracle::best_two_partition(pts);
    auto c = cluster_kmeans(pts, 2, rng());
    std::sort(c.centers.begin(), c.centers.end());
    for (int k = 0; k < 2; ++k)
      for (int d = 0; d < 2; ++d) EXPECT_NEAR(c.centers[k][d], expect[k][d], 1e-9);
  }
}

TEST(ClusterKMeans, KBoundedByDistinctPoints) {
  const std::vector<Point2> pts{{1, 1}, {1, 1}, {2, 2}, {1, 1}};
  const auto c = cluster_kmeans(pts, 5, 3);
  EXPECT_EQ(c.centers.size(), 2u);
  EXPECT_EQ(c.assignment[0], c.assignment[1]);
  EXPECT_EQ(c.assignment[0], 0u);  // bigger cluster first
  EXPECT_EQ(c.assignment[2], 1u);

  std::mt19937_64 rng(6);
  const auto many = random_points(rng, 100);
  for (int k = 1; k <= 8; ++k) EXPECT_LE(cluster_kmeans(many, k, 0).centers.size(), static_cast<std::size_t>(k));
}

TEST(ClusterKMeans, DeterministicForSeed) {
  std::mt19937_64 rng(1);
  const auto pts = random_points(rng, 300);
  const auto a = cluster_kmeans(pts, 6, 42);
  const auto b = cluster_kmeans(pts, 6, 42);
  EXPECT_EQ(a.centers, b.centers);
  EXPECT_EQ(a.assignment, b.assignment);
}

TEST(ClusterKMeans, AssignmentIsNearestCenterAtConvergence) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_points(rng, 150);
    const auto c = cluster_kmeans(pts, 2 + trial % 7, rng());
    for (std::size_t i = 0; i < pts.size(); ++i)
      EXPECT_EQ(nearest_center(c.centers, pts[i]), c.assignment[i]);
  }
}

TEST(FitCodebook, SingleSegmentEitherMethod) {
  const std::vector<SegmentSequence> seqs{seq_of({{4, 2.0}})};
  for (auto method : {ClusterMethod::SortingBased, ClusterMethod::KMeans}) {
    ClusteringParams p;
    p.method = method;
    const auto cb = fit_codebook(seqs, p);
    EXPECT_EQ(cb.size(), 1u);
    EXPECT_EQ(cb.alphabet, (std::vector<SymbolId>{0}));
    EXPECT_EQ(symbolize(seqs[0], cb).symbols, (std::vector<SymbolId>{0}));
  }
}

TEST(FitCodebook, PopulationSigmaAndConstantFallback) {
  // lens {1, 3}: population sigma 1. incs {2, 2}: sigma 0 -> 1.
  const std::vector<SegmentSequence> seqs{seq_of({{1, 2.0}, {3, 2.0}})};
  const auto cb = fit_codebook(seqs, {});
  EXPECT_DOUBLE_EQ(cb.sigma_len, 1.0);
  EXPECT_DOUBLE_EQ(cb.sigma_inc, 1.0);

  const std::vector<SegmentSequence> wide{seq_of({{2, 0.0}, {6, 4.0}, {4, -4.0}})};
  const auto cw = fit_codebook(wide, {});
  EXPECT_NEAR(cw.sigma_len, std::sqrt(8.0 / 3.0), 1e-15);
  EXPECT_NEAR(cw.sigma_inc, std::sqrt(32.0 / 3.0), 1e-15);
}

TEST(FitCodebook, Errors) {
  EXPECT_THROW(fit_codebook({}, {}), EmptyInputError);
  const std::vector<SegmentSequence> seqs{seq_of({{1, 1.0}})};
  ClusteringParams bad_ct;
  bad_ct.ct = 0.0;
  EXPECT_THROW(fit_codebook(seqs, bad_ct), InvalidParamsError);
  ClusteringParams bad_k;
  bad_k.method = ClusterMethod::KMeans;
  bad_k.csize = 0;
  EXPECT_THROW(fit_codebook(seqs, bad_k), InvalidParamsError);
  EXPECT_THROW(parse_cluster_method("dbscan"), InvalidParamsError);
  EXPECT_EQ(parse_cluster_method("k_means"), ClusterMethod::KMeans);
  EXPECT_EQ(parse_cluster_method("sorting_based"), ClusterMethod::SortingBased);
}

TEST(FitCodebook, ScalingTheDataDoesNotChangeSymbols) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::int64_t> len(1, 20);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<SegmentSequence> seqs, scaled;
  for (int i = 0; i < 20; ++i) {
    std::vector<Segment> segs, segs_scaled;
    for (int k = 0; k < 15; ++k) {
      const Segment s{len(rng), g(rng)};
      segs.push_back(s);
      segs_scaled.push_back({s.len, s.inc * 64.0});
    }
    seqs.push_back(seq_of(segs, i));
    scaled.push_back(seq_of(segs_scaled, i));
  }
  for (auto method : {ClusterMethod::SortingBased, ClusterMethod::KMeans}) {
    ClusteringParams p;
    p.method = method;
    p.ct = 0.3;
    const auto a = fit_codebook(seqs, p);
    const auto b = fit_codebook(scaled, p);
    EXPECT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < seqs.size(); ++i)
      EXPECT_EQ(symbolize(seqs[i], a).symbols, symbolize(scaled[i], b).symbols);
  }
}

TEST(Symbolize, NearestCenterAndTies) {
  Codebook cb;
  cb.centers = {{0.0, 0.0}, {10.0, 10.0}};
  cb.alphabet = {0, 1};
  EXPECT_EQ(nearest_center(cb.centers, {0.1, 0.2}), 0u);
  EXPECT_EQ(nearest_center(cb.centers, {5.0, 5.0}), 0u);
  EXPECT_EQ(nearest_center(cb.centers, {5.0, 5.0 + 1e-9}), 1u);

  Codebook tie;
  tie.centers = {{1.0, 5.0}, {1.0, -5.0}};
  tie.alphabet = {0, 1};
  EXPECT_EQ(symbolize(seq_of({{1, 0.0}}), tie).symbols[0], 0u);
  std::swap(tie.centers[0], tie.centers[1]);
  EXPECT_EQ(symbolize(seq_of({{1, 0.0}}), tie).symbols[0], 0u);
  EXPECT_EQ(symbolize(seq_of({{1, 0.5}}), tie).symbols[0], 1u);
}

TEST(Symbolize, FollowsTheFittedSortingCodebook) {
  // With sigma_len = 10 the segments (1,0), (1,0), (10,1) land on (0.1,0),
  // (0.1,0) and (1,1); the sorting sweep with ct 0.5 puts the first two
  // together in the bigger cluster.
  const std::vector<Point2> pts{{0.0, 0.0}, {0.1, 0.0}, {1.0, 1.0}};
  const auto fitted = cluster_sorting(pts, 0.5);
  Codebook cb;
  cb.sigma_len = 10.0;
  cb.sigma_inc = 1.0;
  cb.centers = fitted.centers;
  cb.alphabet = {0, 1};
  const auto s = symbolize(seq_of({{1, 0.0}, {1, 0.0}, {10, 1.0}}), cb);
  EXPECT_EQ(render_symbols(s.symbols), "aab");
}

TEST(Symbolize, TrainingSegmentsGetTheirClusterSymbol) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::int64_t> len(1, 30);
  std::normal_distribution<double> g(0.0, 2.0);
  std::vector<SegmentSequence> seqs;
  for (int i = 0; i < 10; ++i) {
    std::vector<Segment> segs;
    for (int k = 0; k < 30; ++k) segs.push_back({len(rng), g(rng)});
    seqs.push_back(seq_of(segs, i));
  }
  ClusteringParams p;
  p.method = ClusterMethod::KMeans;
  p.csize = 6;
  p.seed = 5;
  const auto cb = fit_codebook(seqs, p);
  std::vector<Point2> pooled;
  for (const auto& s : seqs)
    for (const auto& seg : s.segments) pooled.push_back(cb.normalize(seg));
  const auto c = cluster_kmeans(pooled, 6, 5);
  std::size_t k = 0;
  for (const auto& s : seqs)
    for (auto sym : symbolize(s, cb).symbols) EXPECT_EQ(sym, cb.alphabet[c.assignment[k++]]);
}

TEST(CenterIndex, AgreesWithBruteForce) {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 30; ++trial) {
    auto centers = random_points(rng, 1 + rng() % 400);
    // Duplicate some centers to exercise the tie rule.
    if (centers.size() > 3) centers[1] = centers[3];
    const CenterIndex index(centers);
    for (const auto& p : random_points(rng, 300)) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < centers.size(); ++i)
        if (dist2(p, centers[i]) < dist2(p, centers[best])) best = i;
      EXPECT_EQ(index.nearest(p), best);
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
      const auto got = index.nearest(centers[i]);
      EXPECT_EQ(dist2(centers[got], centers[i]), 0.0);
      EXPECT_LE(got, i);
    }
  }
}

TEST(RenderSymbol, Alphabet) {
  EXPECT_EQ(render_symbol(0), "a");
  EXPECT_EQ(render_symbol(25), "z");
  EXPECT_EQ(render_symbol(26), "A");
  EXPECT_EQ(render_symbol(51), "Z");
  EXPECT_EQ(render_symbol(52), "s52");
  std::set<std::string> seen;
  for (SymbolId i = 0; i < 200; ++i) EXPECT_TRUE(seen.insert(render_symbol(i)).second);
}
