#include "abba_vsm/quantizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "abba_vsm/error.hpp"
#include "abba_vsm/rng.hpp"

namespace abba {

namespace {

double sq_dist(const Point2& a, const Point2& b) {
  const double dx = a[0] - b[0];
  const double dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

double population_sd(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n);
  return (sd > 0.0 && std::isfinite(sd)) ? sd : 1.0;
}

// Reorders clusters by descending size, ties by the first point (in input
// order) that belongs to them. Empty clusters are dropped.
Clustering order_by_size(std::vector<Point2> centers, std::vector<std::size_t> assignment) {
  const std::size_t k = centers.size();
  std::vector<std::size_t> count(k, 0);
  std::vector<std::size_t> first(k, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const auto c = assignment[i];
    ++count[c];
    first[c] = std::min(first[c], i);
  }
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < k; ++c)
    if (count[c] > 0) order.push_back(c);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (count[a] != count[b]) return count[a] > count[b];
    return first[a] < first[b];
  });
  std::vector<std::size_t> rank(k, 0);
  Clustering out;
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[order[r]] = r;
    out.centers.push_back(centers[order[r]]);
  }
  out.assignment.reserve(assignment.size());
  for (auto c : assignment) out.assignment.push_back(rank[c]);
  return out;
}

}  // namespace

const char* to_string(ClusterMethod m) {
  return m == ClusterMethod::SortingBased ? "sorting_based" : "k_means";
}

ClusterMethod parse_cluster_method(const std::string& name) {
  if (name == "sorting_based" || name == "sorting") return ClusterMethod::SortingBased;
  if (name == "k_means" || name == "kmeans") return ClusterMethod::KMeans;
  throw InvalidParamsError("unknown clustering method '" + name + "'");
}

Point2 Codebook::normalize(const Segment& s) const {
  return {static_cast<double>(s.len) / sigma_len, s.inc / sigma_inc};
}

Clustering cluster_sorting(std::span<const Point2> points, double ct) {
  if (!(ct > 0.0) || !std::isfinite(ct)) throw InvalidParamsError("clustering tolerance must be positive");
  if (points.empty()) throw EmptyInputError("no points to cluster");

  const std::size_t n = points.size();
  std::vector<double> norm(n);
  for (std::size_t i = 0; i < n; ++i) norm[i] = std::hypot(points[i][0], points[i][1]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return norm[a] < norm[b]; });

  constexpr auto kUnassigned = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> assignment(n, kUnassigned);
  std::vector<Point2> centers;
  const double ct2 = ct * ct;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t seed = order[pos];
    if (assignment[seed] != kUnassigned) continue;
    const std::size_t label = centers.size();
    assignment[seed] = label;
    Point2 sum = points[seed];
    std::size_t members = 1;
    for (std::size_t q = pos + 1; q < n; ++q) {
      const std::size_t j = order[q];
      if (norm[j] - norm[seed] > ct) break;
      if (assignment[j] != kUnassigned) continue;
      if (sq_dist(points[j], points[seed]) <= ct2) {
        assignment[j] = label;
        sum[0] += points[j][0];
        sum[1] += points[j][1];
        ++members;
      }
    }
    centers.push_back({sum[0] / static_cast<double>(members), sum[1] / static_cast<double>(members)});
  }
  return order_by_size(std::move(centers), std::move(assignment));
}

Clustering cluster_kmeans(std::span<const Point2> points, int csize, std::uint64_t seed) {
  if (csize < 1) throw InvalidParamsError("cluster count must be at least 1");
  if (points.empty()) throw EmptyInputError("no points to cluster");

  // Distinct points in first-occurrence order.
  std::vector<Point2> distinct;
  {
    std::vector<Point2> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<bool> taken(sorted.size(), false);
    for (const auto& p : points) {
      const auto idx = static_cast<std::size_t>(
          std::lower_bound(sorted.begin(), sorted.end(), p) - sorted.begin());
      if (!taken[idx]) {
        taken[idx] = true;
        distinct.push_back(p);
      }
    }
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(csize), distinct.size());

  SplitMix64 rng(seed);
  std::vector<Point2> centers;
  centers.reserve(k);
  centers.push_back(distinct[rng.below(distinct.size())]);
  std::vector<double> closest(distinct.size(), std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    std::size_t best = 0;
    double best_d = -1.0;
    for (std::size_t i = 0; i < distinct.size(); ++i) {
      closest[i] = std::min(closest[i], sq_dist(distinct[i], centers.back()));
      if (closest[i] > best_d) {
        best_d = closest[i];
        best = i;
      }
    }
    centers.push_back(distinct[best]);
  }

  const std::size_t n = points.size();
  std::vector<std::size_t> assignment(n);
  for (std::size_t i = 0; i < n; ++i) assignment[i] = nearest_center(centers, points[i]);

  for (int iter = 0; iter < kMaxKMeansIterations; ++iter) {
    std::vector<Point2> sums(k, Point2{0.0, 0.0});
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums[assignment[i]][0] += points[i][0];
      sums[assignment[i]][1] += points[i][1];
      ++counts[assignment[i]];
    }
    for (std::size_t c = 0; c < k; ++c)
      if (counts[c] > 0)
        centers[c] = {sums[c][0] / static_cast<double>(counts[c]),
                      sums[c][1] / static_cast<double>(counts[c])};

    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = nearest_center(centers, points[i]);
      if (c != assignment[i]) {
        assignment[i] = c;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return order_by_size(std::move(centers), std::move(assignment));
}

Codebook fit_codebook(std::span<const SegmentSequence> seqs, const ClusteringParams& params) {
  std::vector<double> lens, incs;
  for (const auto& s : seqs)
    for (const auto& seg : s.segments) {
      lens.push_back(static_cast<double>(seg.len));
      incs.push_back(seg.inc);
    }
  if (lens.empty()) throw EmptyInputError("no segments to fit a codebook on");
  if (params.method == ClusterMethod::SortingBased && !(params.ct > 0.0))
    throw InvalidParamsError("clustering tolerance must be positive");
  if (params.method == ClusterMethod::KMeans && params.csize < 1)
    throw InvalidParamsError("cluster count must be at least 1");

  Codebook cb;
  // Only the active method's parameters are kept, so a codebook compares
  // equal to its serialized form.
  cb.params.method = params.method;
  if (params.method == ClusterMethod::SortingBased) {
    cb.params.ct = params.ct;
  } else {
    cb.params.csize = params.csize;
    cb.params.seed = params.seed;
  }
  cb.sigma_len = population_sd(lens);
  cb.sigma_inc = population_sd(incs);

  std::vector<Point2> points(lens.size());
  for (std::size_t i = 0; i < lens.size(); ++i) points[i] = {lens[i] / cb.sigma_len, incs[i] / cb.sigma_inc};

  Clustering c = params.method == ClusterMethod::SortingBased
                     ? cluster_sorting(points, params.ct)
                     : cluster_kmeans(points, params.csize, params.seed);
  cb.centers = std::move(c.centers);
  cb.alphabet.resize(cb.centers.size());
  std::iota(cb.alphabet.begin(), cb.alphabet.end(), SymbolId{0});
  return cb;
}

std::size_t nearest_center(std::span<const Point2> centers, const Point2& p) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = sq_dist(centers[c], p);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

CenterIndex::CenterIndex(std::span<const Point2> centers) {
  const std::size_t k = centers.size();
  std::vector<double> norm(k);
  for (std::size_t i = 0; i < k; ++i) norm[i] = std::hypot(centers[i][0], centers[i][1]);
  original_.resize(k);
  std::iota(original_.begin(), original_.end(), 0);
  std::stable_sort(original_.begin(), original_.end(),
                   [&](std::size_t a, std::size_t b) { return norm[a] < norm[b]; });
  for (auto i : original_) {
    centers_.push_back(centers[i]);
    norms_.push_back(norm[i]);
  }
}

std::size_t CenterIndex::nearest(const Point2& p) const {
  const double pn = std::hypot(p[0], p[1]);
  const std::size_t k = centers_.size();
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_d2 = std::numeric_limits<double>::infinity();
  double best_d = std::numeric_limits<double>::infinity();
  const auto visit = [&](std::size_t pos) {
    const double d2 = sq_dist(centers_[pos], p);
    const std::size_t idx = original_[pos];
    if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
      best_d2 = d2;
      best_d = std::sqrt(d2);
      best = idx;
    }
  };
  // Walk outward from the first center whose norm is >= |p|. A center whose
  // norm differs from |p| by more than the best distance cannot be closer.
  // The slack keeps exact ties reachable despite rounding in the norms.
  const auto mid = static_cast<std::size_t>(
      std::lower_bound(norms_.begin(), norms_.end(), pn) - norms_.begin());
  const auto slack = [&] { return best_d * (1.0 + 1e-9) + 1e-12; };
  std::size_t hi = mid;
  std::size_t lo = mid;
  bool hi_open = hi < k;
  bool lo_open = lo > 0;
  while (hi_open || lo_open) {
    if (hi_open) {
      if (norms_[hi] - pn > slack()) hi_open = false;
      else {
        visit(hi);
        hi_open = ++hi < k;
      }
    }
    if (lo_open) {
      if (pn - norms_[lo - 1] > slack()) lo_open = false;
      else {
        visit(lo - 1);
        lo_open = --lo > 0;
      }
    }
  }
  return best;
}

SymbolString symbolize(const SegmentSequence& seq, const Codebook& cb, const CenterIndex& index) {
  SymbolString out;
  out.sample_id = seq.sample_id;
  out.label = seq.label;
  out.symbols.reserve(seq.segments.size());
  for (const auto& seg : seq.segments) out.symbols.push_back(cb.alphabet[index.nearest(cb.normalize(seg))]);
  return out;
}

SymbolString symbolize(const SegmentSequence& seq, const Codebook& cb) {
  return symbolize(seq, cb, CenterIndex(cb.centers));
}

std::string render_symbol(SymbolId id) {
  if (id < 26) return std::string(1, static_cast<char>('a' + id));
  if (id < 52) return std::string(1, static_cast<char>('A' + (id - 26)));
  return "s" + std::to_string(id);
}

std::string render_symbols(std::span<const SymbolId> symbols) {
  std::string out;
  for (auto s : symbols) out += render_symbol(s);
  return out;
}

}  // namespace abba
