#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abba_vsm/reducer.hpp"

namespace abba {

using Point2 = std::array<double, 2>;
using SymbolId = std::uint32_t;

enum class ClusterMethod { SortingBased, KMeans };

const char* to_string(ClusterMethod m);
ClusterMethod parse_cluster_method(const std::string& name);

struct ClusteringParams {
  ClusterMethod method = ClusterMethod::SortingBased;
  /// Sorting-based radius in normalized space.
  double ct = 0.1;
  /// k-means upper bound on k.
  int csize = 5;
  std::uint64_t seed = 0;

  friend bool operator==(const ClusteringParams&, const ClusteringParams&) = default;
};

struct Codebook {
  double sigma_len = 1.0;
  double sigma_inc = 1.0;
  /// Ordered by descending cluster size; centers[i] carries alphabet[i].
  std::vector<Point2> centers;
  std::vector<SymbolId> alphabet;
  ClusteringParams params;

  std::size_t size() const { return centers.size(); }
  Point2 normalize(const Segment& s) const;

  friend bool operator==(const Codebook&, const Codebook&) = default;
};

struct SymbolString {
  std::uint64_t sample_id = 0;
  std::optional<std::string> label;
  std::vector<SymbolId> symbols;

  friend bool operator==(const SymbolString&, const SymbolString&) = default;
};

/// Result of clustering a point set: centers plus, for every input point,
/// the index of its cluster. Clusters are already in alphabet order.
struct Clustering {
  std::vector<Point2> centers;
  std::vector<std::size_t> assignment;
};

/// Sorting-based aggregation. Points are visited by ascending 2-norm; the
/// first unassigned point seeds a group which absorbs every unassigned point
/// within `ct` of the seed. The scan stops once the norm gap exceeds `ct`.
/// Centers are member means.
Clustering cluster_sorting(std::span<const Point2> points, double ct);

/// Lloyd's algorithm with k = min(csize, distinct points). The first center
/// is a seeded draw among distinct points, the rest are chosen greedily as
/// the farthest point from those already picked. At most 300 iterations;
/// stops as soon as assignments repeat.
Clustering cluster_kmeans(std::span<const Point2> points, int csize, std::uint64_t seed);

inline constexpr int kMaxKMeansIterations = 300;

/// Pools every segment of `seqs`, scales len and inc by their population
/// standard deviations (1 when a deviation is 0) and clusters the points.
Codebook fit_codebook(std::span<const SegmentSequence> seqs, const ClusteringParams& params);

/// Index of the nearest center; ties go to the lower index.
std::size_t nearest_center(std::span<const Point2> centers, const Point2& p);

/// Exact nearest-center lookup with the same tie rule as nearest_center(),
/// pruned by center norm so large codebooks stay cheap.
class CenterIndex {
 public:
  explicit CenterIndex(std::span<const Point2> centers);
  std::size_t nearest(const Point2& p) const;

 private:
  std::vector<Point2> centers_;
  std::vector<double> norms_;          // ascending
  std::vector<std::size_t> original_;  // position -> index into the input
};

SymbolString symbolize(const SegmentSequence& seq, const Codebook& cb);
SymbolString symbolize(const SegmentSequence& seq, const Codebook& cb, const CenterIndex& index);

/// a-z, then A-Z, then s52, s53, ...
std::string render_symbol(SymbolId id);
std::string render_symbols(std::span<const SymbolId> symbols);

}  // namespace abba
