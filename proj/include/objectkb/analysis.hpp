#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace objectkb {

struct KnowledgeBase;

/// Instance-by-feature matrix, rows ordered by instance_id.
struct FeatureMatrix {
  std::vector<std::string> instance_ids;
  std::vector<std::string> class_names;
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> rows;

  std::size_t n_rows() const { return rows.size(); }
  std::size_t n_cols() const { return column_names.size(); }
};

struct ClusterReport {
  std::vector<int> assignments;             // per point, cluster id in [0, k)
  std::vector<std::vector<double>> centroids;
  double inertia = 0.0;
  std::vector<double> inertia_history;      // one entry per Lloyd iteration
};

struct Embedding2D {
  std::vector<std::array<double, 2>> coords;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int neighbors = 0;
};

struct KMeansParams {
  int k = 7;
  std::uint64_t seed = 42;
  int max_iter = 300;
  double rel_tol = 1e-9;
};

/// Lloyd's algorithm with k-means++ seeding. Empty clusters are repaired by
/// stealing the point farthest from its centroid; ties go to the lowest
/// centroid index. Inertia is non-increasing across iterations.
ClusterReport kmeans(const std::vector<std::vector<double>>& points, const KMeansParams& params);

/// Symmetric all-pairs geodesic distances over the k-NN graph (Dijkstra per
/// source). Throws NumericError when the graph is disconnected, unless
/// bridge_components is set, in which case components are joined by their
/// minimal Euclidean inter-component edge.
std::vector<std::vector<double>> geodesic_distances(const std::vector<std::vector<double>>& points,
                                                    int neighbors, bool bridge_components = false);

/// Classical MDS to 2-D: double-centered squared distances, top-2 eigenpairs,
/// negative eigenvalues clamped to 0. Axis signs are canonicalized so the
/// first nonzero coordinate of each axis is positive.
Embedding2D classical_mds_2d(const std::vector<std::vector<double>>& distances);

Embedding2D isomap_2d(const std::vector<std::vector<double>>& points, int neighbors,
                      bool bridge_components = false);

enum class PropertySet { physical, functional, single };

struct AnalyzeParams {
  PropertySet property_set = PropertySet::physical;
  std::string single_property;  // used when property_set == single
  int k_clusters = 7;
  int neighbors = 5;
  std::uint64_t seed = 42;
  bool bridge_components = false;
};

struct AnalysisResult {
  FeatureMatrix matrix;
  Embedding2D embedding;
  ClusterReport report;
};

/// Builds the feature matrix from the KB (min-max standardized per column),
/// embeds with Isomap, then clusters the 2-D coordinates.
AnalysisResult analyze(const KnowledgeBase& kb, const AnalyzeParams& params);

void export_csv(const AnalysisResult& result, const std::filesystem::path& csv_path,
                const std::vector<int>& class_labels);
void export_svg(const AnalysisResult& result, const std::filesystem::path& svg_path,
                const std::vector<int>& class_labels);

/// Numeric class labels in first-seen order of class_name (Table-style 0..N-1).
std::vector<int> numeric_class_labels(const FeatureMatrix& matrix);

}  // namespace objectkb
