#include "objectkb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <queue>
#include <random>

#include <Eigen/Dense>

#include "objectkb/errors.hpp"
#include "objectkb/symbols.hpp"

namespace objectkb {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

int nearest_centroid(const std::vector<double>& point,
                     const std::vector<std::vector<double>>& centroids) {
  int best = 0;
  double best_d = sq_dist(point, centroids[0]);
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    double d = sq_dist(point, centroids[c]);
    if (d < best_d) {  // strict: ties keep the lowest index
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

std::vector<std::vector<double>> kmeanspp_init(const std::vector<std::vector<double>>& points,
                                               int k, std::mt19937_64& rng) {
  std::vector<std::vector<double>> centroids;
  std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
  centroids.push_back(points[first(rng)]);

  std::vector<double> d2(points.size());
  while (static_cast<int>(centroids.size()) < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, sq_dist(points[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t chosen;
    if (total <= 0.0) {
      chosen = first(rng);  // all points coincide with some centroid
    } else {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      double acc = 0.0;
      chosen = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        acc += d2[i];
        if (acc >= r) {
          chosen = i;
          break;
        }
      }
    }
    centroids.push_back(points[chosen]);
  }
  return centroids;
}

}  // namespace

namespace {

ClusterReport lloyd_run(const std::vector<std::vector<double>>& points, const KMeansParams& params,
                        std::mt19937_64& rng) {
  const std::size_t n = points.size();
  const std::size_t dim = points[0].size();

  ClusterReport report;
  report.centroids = kmeanspp_init(points, params.k, rng);
  report.assignments.assign(n, 0);

  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < params.max_iter; ++iter) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      report.assignments[i] = nearest_centroid(points[i], report.centroids);
      inertia += sq_dist(points[i], report.centroids[report.assignments[i]]);
    }

    // Repair empty clusters by stealing the point farthest from its centroid.
    std::vector<int> counts(params.k, 0);
    for (int a : report.assignments) ++counts[a];
    for (int c = 0; c < params.k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t farthest = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[report.assignments[i]] <= 1) continue;
        double d = sq_dist(points[i], report.centroids[report.assignments[i]]);
        if (d > far_d) {
          far_d = d;
          farthest = i;
        }
      }
      --counts[report.assignments[farthest]];
      report.assignments[farthest] = c;
      ++counts[c];
      report.centroids[c] = points[farthest];
      inertia = 0.0;  // recompute after repair
      for (std::size_t i = 0; i < n; ++i)
        inertia += sq_dist(points[i], report.centroids[report.assignments[i]]);
    }

    report.inertia_history.push_back(inertia);
    report.inertia = inertia;
    if (prev_inertia - inertia < params.rel_tol * std::max(prev_inertia, 1e-300) &&
        std::isfinite(prev_inertia))
      break;
    prev_inertia = inertia;

    for (int c = 0; c < params.k; ++c) {
      std::vector<double> mean(dim, 0.0);
      int count = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (report.assignments[i] != c) continue;
        for (std::size_t d = 0; d < dim; ++d) mean[d] += points[i][d];
        ++count;
      }
      if (count > 0) {
        for (double& m : mean) m /= count;
        report.centroids[c] = std::move(mean);
      }
    }
  }
  return report;
}

}  // namespace

ClusterReport kmeans(const std::vector<std::vector<double>>& points, const KMeansParams& params) {
  if (params.k < 1) throw NumericError("kmeans: k must be >= 1");
  if (points.size() < static_cast<std::size_t>(params.k))
    throw NumericError("kmeans: fewer points (" + std::to_string(points.size()) +
                       ") than clusters (" + std::to_string(params.k) + ")");

  // Lloyd only finds a local optimum, so restart from several seeded
  // k-means++ initializations and keep the lowest-inertia run.
  constexpr int kRestarts = 30;
  std::mt19937_64 rng(params.seed);
  ClusterReport best;
  for (int r = 0; r < kRestarts; ++r) {
    ClusterReport run = lloyd_run(points, params, rng);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  return best;
}

std::vector<std::vector<double>> geodesic_distances(const std::vector<std::vector<double>>& points,
                                                    int neighbors, bool bridge_components) {
  const std::size_t n = points.size();
  if (neighbors < 1) throw NumericError("geodesic_distances: neighbors must be >= 1");
  if (n < static_cast<std::size_t>(neighbors) + 1)
    throw NumericError("geodesic_distances: need at least neighbors+1 points");

  // Symmetrized k-NN adjacency with Euclidean edge weights.
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  auto add_edge = [&](std::size_t a, std::size_t b, double w) {
    for (const auto& [v, _] : adj[a])
      if (v == b) return;
    adj[a].push_back({b, w});
    adj[b].push_back({a, w});
  };
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> dists;
    dists.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) dists.push_back({sq_dist(points[i], points[j]), j});
    std::partial_sort(dists.begin(), dists.begin() + neighbors, dists.end());
    for (int k = 0; k < neighbors; ++k)
      add_edge(i, dists[k].second, std::sqrt(dists[k].first));
  }

  // Connected components; bridge with the minimal inter-component edge if asked.
  for (;;) {
    std::vector<int> comp(n, -1);
    int n_comp = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (comp[s] != -1) continue;
      std::vector<std::size_t> stack{s};
      comp[s] = n_comp;
      while (!stack.empty()) {
        std::size_t u = stack.back();
        stack.pop_back();
        for (const auto& [v, _] : adj[u])
          if (comp[v] == -1) {
            comp[v] = n_comp;
            stack.push_back(v);
          }
      }
      ++n_comp;
    }
    if (n_comp == 1) break;
    if (!bridge_components)
      throw NumericError("geodesic_distances: neighbor graph has " + std::to_string(n_comp) +
                         " disconnected components (use bridge_components to join them)");
    std::size_t best_a = 0, best_b = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (comp[i] == comp[j]) continue;
        double d = sq_dist(points[i], points[j]);
        if (d < best_d) {
          best_d = d;
          best_a = i;
          best_b = j;
        }
      }
    add_edge(best_a, best_b, std::sqrt(best_d));
  }

  // Dijkstra from every source.
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> d(n, std::numeric_limits<double>::infinity());
    d[s] = 0.0;
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    heap.push({0.0, s});
    while (!heap.empty()) {
      auto [du, u] = heap.top();
      heap.pop();
      if (du > d[u]) continue;
      for (const auto& [v, w] : adj[u])
        if (du + w < d[v]) {
          d[v] = du + w;
          heap.push({d[v], v});
        }
    }
    dist[s] = std::move(d);
  }
  // Enforce exact symmetry against floating-point path-order differences.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = std::min(dist[i][j], dist[j][i]);
      dist[i][j] = dist[j][i] = v;
    }
  return dist;
}

Embedding2D classical_mds_2d(const std::vector<std::vector<double>>& distances) {
  const std::size_t n = distances.size();
  if (n < 2) throw NumericError("classical_mds_2d: need at least 2 points");

  Eigen::MatrixXd d2(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d2(i, j) = distances[i][j] * distances[i][j];

  // B = -1/2 J D^2 J with centering J = I - 11^T/n.
  Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n) -
                      Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd b = -0.5 * j * d2 * j;
  b = 0.5 * (b + b.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(b);
  if (solver.info() != Eigen::Success) throw NumericError("classical_mds_2d: eigensolve failed");

  Embedding2D emb;
  // Eigenvalues come out ascending; take the top two, clamp negatives to 0.
  emb.lambda1 = std::max(0.0, solver.eigenvalues()(n - 1));
  emb.lambda2 = std::max(0.0, solver.eigenvalues()(n - 2));
  Eigen::VectorXd v1 = solver.eigenvectors().col(n - 1) * std::sqrt(emb.lambda1);
  Eigen::VectorXd v2 = solver.eigenvectors().col(n - 2) * std::sqrt(emb.lambda2);

  // Canonicalize eigenvector sign: first nonzero coordinate positive.
  for (auto* v : {&v1, &v2}) {
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs((*v)(i)) > 1e-12) {
        if ((*v)(i) < 0) *v = -*v;
        break;
      }
    }
  }

  emb.coords.resize(n);
  for (std::size_t i = 0; i < n; ++i) emb.coords[i] = {v1(i), v2(i)};
  return emb;
}

Embedding2D isomap_2d(const std::vector<std::vector<double>>& points, int neighbors,
                      bool bridge_components) {
  Embedding2D emb = classical_mds_2d(geodesic_distances(points, neighbors, bridge_components));
  emb.neighbors = neighbors;
  return emb;
}

namespace {

const std::vector<std::string> kPhysicalColumns = {
    "length_m", "width_m", "height_m", "flatness", "hollowness", "rigidity", "roughness_deg",
    "weight_g"};
const std::vector<std::string> kFunctionalColumns = {"support", "containment", "movability",
                                                     "blockage"};

}  // namespace

AnalysisResult analyze(const KnowledgeBase& kb, const AnalyzeParams& params) {
  if (kb.instances.empty()) throw ValidationError("analyze: knowledge base has no instances");

  FeatureMatrix matrix;
  switch (params.property_set) {
    case PropertySet::physical: matrix.column_names = kPhysicalColumns; break;
    case PropertySet::functional: matrix.column_names = kFunctionalColumns; break;
    case PropertySet::single:
      if (params.single_property.empty())
        throw ValidationError("analyze: single property name required");
      matrix.column_names = {params.single_property};
      break;
  }

  std::vector<const InstanceSymbols*> ordered;
  ordered.reserve(kb.instances.size());
  for (const auto& inst : kb.instances) ordered.push_back(&inst);
  std::sort(ordered.begin(), ordered.end(),
            [](const auto* a, const auto* b) { return a->instance_id < b->instance_id; });

  for (const auto* inst : ordered) {
    matrix.instance_ids.push_back(inst->instance_id);
    matrix.class_names.push_back(inst->class_name);
    std::vector<double> row;
    for (const auto& col : matrix.column_names) {
      auto it = inst->scalars.find(col);
      if (it == inst->scalars.end())
        throw ValidationError("analyze: instance " + inst->instance_id + " lacks scalar '" + col +
                              "'");
      row.push_back(it->second);
    }
    matrix.rows.push_back(std::move(row));
  }

  if (static_cast<int>(matrix.n_rows()) < params.neighbors + 1)
    throw NumericError("analyze: need more instances than neighbors");
  if (static_cast<int>(matrix.n_rows()) < params.k_clusters)
    throw NumericError("analyze: fewer instances than clusters");

  // Min-max standardize per column so no scalar dominates the metric.
  std::vector<std::vector<double>> scaled = matrix.rows;
  for (std::size_t c = 0; c < matrix.n_cols(); ++c) {
    double lo = scaled[0][c], hi = scaled[0][c];
    for (const auto& row : scaled) {
      lo = std::min(lo, row[c]);
      hi = std::max(hi, row[c]);
    }
    for (auto& row : scaled) row[c] = hi > lo ? (row[c] - lo) / (hi - lo) : 0.5;
  }

  AnalysisResult result;
  result.matrix = std::move(matrix);
  result.embedding = isomap_2d(scaled, params.neighbors, params.bridge_components);

  std::vector<std::vector<double>> coords;
  coords.reserve(result.embedding.coords.size());
  for (const auto& xy : result.embedding.coords) coords.push_back({xy[0], xy[1]});
  KMeansParams km;
  km.k = params.k_clusters;
  km.seed = params.seed;
  result.report = kmeans(coords, km);
  return result;
}

std::vector<int> numeric_class_labels(const FeatureMatrix& matrix) {
  std::vector<int> labels;
  std::vector<std::string> seen;
  for (const auto& name : matrix.class_names) {
    auto it = std::find(seen.begin(), seen.end(), name);
    if (it == seen.end()) {
      seen.push_back(name);
      labels.push_back(static_cast<int>(seen.size()) - 1);
    } else {
      labels.push_back(static_cast<int>(it - seen.begin()));
    }
  }
  return labels;
}

void export_csv(const AnalysisResult& result, const std::filesystem::path& csv_path,
                const std::vector<int>& class_labels) {
  std::ofstream out(csv_path);
  if (!out) throw IoError("cannot write CSV: " + csv_path.string());
  out << "instance_id,class_label,x,y,cluster\n";
  char buf[64];
  for (std::size_t i = 0; i < result.matrix.n_rows(); ++i) {
    std::string id = result.matrix.instance_ids[i];
    bool quote = id.find_first_of(",\"\n") != std::string::npos;
    if (quote) {
      std::string escaped = "\"";
      for (char ch : id) {
        if (ch == '"') escaped += '"';
        escaped += ch;
      }
      escaped += '"';
      id = escaped;
    }
    out << id << ',' << class_labels[i] << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", result.embedding.coords[i][0]);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.9g", result.embedding.coords[i][1]);
    out << buf << ',' << result.report.assignments[i] << '\n';
  }
}

void export_svg(const AnalysisResult& result, const std::filesystem::path& svg_path,
                const std::vector<int>& class_labels) {
  std::ofstream out(svg_path);
  if (!out) throw IoError("cannot write SVG: " + svg_path.string());

  static const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
                                   "#a65628", "#f781bf", "#999999", "#66c2a5", "#fc8d62"};
  constexpr int kSize = 640, kMargin = 40;

  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  if (!result.embedding.coords.empty()) {
    lo_x = hi_x = result.embedding.coords[0][0];
    lo_y = hi_y = result.embedding.coords[0][1];
    for (const auto& c : result.embedding.coords) {
      lo_x = std::min(lo_x, c[0]);
      hi_x = std::max(hi_x, c[0]);
      lo_y = std::min(lo_y, c[1]);
      hi_y = std::max(hi_y, c[1]);
    }
  }
  auto sx = [&](double x) {
    return hi_x > lo_x ? kMargin + (x - lo_x) / (hi_x - lo_x) * (kSize - 2 * kMargin) : kSize / 2.0;
  };
  auto sy = [&](double y) {
    return hi_y > lo_y ? kSize - kMargin - (y - lo_y) / (hi_y - lo_y) * (kSize - 2 * kMargin)
                       : kSize / 2.0;
  };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kSize << "\" height=\"" << kSize
      << "\">\n";
  for (std::size_t i = 0; i < result.embedding.coords.size(); ++i) {
    const char* color = kPalette[result.report.assignments[i] % 10];
    double x = sx(result.embedding.coords[i][0]);
    double y = sy(result.embedding.coords[i][1]);
    out << "  <circle cx=\"" << x << "\" cy=\"" << y << "\" r=\"6\" fill=\"" << color << "\"/>\n";
    out << "  <text x=\"" << x + 8 << "\" y=\"" << y + 4 << "\" font-size=\"11\">"
        << class_labels[i] << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace objectkb
