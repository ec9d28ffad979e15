#include "objectkb/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "objectkb/errors.hpp"

namespace objectkb {

BoundingBox bounding_box(const PointCloud& cloud) {
  if (cloud.empty()) throw ValidationError("bounding_box: empty cloud");
  double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
  double min_y = min_x, max_y = max_x;
  double min_z = min_x, max_z = max_x;
  for (const auto& p : cloud.points) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
    min_z = std::min(min_z, p.z);
    max_z = std::max(max_z, p.z);
  }
  double ext_x = max_x - min_x;
  double ext_y = max_y - min_y;
  BoundingBox box;
  box.length_m = std::max(ext_x, ext_y);
  box.width_m = std::min(ext_x, ext_y);
  box.height_m = max_z - min_z;
  return box;
}

namespace {

struct PlaneHypothesis {
  double nx, ny, nz, d;
};

bool plane_through(const Point3& a, const Point3& b, const Point3& c, PlaneHypothesis& out) {
  double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
  double vx = c.x - a.x, vy = c.y - a.y, vz = c.z - a.z;
  double nx = uy * vz - uz * vy;
  double ny = uz * vx - ux * vz;
  double nz = ux * vy - uy * vx;
  double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
  if (norm < 1e-12) return false;  // collinear sample
  out = {nx / norm, ny / norm, nz / norm, 0.0};
  out.d = out.nx * a.x + out.ny * a.y + out.nz * a.z;
  return true;
}

std::size_t count_inliers(const PointCloud& cloud, const PlaneHypothesis& h, double threshold) {
  std::size_t n = 0;
  for (const auto& p : cloud.points) {
    double dist = std::abs(h.nx * p.x + h.ny * p.y + h.nz * p.z - h.d);
    if (dist <= threshold) ++n;
  }
  return n;
}

}  // namespace

PlaneModel ransac_plane(const PointCloud& cloud, const RansacParams& params, double min_abs_nz) {
  if (cloud.size() < 3) throw NumericError("ransac_plane: need at least 3 points");
  if (params.threshold_m <= 0.0) throw ValidationError("ransac_plane: threshold must be > 0");

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, cloud.size() - 1);

  bool found = false;
  PlaneHypothesis best{};
  std::size_t best_inliers = 0;
  for (int i = 0; i < params.iterations; ++i) {
    std::size_t a = pick(rng), b = pick(rng), c = pick(rng);
    if (a == b || b == c || a == c) continue;
    PlaneHypothesis h;
    if (!plane_through(cloud.points[a], cloud.points[b], cloud.points[c], h)) continue;
    if (std::abs(h.nz) < min_abs_nz) continue;
    std::size_t inliers = count_inliers(cloud, h, params.threshold_m);
    if (inliers > best_inliers) {
      best = h;
      best_inliers = inliers;
      found = true;
    }
  }
  if (!found) throw NumericError("ransac_plane: no valid plane hypothesis found");

  PlaneModel model;
  model.nx = best.nx;
  model.ny = best.ny;
  model.nz = best.nz;
  model.d = best.d;
  model.inlier_count = best_inliers;
  model.inlier_threshold_m = params.threshold_m;
  return model;
}

FlatnessResult flatness_ratio(const PointCloud& top_cloud, const RansacParams& params) {
  FlatnessResult result;
  if (top_cloud.size() < 3) return result;  // too few points to fit any plane
  try {
    // |nz| >= 0.9 restricts the search to the top-level plane.
    PlaneModel plane = ransac_plane(top_cloud, params, 0.9);
    result.ratio = static_cast<double>(plane.inlier_count) / static_cast<double>(top_cloud.size());
    result.plane_found = true;
  } catch (const NumericError&) {
    // No near-horizontal plane: minimal flatness, not an error (spheres).
  }
  return result;
}

double marker_depth_ratio(double rim_top_z_m, double marker_internal_z_m,
                          double marker_reference_z_m) {
  if (rim_top_z_m <= marker_reference_z_m)
    throw ValidationError("marker_depth_ratio: rim top must be above the table reference");
  double depth = rim_top_z_m - marker_internal_z_m;
  double height = rim_top_z_m - marker_reference_z_m;
  return std::clamp(depth / height, 0.0, 1.0);
}

PointCloud merge(const PointCloud& a, const PointCloud& b) {
  PointCloud out = a;
  out.points.insert(out.points.end(), b.points.begin(), b.points.end());
  return out;
}

}  // namespace objectkb
