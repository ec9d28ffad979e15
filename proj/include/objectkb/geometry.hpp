#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace objectkb {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

/// Pre-segmented object point cloud, meters.
struct PointCloud {
  std::vector<Point3> points;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Axis-aligned extents; length >= width by convention.
struct BoundingBox {
  double length_m = 0.0;
  double width_m = 0.0;
  double height_m = 0.0;
};

/// Plane n.p = d with unit normal.
struct PlaneModel {
  double nx = 0.0;
  double ny = 0.0;
  double nz = 1.0;
  double d = 0.0;
  std::size_t inlier_count = 0;
  double inlier_threshold_m = 0.0;
};

struct FlatnessResult {
  double ratio = 0.0;      // inliers / cloud size, in [0, 1]
  bool plane_found = false;  // false when no near-horizontal plane exists
};

struct RansacParams {
  double threshold_m = 0.005;
  int iterations = 500;
  std::uint64_t seed = 42;
};

BoundingBox bounding_box(const PointCloud& cloud);

/// Best-of-N three-point RANSAC plane fit. Deterministic for a fixed seed.
/// When min_abs_nz > 0 only hypotheses with |nz| >= min_abs_nz are kept.
PlaneModel ransac_plane(const PointCloud& cloud, const RansacParams& params,
                        double min_abs_nz = 0.0);

/// Share of cloud points lying on the dominant near-horizontal plane.
FlatnessResult flatness_ratio(const PointCloud& top_cloud, const RansacParams& params);

/// Hollowness from marker heights: internal depth over object height, clamped to [0, 1].
double marker_depth_ratio(double rim_top_z_m, double marker_internal_z_m,
                          double marker_reference_z_m);

PointCloud merge(const PointCloud& a, const PointCloud& b);

}  // namespace objectkb
