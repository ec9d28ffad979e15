#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "objectkb/geometry.hpp"

namespace objectkb {

enum class Shape { box, open_box, cylinder, open_cylinder, sphere, sheet };

std::string to_string(Shape shape);
Shape shape_from_string(const std::string& name);

struct Material {
  double stiffness_mm = 0.0;  // press deformation under the effort threshold
  double friction_mu = 0.5;
  double density_g_cm3 = 1.0;
};

/// Parametric stand-in for one physical object instance.
struct ObjectSpec {
  std::string id;
  std::string class_name;
  Shape shape = Shape::box;
  double length_m = 0.1;
  double width_m = 0.1;
  double height_m = 0.1;
  double wall_m = 0.0;  // wall thickness, open shapes only
  double base_m = 0.0;  // base thickness, open shapes only
  Material material;
  double noise_sigma_m = 0.0;

  void validate() const;  // throws ValidationError
  bool is_open() const { return shape == Shape::open_box || shape == Shape::open_cylinder; }
};

/// Raw per-instance feature data, one record per measured object.
struct MeasurementRecord {
  std::string instance_id;
  std::string class_name;
  PointCloud top_cloud;
  PointCloud side_cloud;
  double marker_reference_z_m = 0.0;
  double marker_internal_z_m = 0.0;
  double rim_top_z_m = 0.0;
  double press_contact_z_m = 0.0;
  double press_stop_z_m = 0.0;
  double slide_angle_deg = 0.0;
  double weight_g = 0.0;

  void validate() const;  // throws ValidationError naming the violated constraint
};

inline constexpr double kRampStepDeg = 0.5;
inline constexpr double kPressHeightLimitM = 0.20;

struct ViewPair {
  PointCloud top;
  PointCloud side;
};

/// Orthographic top (+z) and side (+x) views of the object in its natural pose,
/// openings upward, base on the z=0 table plane.
ViewPair simulate_views(const ObjectSpec& spec, int points_per_view, std::uint64_t seed);

/// Vertical press: arm height at first contact and at the effort threshold.
std::pair<double, double> simulate_press(const ObjectSpec& spec);

/// Ramp angle at slide onset, quantized to kRampStepDeg. Spheres roll; they throw.
double simulate_ramp(const ObjectSpec& spec);

double simulate_scale(const ObjectSpec& spec);  // grams, 1 g resolution

double shell_volume_m3(const ObjectSpec& spec);

/// Full measurement of one object. Spheres get the smallest nonzero ramp step
/// as their slide angle (they roll off almost immediately).
MeasurementRecord simulate_record(const ObjectSpec& spec, int points_per_view,
                                  std::uint64_t seed);

std::vector<ObjectSpec> load_corpus_spec(const std::filesystem::path& path);

/// Reads `<dir>/<instance_id>.json` records plus their `.xyz` clouds,
/// validates them and returns them sorted by instance_id.
std::vector<MeasurementRecord> ingest_dataset(const std::filesystem::path& dir);

void write_dataset(const std::vector<MeasurementRecord>& records,
                   const std::filesystem::path& dir);

PointCloud read_xyz(const std::filesystem::path& path);
void write_xyz(const PointCloud& cloud, const std::filesystem::path& path);

}  // namespace objectkb
