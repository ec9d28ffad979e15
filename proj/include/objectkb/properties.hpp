#pragma once

#include <vector>

#include "objectkb/geometry.hpp"
#include "objectkb/sensing.hpp"

namespace objectkb {

struct PropertyConfig {
  double delta0_mm = 10.0;  // rigidity decay scale: rigidity = exp(-deformation/delta0)
  RansacParams ransac;
};

/// The six physical properties of one instance plus the raw deformation feature.
struct PhysicalProfile {
  std::string instance_id;
  std::string class_name;
  double length_m = 0.0;
  double width_m = 0.0;
  double height_m = 0.0;
  double flatness = 0.0;       // [0, 1]
  double hollowness = 0.0;     // [0, 1]
  double deformation_mm = 0.0;
  double rigidity = 1.0;       // exp(-deformation/delta0), 1 = fully rigid
  double roughness_deg = 0.0;  // [0, 90]
  double weight_g = 0.0;

  double footprint_area_m2() const { return length_m * width_m; }
  double volume_m3() const { return length_m * width_m * height_m; }
};

struct FunctionalProfile {
  double support = 0.0;
  double containment = 0.0;
  double movability = 0.0;
  double blockage = 0.0;
};

struct MinMax {
  double min = 0.0;
  double max = 0.0;

  /// Min-max scaling; a degenerate range maps everything to 0.5.
  double normalize(double v) const;
};

/// Corpus-wide scales for the size/weight/roughness terms of the
/// functional formulas. Recorded in the KB for reproducibility.
struct NormalizationContext {
  MinMax footprint_area;
  MinMax volume;
  MinMax weight_g;
  MinMax roughness_deg;
};

PhysicalProfile extract_physical(const MeasurementRecord& record, const PropertyConfig& config);

NormalizationContext normalize(const std::vector<PhysicalProfile>& profiles);

double derive_support(const PhysicalProfile& p, const NormalizationContext& ctx);
double derive_containment(const PhysicalProfile& p, const NormalizationContext& ctx);
double derive_movability(const PhysicalProfile& p, const NormalizationContext& ctx);
double derive_blockage(double movability);

FunctionalProfile derive_functional(const PhysicalProfile& p, const NormalizationContext& ctx);

}  // namespace objectkb
