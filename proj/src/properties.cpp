#include "objectkb/properties.hpp"

#include <cmath>

#include "objectkb/errors.hpp"

namespace objectkb {

double MinMax::normalize(double v) const {
  if (max <= min) return 0.5;
  double t = (v - min) / (max - min);
  return std::clamp(t, 0.0, 1.0);
}

PhysicalProfile extract_physical(const MeasurementRecord& record, const PropertyConfig& config) {
  PhysicalProfile p;
  p.instance_id = record.instance_id;
  p.class_name = record.class_name;
  try {
    BoundingBox box = bounding_box(merge(record.side_cloud, record.top_cloud));
    p.length_m = box.length_m;
    p.width_m = box.width_m;
    p.height_m = box.height_m;
    p.flatness = flatness_ratio(record.top_cloud, config.ransac).ratio;
    p.hollowness = marker_depth_ratio(record.rim_top_z_m, record.marker_internal_z_m,
                                      record.marker_reference_z_m);
  } catch (const Error& e) {
    throw Error(e.kind(), "instance " + record.instance_id + ": " + e.what());
  }
  p.deformation_mm = (record.press_contact_z_m - record.press_stop_z_m) * 1000.0;
  p.rigidity = std::exp(-p.deformation_mm / config.delta0_mm);
  p.roughness_deg = record.slide_angle_deg;
  p.weight_g = record.weight_g;
  return p;
}

namespace {

MinMax min_max_of(const std::vector<PhysicalProfile>& profiles,
                  double (*getter)(const PhysicalProfile&)) {
  MinMax mm{getter(profiles.front()), getter(profiles.front())};
  for (const auto& p : profiles) {
    double v = getter(p);
    mm.min = std::min(mm.min, v);
    mm.max = std::max(mm.max, v);
  }
  return mm;
}

}  // namespace

NormalizationContext normalize(const std::vector<PhysicalProfile>& profiles) {
  if (profiles.empty()) throw ValidationError("normalize: empty profile list");
  NormalizationContext ctx;
  ctx.footprint_area = min_max_of(profiles, [](const PhysicalProfile& p) { return p.footprint_area_m2(); });
  ctx.volume = min_max_of(profiles, [](const PhysicalProfile& p) { return p.volume_m3(); });
  ctx.weight_g = min_max_of(profiles, [](const PhysicalProfile& p) { return p.weight_g; });
  ctx.roughness_deg = min_max_of(profiles, [](const PhysicalProfile& p) { return p.roughness_deg; });
  return ctx;
}

double derive_support(const PhysicalProfile& p, const NormalizationContext& ctx) {
  // Geometric mean: a missing prerequisite (e.g. zero rigidity) vetoes support.
  double area_n = ctx.footprint_area.normalize(p.footprint_area_m2());
  return std::cbrt(p.rigidity * p.flatness * area_n);
}

double derive_containment(const PhysicalProfile& p, const NormalizationContext& ctx) {
  double volume_n = ctx.volume.normalize(p.volume_m3());
  return std::sqrt(p.hollowness * volume_n);
}

double derive_movability(const PhysicalProfile& p, const NormalizationContext& ctx) {
  // Weight and roughness trade off; higher value = easier to move.
  double weight_n = ctx.weight_g.normalize(p.weight_g);
  double roughness_n = p.roughness_deg / 90.0;
  return 1.0 - (weight_n + roughness_n) / 2.0;
}

double derive_blockage(double movability) { return 1.0 - movability; }

FunctionalProfile derive_functional(const PhysicalProfile& p, const NormalizationContext& ctx) {
  FunctionalProfile f;
  f.support = derive_support(p, ctx);
  f.containment = derive_containment(p, ctx);
  f.movability = derive_movability(p, ctx);
  f.blockage = derive_blockage(f.movability);
  return f;
}

}  // namespace objectkb
