#include "objectkb/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "objectkb/errors.hpp"

namespace objectkb {

using json = nlohmann::ordered_json;

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::box: return "box";
    case Shape::open_box: return "open_box";
    case Shape::cylinder: return "cylinder";
    case Shape::open_cylinder: return "open_cylinder";
    case Shape::sphere: return "sphere";
    case Shape::sheet: return "sheet";
  }
  throw ValidationError("unknown shape enum value");
}

Shape shape_from_string(const std::string& name) {
  if (name == "box") return Shape::box;
  if (name == "open_box") return Shape::open_box;
  if (name == "cylinder") return Shape::cylinder;
  if (name == "open_cylinder") return Shape::open_cylinder;
  if (name == "sphere") return Shape::sphere;
  if (name == "sheet") return Shape::sheet;
  throw ValidationError("unknown shape: " + name);
}

void ObjectSpec::validate() const {
  if (id.empty()) throw ValidationError("spec: id must not be empty");
  if (length_m <= 0 || width_m <= 0 || height_m <= 0)
    throw ValidationError("spec " + id + ": all dims must be > 0");
  if (is_open()) {
    if (wall_m <= 0 || base_m <= 0)
      throw ValidationError("spec " + id + ": open shapes need wall_m > 0 and base_m > 0");
    if (2.0 * wall_m >= std::min(length_m, width_m))
      throw ValidationError("spec " + id + ": wall thickness exceeds outer dims");
    if (base_m >= height_m)
      throw ValidationError("spec " + id + ": base thickness exceeds height");
  }
  if (material.friction_mu < 0) throw ValidationError("spec " + id + ": friction_mu must be >= 0");
  if (material.density_g_cm3 <= 0)
    throw ValidationError("spec " + id + ": density must be > 0");
  if (material.stiffness_mm < 0)
    throw ValidationError("spec " + id + ": stiffness_mm must be >= 0");
  if (noise_sigma_m < 0) throw ValidationError("spec " + id + ": noise_sigma_m must be >= 0");
}

void MeasurementRecord::validate() const {
  auto fail = [this](const std::string& what) {
    throw ValidationError("record " + instance_id + ": " + what);
  };
  if (instance_id.empty()) fail("instance_id must not be empty");
  if (top_cloud.empty() || side_cloud.empty()) fail("clouds must be non-empty");
  for (const auto* cloud : {&top_cloud, &side_cloud})
    for (const auto& p : cloud->points)
      if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
        fail("cloud contains non-finite coordinates");
  if (press_contact_z_m < press_stop_z_m) fail("press_contact_z_m must be >= press_stop_z_m");
  if (slide_angle_deg < 0.0 || slide_angle_deg > 90.0)
    fail("slide_angle_deg must be in [0, 90]");
  if (weight_g < 0.0) fail("weight_g must be >= 0");
  if (std::round(weight_g) != weight_g) fail("weight_g must be integral grams");
  if (marker_internal_z_m < marker_reference_z_m)
    fail("marker_internal_z_m must be >= marker_reference_z_m");
}

namespace {

constexpr double kPi = std::numbers::pi;

// One sampleable sub-surface of a view, weighted by its area.
struct Patch {
  double area;
  std::function<Point3(std::mt19937_64&)> sample;
};

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Patch rect_patch(double lx, double ly, double z) {
  return {lx * ly, [=](std::mt19937_64& rng) {
            return Point3{uniform(rng, -lx / 2, lx / 2), uniform(rng, -ly / 2, ly / 2), z};
          }};
}

// Rectangular frame between outer (lx, ly) and inner (ix, iy), at height z.
Patch frame_patch(double lx, double ly, double ix, double iy, double z) {
  return {lx * ly - ix * iy, [=](std::mt19937_64& rng) {
            for (;;) {
              double x = uniform(rng, -lx / 2, lx / 2);
              double y = uniform(rng, -ly / 2, ly / 2);
              if (std::abs(x) > ix / 2 || std::abs(y) > iy / 2) return Point3{x, y, z};
            }
          }};
}

Patch ellipse_patch(double a, double b, double z) {
  return {kPi * a * b, [=](std::mt19937_64& rng) {
            double r = std::sqrt(uniform(rng, 0.0, 1.0));
            double phi = uniform(rng, 0.0, 2.0 * kPi);
            return Point3{a * r * std::cos(phi), b * r * std::sin(phi), z};
          }};
}

Patch annulus_patch(double a, double b, double ia, double ib, double z) {
  return {kPi * (a * b - ia * ib), [=](std::mt19937_64& rng) {
            for (;;) {
              double r = std::sqrt(uniform(rng, 0.0, 1.0));
              double phi = uniform(rng, 0.0, 2.0 * kPi);
              double x = a * r * std::cos(phi), y = b * r * std::sin(phi);
              double q = (x * x) / (ia * ia) + (y * y) / (ib * ib);
              if (q > 1.0) return Point3{x, y, z};
            }
          }};
}

// Lateral wall of an elliptic cylinder, angular range [phi0, phi1].
Patch wall_patch(double a, double b, double h, double phi0, double phi1) {
  double approx_area = 0.5 * (phi1 - phi0) * (a + b) * h;
  return {approx_area, [=](std::mt19937_64& rng) {
            double phi = uniform(rng, phi0, phi1);
            return Point3{a * std::cos(phi), b * std::sin(phi), uniform(rng, 0.0, h)};
          }};
}

// Ellipsoid surface patch: center cz, semiaxes (a, b, c), with the sampled
// hemisphere selected by which axis faces the camera.
Patch ellipsoid_patch(double a, double b, double c, double cz, bool top_view) {
  double approx_area = 2.0 * kPi * std::cbrt(a * b * c) * std::cbrt(a * b * c);
  return {approx_area, [=](std::mt19937_64& rng) {
            double ct = top_view ? uniform(rng, 0.0, 1.0) : uniform(rng, -1.0, 1.0);
            double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
            double phi = top_view ? uniform(rng, 0.0, 2.0 * kPi) : uniform(rng, -kPi / 2, kPi / 2);
            return Point3{a * st * std::cos(phi), b * st * std::sin(phi), cz + c * ct};
          }};
}

PointCloud sample_patches(const std::vector<Patch>& patches, int n_points, double sigma,
                          std::mt19937_64& rng) {
  double total_area = 0.0;
  for (const auto& p : patches) total_area += p.area;

  std::vector<int> counts(patches.size(), 0);
  int assigned = 0;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    counts[i] = std::max(1, static_cast<int>(n_points * patches[i].area / total_area));
    assigned += counts[i];
  }
  counts[0] += std::max(0, n_points - assigned);

  std::normal_distribution<double> noise(0.0, sigma);
  PointCloud cloud;
  cloud.points.reserve(n_points);
  for (std::size_t i = 0; i < patches.size(); ++i) {
    for (int j = 0; j < counts[i]; ++j) {
      Point3 p = patches[i].sample(rng);
      if (sigma > 0.0) {
        p.x += noise(rng);
        p.y += noise(rng);
        p.z += noise(rng);
      }
      cloud.points.push_back(p);
    }
  }
  return cloud;
}

std::vector<Patch> top_patches(const ObjectSpec& s) {
  double a = s.length_m / 2, b = s.width_m / 2, h = s.height_m;
  switch (s.shape) {
    case Shape::box:
    case Shape::sheet:
      return {rect_patch(s.length_m, s.width_m, h)};
    case Shape::open_box: {
      double il = s.length_m - 2 * s.wall_m, iw = s.width_m - 2 * s.wall_m;
      return {frame_patch(s.length_m, s.width_m, il, iw, h), rect_patch(il, iw, s.base_m)};
    }
    case Shape::cylinder:
      return {ellipse_patch(a, b, h)};
    case Shape::open_cylinder: {
      double ia = a - s.wall_m, ib = b - s.wall_m;
      return {annulus_patch(a, b, ia, ib, h), ellipse_patch(ia, ib, s.base_m)};
    }
    case Shape::sphere:
      return {ellipsoid_patch(a, b, h / 2, h / 2, true)};
  }
  throw ValidationError("unknown shape");
}

std::vector<Patch> side_patches(const ObjectSpec& s) {
  double a = s.length_m / 2, b = s.width_m / 2, h = s.height_m;
  switch (s.shape) {
    case Shape::box:
    case Shape::sheet:
    case Shape::open_box:
      // Face at x = +length/2, seen edge-on from +x.
      return {{s.width_m * h, [=](std::mt19937_64& rng) {
                 return Point3{a, uniform(rng, -b, b), uniform(rng, 0.0, h)};
               }}};
    case Shape::cylinder:
    case Shape::open_cylinder:
      return {wall_patch(a, b, h, -kPi / 2, kPi / 2)};
    case Shape::sphere:
      return {ellipsoid_patch(a, b, h / 2, h / 2, false)};
  }
  throw ValidationError("unknown shape");
}

}  // namespace

ViewPair simulate_views(const ObjectSpec& spec, int points_per_view, std::uint64_t seed) {
  spec.validate();
  if (points_per_view < 100)
    throw ValidationError("simulate_views: points_per_view must be >= 100");

  ViewPair views;
  std::mt19937_64 top_rng(seed * 2u + 1u);
  std::mt19937_64 side_rng(seed * 2u + 2u);
  views.top = sample_patches(top_patches(spec), points_per_view, spec.noise_sigma_m, top_rng);
  views.side = sample_patches(side_patches(spec), points_per_view, spec.noise_sigma_m, side_rng);
  return views;
}

std::pair<double, double> simulate_press(const ObjectSpec& spec) {
  spec.validate();
  if (spec.height_m >= kPressHeightLimitM)
    throw ValidationError("simulate_press: object " + spec.id +
                          " exceeds the apparatus height limit of 0.20 m");
  double contact = spec.height_m;
  double stop = spec.height_m - std::min(spec.material.stiffness_mm / 1000.0, spec.height_m);
  return {contact, stop};
}

double simulate_ramp(const ObjectSpec& spec) {
  spec.validate();
  if (spec.shape == Shape::sphere)
    throw ValidationError("simulate_ramp: spheres roll instead of sliding; " + spec.id +
                          " is unsupported");
  double angle = std::atan(spec.material.friction_mu) * 180.0 / kPi;
  // The ramp stops at the first step where the object slides.
  return std::ceil(angle / kRampStepDeg - 1e-9) * kRampStepDeg;
}

double shell_volume_m3(const ObjectSpec& s) {
  double a = s.length_m / 2, b = s.width_m / 2;
  switch (s.shape) {
    case Shape::box:
    case Shape::sheet:
      return s.length_m * s.width_m * s.height_m;
    case Shape::open_box:
      return s.length_m * s.width_m * s.height_m -
             (s.length_m - 2 * s.wall_m) * (s.width_m - 2 * s.wall_m) * (s.height_m - s.base_m);
    case Shape::cylinder:
      return kPi * a * b * s.height_m;
    case Shape::open_cylinder:
      return kPi * a * b * s.height_m -
             kPi * (a - s.wall_m) * (b - s.wall_m) * (s.height_m - s.base_m);
    case Shape::sphere:
      return (4.0 / 3.0) * kPi * a * b * (s.height_m / 2);
  }
  throw ValidationError("unknown shape");
}

double simulate_scale(const ObjectSpec& spec) {
  spec.validate();
  // m^3 -> cm^3 is 1e6; density is g/cm^3; the scale reads whole grams.
  return std::round(shell_volume_m3(spec) * 1e6 * spec.material.density_g_cm3);
}

MeasurementRecord simulate_record(const ObjectSpec& spec, int points_per_view,
                                  std::uint64_t seed) {
  MeasurementRecord rec;
  rec.instance_id = spec.id;
  rec.class_name = spec.class_name;
  ViewPair views = simulate_views(spec, points_per_view, seed);
  rec.top_cloud = std::move(views.top);
  rec.side_cloud = std::move(views.side);
  rec.marker_reference_z_m = 0.0;
  rec.rim_top_z_m = spec.height_m;
  rec.marker_internal_z_m = spec.is_open() ? spec.base_m : spec.height_m;
  std::tie(rec.press_contact_z_m, rec.press_stop_z_m) = simulate_press(spec);
  // Spheres roll off at the first ramp step; the recorded angle is bogus but
  // measured, matching how the physical rig behaves.
  rec.slide_angle_deg = spec.shape == Shape::sphere ? kRampStepDeg : simulate_ramp(spec);
  rec.weight_g = simulate_scale(spec);
  rec.validate();
  return rec;
}

std::vector<ObjectSpec> load_corpus_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open corpus spec: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("corpus spec " + path.string() + ": " + e.what());
  }
  if (!doc.is_array()) throw ValidationError("corpus spec must be a JSON array");

  std::vector<ObjectSpec> specs;
  std::set<std::string> seen_ids;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& j = doc[i];
    ObjectSpec s;
    try {
      s.id = j.at("id").get<std::string>();
      s.class_name = j.at("class_name").get<std::string>();
      s.shape = shape_from_string(j.at("shape").get<std::string>());
      const auto& dims = j.at("dims");
      s.length_m = dims.at("length_m").get<double>();
      s.width_m = dims.at("width_m").get<double>();
      s.height_m = dims.at("height_m").get<double>();
      s.wall_m = dims.value("wall_m", 0.0);
      s.base_m = dims.value("base_m", 0.0);
      const auto& mat = j.at("material");
      s.material.stiffness_mm = mat.at("stiffness_mm").get<double>();
      s.material.friction_mu = mat.at("friction_mu").get<double>();
      s.material.density_g_cm3 = mat.at("density_g_cm3").get<double>();
      s.noise_sigma_m = j.value("noise_sigma_m", 0.0);
    } catch (const json::exception& e) {
      throw ValidationError("corpus spec entry " + std::to_string(i) + ": " + e.what());
    }
    try {
      s.validate();
    } catch (const ValidationError& e) {
      throw ValidationError("corpus spec entry " + std::to_string(i) + ": " + e.what());
    }
    if (!seen_ids.insert(s.id).second)
      throw ValidationError("corpus spec entry " + std::to_string(i) + ": duplicate instance id '" +
                            s.id + "'");
    specs.push_back(std::move(s));
  }
  return specs;
}

PointCloud read_xyz(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cloud file: " + path.string());
  PointCloud cloud;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Point3 p;
    if (ls >> p.x >> p.y >> p.z) cloud.points.push_back(p);
  }
  return cloud;
}

void write_xyz(const PointCloud& cloud, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write cloud file: " + path.string());
  char buf[96];
  for (const auto& p : cloud.points) {
    std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g\n", p.x, p.y, p.z);
    out << buf;
  }
}

namespace {

json record_to_json(const MeasurementRecord& r, const std::string& top_rel,
                    const std::string& side_rel) {
  json j;
  j["instance_id"] = r.instance_id;
  j["class_name"] = r.class_name;
  j["top_cloud"] = top_rel;
  j["side_cloud"] = side_rel;
  j["marker_reference_z_m"] = r.marker_reference_z_m;
  j["marker_internal_z_m"] = r.marker_internal_z_m;
  j["rim_top_z_m"] = r.rim_top_z_m;
  j["press_contact_z_m"] = r.press_contact_z_m;
  j["press_stop_z_m"] = r.press_stop_z_m;
  j["slide_angle_deg"] = r.slide_angle_deg;
  j["weight_g"] = r.weight_g;
  return j;
}

}  // namespace

void write_dataset(const std::vector<MeasurementRecord>& records,
                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "clouds");
  for (const auto& r : records) {
    std::string top_rel = "clouds/" + r.instance_id + "_top.xyz";
    std::string side_rel = "clouds/" + r.instance_id + "_side.xyz";
    write_xyz(r.top_cloud, dir / top_rel);
    write_xyz(r.side_cloud, dir / side_rel);
    std::ofstream out(dir / (r.instance_id + ".json"));
    if (!out) throw IoError("cannot write record: " + (dir / (r.instance_id + ".json")).string());
    out << record_to_json(r, top_rel, side_rel).dump(2) << "\n";
  }
}

std::vector<MeasurementRecord> ingest_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    throw IoError("dataset directory does not exist: " + dir.string());

  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json" &&
        entry.path().filename() != "manifest.json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  std::vector<MeasurementRecord> records;
  for (const auto& file : files) {
    std::ifstream in(file);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw IoError("record " + file.string() + ": " + e.what());
    }
    MeasurementRecord r;
    try {
      r.instance_id = j.at("instance_id").get<std::string>();
      r.class_name = j.at("class_name").get<std::string>();
      r.top_cloud = read_xyz(dir / j.at("top_cloud").get<std::string>());
      r.side_cloud = read_xyz(dir / j.at("side_cloud").get<std::string>());
      r.marker_reference_z_m = j.at("marker_reference_z_m").get<double>();
      r.marker_internal_z_m = j.at("marker_internal_z_m").get<double>();
      r.rim_top_z_m = j.at("rim_top_z_m").get<double>();
      r.press_contact_z_m = j.at("press_contact_z_m").get<double>();
      r.press_stop_z_m = j.at("press_stop_z_m").get<double>();
      r.slide_angle_deg = j.at("slide_angle_deg").get<double>();
      r.weight_g = j.at("weight_g").get<double>();
    } catch (const json::exception& e) {
      throw ValidationError("record " + file.string() + ": " + e.what());
    }
    try {
      r.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(file.string() + ": " + e.what());
    }
    records.push_back(std::move(r));
  }
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.instance_id < b.instance_id; });
  return records;
}

}  // namespace objectkb
