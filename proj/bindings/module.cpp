#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "objectkb/analysis.hpp"
#include "objectkb/errors.hpp"
#include "objectkb/geometry.hpp"
#include "objectkb/properties.hpp"
#include "objectkb/sensing.hpp"
#include "objectkb/symbols.hpp"

namespace py = pybind11;
using namespace objectkb;

PYBIND11_MODULE(_objectkb, m) {
  m.doc() = "Robot-centric object knowledge base pipeline";

  py::register_exception<ValidationError>(m, "ObjectKbValidationError", PyExc_ValueError);
  py::register_exception<IoError>(m, "ObjectKbIoError", PyExc_IOError);
  py::register_exception<NumericError>(m, "ObjectKbNumericError", PyExc_RuntimeError);

  py::class_<Point3>(m, "Point3")
      .def(py::init<double, double, double>(), py::arg("x") = 0.0, py::arg("y") = 0.0,
           py::arg("z") = 0.0)
      .def_readwrite("x", &Point3::x)
      .def_readwrite("y", &Point3::y)
      .def_readwrite("z", &Point3::z);

  py::class_<PointCloud>(m, "PointCloud")
      .def(py::init<>())
      .def(py::init([](const std::vector<std::array<double, 3>>& pts) {
        PointCloud c;
        for (const auto& p : pts) c.points.push_back({p[0], p[1], p[2]});
        return c;
      }))
      .def_readwrite("points", &PointCloud::points)
      .def("__len__", &PointCloud::size);

  py::enum_<Shape>(m, "Shape")
      .value("box", Shape::box)
      .value("open_box", Shape::open_box)
      .value("cylinder", Shape::cylinder)
      .value("open_cylinder", Shape::open_cylinder)
      .value("sphere", Shape::sphere)
      .value("sheet", Shape::sheet);

  py::class_<Material>(m, "Material")
      .def(py::init<>())
      .def_readwrite("stiffness_mm", &Material::stiffness_mm)
      .def_readwrite("friction_mu", &Material::friction_mu)
      .def_readwrite("density_g_cm3", &Material::density_g_cm3);

  py::class_<ObjectSpec>(m, "ObjectSpec")
      .def(py::init<>())
      .def_readwrite("id", &ObjectSpec::id)
      .def_readwrite("class_name", &ObjectSpec::class_name)
      .def_readwrite("shape", &ObjectSpec::shape)
      .def_readwrite("length_m", &ObjectSpec::length_m)
      .def_readwrite("width_m", &ObjectSpec::width_m)
      .def_readwrite("height_m", &ObjectSpec::height_m)
      .def_readwrite("wall_m", &ObjectSpec::wall_m)
      .def_readwrite("base_m", &ObjectSpec::base_m)
      .def_readwrite("material", &ObjectSpec::material)
      .def_readwrite("noise_sigma_m", &ObjectSpec::noise_sigma_m)
      .def("validate", &ObjectSpec::validate);

  py::class_<MeasurementRecord>(m, "MeasurementRecord")
      .def(py::init<>())
      .def_readwrite("instance_id", &MeasurementRecord::instance_id)
      .def_readwrite("class_name", &MeasurementRecord::class_name)
      .def_readwrite("top_cloud", &MeasurementRecord::top_cloud)
      .def_readwrite("side_cloud", &MeasurementRecord::side_cloud)
      .def_readwrite("marker_reference_z_m", &MeasurementRecord::marker_reference_z_m)
      .def_readwrite("marker_internal_z_m", &MeasurementRecord::marker_internal_z_m)
      .def_readwrite("rim_top_z_m", &MeasurementRecord::rim_top_z_m)
      .def_readwrite("press_contact_z_m", &MeasurementRecord::press_contact_z_m)
      .def_readwrite("press_stop_z_m", &MeasurementRecord::press_stop_z_m)
      .def_readwrite("slide_angle_deg", &MeasurementRecord::slide_angle_deg)
      .def_readwrite("weight_g", &MeasurementRecord::weight_g)
      .def("validate", &MeasurementRecord::validate);

  py::class_<BoundingBox>(m, "BoundingBox")
      .def_readonly("length_m", &BoundingBox::length_m)
      .def_readonly("width_m", &BoundingBox::width_m)
      .def_readonly("height_m", &BoundingBox::height_m);

  py::class_<PhysicalProfile>(m, "PhysicalProfile")
      .def_readonly("instance_id", &PhysicalProfile::instance_id)
      .def_readonly("class_name", &PhysicalProfile::class_name)
      .def_readonly("length_m", &PhysicalProfile::length_m)
      .def_readonly("width_m", &PhysicalProfile::width_m)
      .def_readonly("height_m", &PhysicalProfile::height_m)
      .def_readonly("flatness", &PhysicalProfile::flatness)
      .def_readonly("hollowness", &PhysicalProfile::hollowness)
      .def_readonly("deformation_mm", &PhysicalProfile::deformation_mm)
      .def_readonly("rigidity", &PhysicalProfile::rigidity)
      .def_readonly("roughness_deg", &PhysicalProfile::roughness_deg)
      .def_readonly("weight_g", &PhysicalProfile::weight_g);

  py::class_<MinMax>(m, "MinMax")
      .def_readonly("min", &MinMax::min)
      .def_readonly("max", &MinMax::max)
      .def("normalize", &MinMax::normalize);

  py::class_<NormalizationContext>(m, "NormalizationContext")
      .def_readonly("footprint_area", &NormalizationContext::footprint_area)
      .def_readonly("volume", &NormalizationContext::volume)
      .def_readonly("weight_g", &NormalizationContext::weight_g)
      .def_readonly("roughness_deg", &NormalizationContext::roughness_deg);

  py::class_<FunctionalProfile>(m, "FunctionalProfile")
      .def_readonly("support", &FunctionalProfile::support)
      .def_readonly("containment", &FunctionalProfile::containment)
      .def_readonly("movability", &FunctionalProfile::movability)
      .def_readonly("blockage", &FunctionalProfile::blockage);

  m.def("simulate_record", &simulate_record, py::arg("spec"), py::arg("points_per_view") = 2000,
        py::arg("seed") = 42);
  m.def("simulate_press", &simulate_press);
  m.def("simulate_ramp", &simulate_ramp);
  m.def("simulate_scale", &simulate_scale);
  m.def("ingest_dataset", &ingest_dataset);
  m.def("write_dataset", &write_dataset);

  m.def("bounding_box", &bounding_box);
  m.def(
      "flatness_ratio",
      [](const PointCloud& cloud, double threshold_m, int iterations, std::uint64_t seed) {
        RansacParams p{threshold_m, iterations, seed};
        auto r = flatness_ratio(cloud, p);
        return py::make_tuple(r.ratio, r.plane_found);
      },
      py::arg("cloud"), py::arg("threshold_m") = 0.005, py::arg("iterations") = 500,
      py::arg("seed") = 42);
  m.def("marker_depth_ratio", &marker_depth_ratio);

  m.def(
      "extract_physical",
      [](const MeasurementRecord& record, double delta0_mm) {
        PropertyConfig c;
        c.delta0_mm = delta0_mm;
        return extract_physical(record, c);
      },
      py::arg("record"), py::arg("delta0_mm") = 10.0);
  m.def("normalize_profiles", &normalize);
  m.def("derive_functional", &derive_functional);

  m.def(
      "subcategorize",
      [](const std::vector<double>& values, int k, const std::vector<std::string>& labels,
         std::uint64_t seed) {
        std::vector<std::pair<std::string, double>> pairs;
        for (std::size_t i = 0; i < values.size(); ++i)
          pairs.push_back({std::to_string(i), values[i]});
        auto sub = subcategorize(pairs, k, labels, LabelOrientation::ascending, seed);
        return py::make_tuple(sub.model.centroids, sub.assignments);
      },
      py::arg("values"), py::arg("k"), py::arg("labels"), py::arg("seed") = 42);

  m.def(
      "kmeans",
      [](const std::vector<std::vector<double>>& points, int k, std::uint64_t seed) {
        KMeansParams p;
        p.k = k;
        p.seed = seed;
        auto r = kmeans(points, p);
        return py::make_tuple(r.assignments, r.centroids, r.inertia);
      },
      py::arg("points"), py::arg("k"), py::arg("seed") = 42);
  m.def(
      "isomap",
      [](const std::vector<std::vector<double>>& points, int neighbors, bool bridge) {
        auto e = isomap_2d(points, neighbors, bridge);
        return py::make_tuple(e.coords, e.lambda1, e.lambda2);
      },
      py::arg("points"), py::arg("neighbors") = 5, py::arg("bridge_components") = false);

  m.def(
      "build_kb",
      [](const std::vector<MeasurementRecord>& records, int k, const std::string& scope,
         std::uint64_t seed, double delta0_mm) {
        PropertyConfig pc;
        pc.delta0_mm = delta0_mm;
        pc.ransac.seed = seed;
        SymbolConfig sc;
        sc.k = k;
        sc.scope = scope == "class" ? ClusterScope::cls : ClusterScope::corpus;
        sc.seed = seed;
        return kb_to_json(build_kb(records, pc, sc));
      },
      py::arg("records"), py::arg("k") = 3, py::arg("scope") = "corpus", py::arg("seed") = 42,
      py::arg("delta0_mm") = 10.0, "Build a knowledge base and return it as a JSON string");
  m.def("save_kb_json", [](const std::string& text, const std::filesystem::path& path) {
    save_kb(kb_from_json(text), path);
  });
  m.def("load_kb_json",
        [](const std::filesystem::path& path) { return kb_to_json(load_kb(path)); });

  m.def(
      "analyze_kb",
      [](const std::filesystem::path& kb_path, const std::string& properties, int k_clusters,
         int neighbors, std::uint64_t seed, bool bridge) {
        KnowledgeBase kb = load_kb(kb_path);
        AnalyzeParams params;
        if (properties == "physical") {
          params.property_set = PropertySet::physical;
        } else if (properties == "functional") {
          params.property_set = PropertySet::functional;
        } else {
          params.property_set = PropertySet::single;
          params.single_property = properties;
        }
        params.k_clusters = k_clusters;
        params.neighbors = neighbors;
        params.seed = seed;
        params.bridge_components = bridge;
        auto result = analyze(kb, params);
        py::dict out;
        out["instance_ids"] = result.matrix.instance_ids;
        out["class_names"] = result.matrix.class_names;
        out["coords"] = result.embedding.coords;
        out["clusters"] = result.report.assignments;
        out["inertia"] = result.report.inertia;
        return out;
      },
      py::arg("kb_path"), py::arg("properties") = "physical", py::arg("k_clusters") = 7,
      py::arg("neighbors") = 5, py::arg("seed") = 42, py::arg("bridge_components") = false);
}
