#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "objectkb/properties.hpp"

namespace objectkb {

enum class LabelOrientation { ascending, descending };

enum class ClusterScope { corpus, cls };

/// Per-property cluster model mapping scalars to ordered qualitative labels.
struct QualitativeModel {
  std::string property_name;
  std::optional<std::string> class_name;  // set under class scope
  int k = 3;
  std::vector<double> centroids;       // strictly ascending
  std::vector<std::string> labels;     // vocabulary, |labels| == k
  LabelOrientation orientation = LabelOrientation::ascending;

  /// Nearest-centroid label; ties resolve to the lower centroid.
  const std::string& label_for(double value) const;
};

struct InstanceSymbols {
  std::string instance_id;
  std::string class_name;
  std::map<std::string, std::string> labels;   // property -> qualitative label
  std::map<std::string, double> scalars;       // retained raw scalars
};

/// Class-level conceptual knowledge: sample proportions per property and
/// bivariate joint frequencies over all unordered property pairs.
struct ClassConcept {
  std::string class_name;
  int instance_count = 0;
  // property -> label -> proportion
  std::map<std::string, std::map<std::string, double>> marginals;
  // "propA|propB" (propA < propB) -> "labelA|labelB" -> joint frequency
  std::map<std::string, std::map<std::string, double>> joints;
};

struct SymbolConfig {
  int k = 3;
  ClusterScope scope = ClusterScope::corpus;
  std::uint64_t seed = 42;
};

struct KnowledgeBase {
  int version = 1;
  std::map<std::string, std::string> config;  // echoed pipeline parameters
  NormalizationContext normalization;
  std::vector<QualitativeModel> models;
  std::vector<InstanceSymbols> instances;
  std::vector<ClassConcept> classes;

  void validate() const;  // throws ValidationError with a JSON-pointer-style path
};

/// Default qualitative vocabulary for one property; k != 3 falls back to
/// generated level names (level_0 .. level_{k-1}).
std::vector<std::string> default_labels(const std::string& property_name, int k);

struct Subcategorization {
  QualitativeModel model;
  std::vector<std::string> assignments;  // label per input value, input order
};

/// 1-D K-means sub-categorization of a property's scalar values.
Subcategorization subcategorize(const std::vector<std::pair<std::string, double>>& values,
                                int k, const std::vector<std::string>& labels,
                                LabelOrientation orientation, std::uint64_t seed);

ClassConcept conceptualize(const std::vector<InstanceSymbols>& instances,
                           const std::string& class_name);

KnowledgeBase build_kb(const std::vector<MeasurementRecord>& records,
                       const PropertyConfig& property_config, const SymbolConfig& symbol_config);

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path);
KnowledgeBase load_kb(const std::filesystem::path& path);

std::string kb_to_json(const KnowledgeBase& kb);
KnowledgeBase kb_from_json(const std::string& text);

}  // namespace objectkb
