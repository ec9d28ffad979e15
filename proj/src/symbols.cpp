#include "objectkb/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "objectkb/analysis.hpp"
#include "objectkb/errors.hpp"

namespace objectkb {

using json = nlohmann::ordered_json;

const std::string& QualitativeModel::label_for(double value) const {
  std::size_t best = 0;
  double best_d = std::abs(value - centroids[0]);
  for (std::size_t i = 1; i < centroids.size(); ++i) {
    double d = std::abs(value - centroids[i]);
    if (d < best_d) {  // ties keep the lower centroid
      best_d = d;
      best = i;
    }
  }
  std::size_t idx = orientation == LabelOrientation::ascending ? best : labels.size() - 1 - best;
  return labels[idx];
}

std::vector<std::string> default_labels(const std::string& property_name, int k) {
  if (k == 3) {
    if (property_name == "rigidity") return {"soft", "medium", "rigid"};
    if (property_name == "weight_g") return {"light", "medium", "heavy"};
    if (property_name == "roughness_deg") return {"smooth", "medium", "rough"};
    if (property_name == "flatness") return {"curved", "mixed", "flat"};
    if (property_name == "hollowness") return {"solid", "dented", "hollow"};
    if (property_name == "size") return {"small", "medium", "large"};
    return {"low", "medium", "high"};
  }
  std::vector<std::string> labels;
  for (int i = 0; i < k; ++i) labels.push_back("level_" + std::to_string(i));
  return labels;
}

Subcategorization subcategorize(const std::vector<std::pair<std::string, double>>& values,
                                int k, const std::vector<std::string>& labels,
                                LabelOrientation orientation, std::uint64_t seed) {
  if (static_cast<int>(values.size()) < k)
    throw NumericError("subcategorize: " + std::to_string(values.size()) + " values for k=" +
                       std::to_string(k) + " clusters");
  if (static_cast<int>(labels.size()) != k)
    throw ValidationError("subcategorize: label vocabulary size must equal k");

  std::set<double> distinct;
  for (const auto& [_, v] : values) distinct.insert(v);
  if (static_cast<int>(distinct.size()) < k)
    throw NumericError("subcategorize: fewer distinct values than clusters");

  std::vector<std::vector<double>> points;
  points.reserve(values.size());
  for (const auto& [_, v] : values) points.push_back({v});

  KMeansParams params;
  params.k = k;
  params.seed = seed;
  ClusterReport report = kmeans(points, params);

  Subcategorization result;
  result.model.property_name = "";
  result.model.k = k;
  result.model.labels = labels;
  result.model.orientation = orientation;
  for (const auto& c : report.centroids) result.model.centroids.push_back(c[0]);
  std::sort(result.model.centroids.begin(), result.model.centroids.end());

  result.assignments.reserve(values.size());
  for (const auto& [_, v] : values) result.assignments.push_back(result.model.label_for(v));
  return result;
}

ClassConcept conceptualize(const std::vector<InstanceSymbols>& instances,
                           const std::string& class_name) {
  std::vector<const InstanceSymbols*> members;
  for (const auto& inst : instances)
    if (inst.class_name == class_name) members.push_back(&inst);
  if (members.empty()) throw ValidationError("conceptualize: no instances of class " + class_name);

  ClassConcept concept_;
  concept_.class_name = class_name;
  concept_.instance_count = static_cast<int>(members.size());
  double inv = 1.0 / static_cast<double>(members.size());

  std::vector<std::string> property_names;
  for (const auto& [prop, _] : members.front()->labels) property_names.push_back(prop);

  for (const auto& prop : property_names)
    for (const auto* inst : members)
      concept_.marginals[prop][inst->labels.at(prop)] += inv;

  for (std::size_t a = 0; a < property_names.size(); ++a)
    for (std::size_t b = a + 1; b < property_names.size(); ++b) {
      const std::string key = property_names[a] + "|" + property_names[b];
      for (const auto* inst : members)
        concept_.joints[key][inst->labels.at(property_names[a]) + "|" +
                             inst->labels.at(property_names[b])] += inv;
    }
  return concept_;
}

namespace {

// Properties that get a qualitative symbol, with the scalar they cluster on.
struct SymbolProperty {
  const char* name;
  double (*scalar)(const InstanceSymbols&);
};

double scalar_of(const InstanceSymbols& inst, const char* key) { return inst.scalars.at(key); }

const SymbolProperty kSymbolProperties[] = {
    {"rigidity", [](const InstanceSymbols& i) { return scalar_of(i, "rigidity"); }},
    {"weight_g", [](const InstanceSymbols& i) { return scalar_of(i, "weight_g"); }},
    {"roughness_deg", [](const InstanceSymbols& i) { return scalar_of(i, "roughness_deg"); }},
    {"flatness", [](const InstanceSymbols& i) { return scalar_of(i, "flatness"); }},
    {"hollowness", [](const InstanceSymbols& i) { return scalar_of(i, "hollowness"); }},
    {"size", [](const InstanceSymbols& i) { return scalar_of(i, "size"); }},
    {"support", [](const InstanceSymbols& i) { return scalar_of(i, "support"); }},
    {"containment", [](const InstanceSymbols& i) { return scalar_of(i, "containment"); }},
    {"movability", [](const InstanceSymbols& i) { return scalar_of(i, "movability"); }},
    {"blockage", [](const InstanceSymbols& i) { return scalar_of(i, "blockage"); }},
};

void label_group(std::vector<InstanceSymbols*>& group, const SymbolProperty& prop,
                 const SymbolConfig& config, std::optional<std::string> class_name,
                 KnowledgeBase& kb) {
  std::vector<std::pair<std::string, double>> values;
  std::set<double> distinct;
  for (const auto* inst : group) {
    values.push_back({inst->instance_id, prop.scalar(*inst)});
    distinct.insert(values.back().second);
  }
  // Degenerate groups (e.g. a class where every instance is solid) cannot
  // support k clusters; collapse to the number of distinct values and keep
  // the lowest labels of the vocabulary.
  int k_eff = std::min({config.k, static_cast<int>(values.size()),
                        static_cast<int>(distinct.size())});
  std::vector<std::string> vocab = default_labels(prop.name, config.k);
  vocab.resize(k_eff);
  Subcategorization sub =
      subcategorize(values, k_eff, vocab, LabelOrientation::ascending, config.seed);
  sub.model.property_name = prop.name;
  sub.model.class_name = class_name;
  kb.models.push_back(sub.model);
  for (std::size_t i = 0; i < group.size(); ++i) group[i]->labels[prop.name] = sub.assignments[i];
}

}  // namespace

KnowledgeBase build_kb(const std::vector<MeasurementRecord>& records,
                       const PropertyConfig& property_config, const SymbolConfig& symbol_config) {
  if (records.empty()) throw ValidationError("build_kb: no measurement records");

  std::vector<PhysicalProfile> profiles;
  profiles.reserve(records.size());
  for (const auto& record : records) profiles.push_back(extract_physical(record, property_config));

  KnowledgeBase kb;
  kb.normalization = normalize(profiles);

  for (const auto& p : profiles) {
    FunctionalProfile f = derive_functional(p, kb.normalization);
    InstanceSymbols inst;
    inst.instance_id = p.instance_id;
    inst.class_name = p.class_name;
    inst.scalars = {
        {"length_m", p.length_m},
        {"width_m", p.width_m},
        {"height_m", p.height_m},
        {"flatness", p.flatness},
        {"hollowness", p.hollowness},
        {"deformation_mm", p.deformation_mm},
        {"rigidity", p.rigidity},
        {"roughness_deg", p.roughness_deg},
        {"weight_g", p.weight_g},
        {"size", p.volume_m3()},
        {"support", f.support},
        {"containment", f.containment},
        {"movability", f.movability},
        {"blockage", f.blockage},
    };
    kb.instances.push_back(std::move(inst));
  }
  std::sort(kb.instances.begin(), kb.instances.end(),
            [](const auto& a, const auto& b) { return a.instance_id < b.instance_id; });

  for (const auto& prop : kSymbolProperties) {
    if (symbol_config.scope == ClusterScope::corpus) {
      std::vector<InstanceSymbols*> all;
      for (auto& inst : kb.instances) all.push_back(&inst);
      label_group(all, prop, symbol_config, std::nullopt, kb);
    } else {
      std::set<std::string> class_names;
      for (const auto& inst : kb.instances) class_names.insert(inst.class_name);
      for (const auto& cls : class_names) {
        std::vector<InstanceSymbols*> group;
        for (auto& inst : kb.instances)
          if (inst.class_name == cls) group.push_back(&inst);
        label_group(group, prop, symbol_config, cls, kb);
      }
    }
  }

  std::set<std::string> class_names;
  for (const auto& inst : kb.instances) class_names.insert(inst.class_name);
  for (const auto& cls : class_names) kb.classes.push_back(conceptualize(kb.instances, cls));

  kb.validate();
  return kb;
}

void KnowledgeBase::validate() const {
  auto fail = [](const std::string& path, const std::string& what) {
    throw ValidationError("kb" + path + ": " + what);
  };

  for (std::size_t m = 0; m < models.size(); ++m) {
    const auto& model = models[m];
    std::string path = "/models/" + std::to_string(m);
    if (static_cast<int>(model.labels.size()) != model.k) fail(path, "k must equal |labels|");
    if (static_cast<int>(model.centroids.size()) != model.k)
      fail(path, "centroid count must equal k");
    for (std::size_t i = 1; i < model.centroids.size(); ++i)
      if (model.centroids[i] <= model.centroids[i - 1])
        fail(path + "/centroids", "centroids must be strictly ascending");
  }

  std::set<std::string> class_names;
  for (const auto& c : classes) class_names.insert(c.class_name);

  auto find_model = [this](const std::string& prop,
                           const std::string& cls) -> const QualitativeModel* {
    const QualitativeModel* fallback = nullptr;
    for (const auto& m : models) {
      if (m.property_name != prop) continue;
      if (m.class_name && *m.class_name == cls) return &m;
      if (!m.class_name) fallback = &m;
    }
    return fallback;
  };

  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    std::string path = "/instances/" + std::to_string(i);
    if (!class_names.count(inst.class_name))
      fail(path + "/class_name", "class '" + inst.class_name + "' has no class concept");
    for (const auto& [prop, label] : inst.labels) {
      const QualitativeModel* model = find_model(prop, inst.class_name);
      if (!model) fail(path + "/labels/" + prop, "no qualitative model for property");
      if (std::find(model->labels.begin(), model->labels.end(), label) == model->labels.end())
        fail(path + "/labels/" + prop, "label '" + label + "' not in model vocabulary");
    }
  }

  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& cls = classes[c];
    std::string path = "/classes/" + std::to_string(c);
    if (cls.instance_count < 1) fail(path + "/instance_count", "must be >= 1");
    for (const auto& [prop, dist] : cls.marginals) {
      double sum = 0.0;
      for (const auto& [_, p] : dist) sum += p;
      if (std::abs(sum - 1.0) > 1e-9)
        fail(path + "/marginals/" + prop, "distribution must sum to 1");
    }
    for (const auto& [pair, dist] : cls.joints) {
      double sum = 0.0;
      for (const auto& [_, p] : dist) sum += p;
      if (std::abs(sum - 1.0) > 1e-9) fail(path + "/joints/" + pair, "distribution must sum to 1");
    }
  }
}

namespace {

json minmax_to_json(const MinMax& mm) { return json{{"min", mm.min}, {"max", mm.max}}; }

MinMax minmax_from_json(const json& j) {
  return MinMax{j.at("min").get<double>(), j.at("max").get<double>()};
}

}  // namespace

std::string kb_to_json(const KnowledgeBase& kb) {
  json j;
  j["version"] = kb.version;
  j["config"] = json::object();
  for (const auto& [k, v] : kb.config) j["config"][k] = v;
  j["normalization"] = {
      {"footprint_area", minmax_to_json(kb.normalization.footprint_area)},
      {"volume", minmax_to_json(kb.normalization.volume)},
      {"weight_g", minmax_to_json(kb.normalization.weight_g)},
      {"roughness_deg", minmax_to_json(kb.normalization.roughness_deg)},
  };
  j["models"] = json::array();
  for (const auto& m : kb.models) {
    json jm;
    jm["property_name"] = m.property_name;
    if (m.class_name) jm["class_name"] = *m.class_name;
    jm["k"] = m.k;
    jm["centroids"] = m.centroids;
    jm["labels"] = m.labels;
    jm["orientation"] = m.orientation == LabelOrientation::ascending ? "ascending" : "descending";
    j["models"].push_back(std::move(jm));
  }
  j["instances"] = json::array();
  for (const auto& inst : kb.instances) {
    json ji;
    ji["instance_id"] = inst.instance_id;
    ji["class_name"] = inst.class_name;
    ji["labels"] = inst.labels;
    ji["scalars"] = inst.scalars;
    j["instances"].push_back(std::move(ji));
  }
  j["classes"] = json::array();
  for (const auto& cls : kb.classes) {
    json jc;
    jc["class_name"] = cls.class_name;
    jc["instance_count"] = cls.instance_count;
    jc["marginals"] = cls.marginals;
    jc["joints"] = cls.joints;
    j["classes"].push_back(std::move(jc));
  }
  return j.dump(2) + "\n";
}

KnowledgeBase kb_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("kb: not valid JSON: ") + e.what());
  }

  KnowledgeBase kb;
  try {
    kb.version = j.at("version").get<int>();
    const json config = j.value("config", json::object());
    for (const auto& [k, v] : config.items()) kb.config[k] = v.get<std::string>();
    const auto& norm = j.at("normalization");
    kb.normalization.footprint_area = minmax_from_json(norm.at("footprint_area"));
    kb.normalization.volume = minmax_from_json(norm.at("volume"));
    kb.normalization.weight_g = minmax_from_json(norm.at("weight_g"));
    kb.normalization.roughness_deg = minmax_from_json(norm.at("roughness_deg"));
    for (const auto& jm : j.at("models")) {
      QualitativeModel m;
      m.property_name = jm.at("property_name").get<std::string>();
      if (jm.contains("class_name")) m.class_name = jm.at("class_name").get<std::string>();
      m.k = jm.at("k").get<int>();
      m.centroids = jm.at("centroids").get<std::vector<double>>();
      m.labels = jm.at("labels").get<std::vector<std::string>>();
      m.orientation = jm.at("orientation").get<std::string>() == "descending"
                          ? LabelOrientation::descending
                          : LabelOrientation::ascending;
      kb.models.push_back(std::move(m));
    }
    for (const auto& ji : j.at("instances")) {
      InstanceSymbols inst;
      inst.instance_id = ji.at("instance_id").get<std::string>();
      inst.class_name = ji.at("class_name").get<std::string>();
      inst.labels = ji.at("labels").get<std::map<std::string, std::string>>();
      inst.scalars = ji.at("scalars").get<std::map<std::string, double>>();
      kb.instances.push_back(std::move(inst));
    }
    for (const auto& jc : j.at("classes")) {
      ClassConcept cls;
      cls.class_name = jc.at("class_name").get<std::string>();
      cls.instance_count = jc.at("instance_count").get<int>();
      cls.marginals =
          jc.at("marginals").get<std::map<std::string, std::map<std::string, double>>>();
      cls.joints = jc.at("joints").get<std::map<std::string, std::map<std::string, double>>>();
      kb.classes.push_back(std::move(cls));
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("kb: schema violation: ") + e.what());
  }
  kb.validate();
  return kb;
}

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write kb: " + path.string());
  out << kb_to_json(kb);
}

KnowledgeBase load_kb(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open kb: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return kb_from_json(ss.str());
}

}  // namespace objectkb
