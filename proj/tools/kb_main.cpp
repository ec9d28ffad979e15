#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "objectkb/analysis.hpp"
#include "objectkb/errors.hpp"
#include "objectkb/properties.hpp"
#include "objectkb/sensing.hpp"
#include "objectkb/symbols.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace objectkb;

namespace {

std::uint64_t effective_seed(std::uint64_t cli_seed) {
  if (const char* env = std::getenv("OBJECT_KB_SEED")) return std::strtoull(env, nullptr, 10);
  return cli_seed;
}

// Write through a temp file so consumers never see partial output.
void atomic_write(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_simulate(const std::string& spec_file, const std::string& out_dir, std::uint64_t seed,
                 int points_per_view) {
  seed = effective_seed(seed);
  auto specs = load_corpus_spec(spec_file);

  fs::path out(out_dir);
  fs::path staging = out;
  staging += ".staging";
  fs::remove_all(staging);
  fs::create_directories(staging);

  std::map<std::string, int> class_counts;
  try {
    std::vector<MeasurementRecord> records;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      // Per-instance seed keeps records independent of corpus ordering.
      records.push_back(simulate_record(specs[i], points_per_view, seed + i));
      ++class_counts[specs[i].class_name];
    }
    write_dataset(records, staging);
    json manifest;
    manifest["instance_count"] = records.size();
    manifest["class_counts"] = class_counts;
    manifest["seed"] = seed;
    manifest["points_per_view"] = points_per_view;
    std::ofstream mf(staging / "manifest.json");
    mf << manifest.dump(2) << "\n";
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }
  fs::remove_all(out);
  fs::rename(staging, out);

  std::cout << "simulated " << specs.size() << " instances across " << class_counts.size()
            << " classes into " << out_dir << "\n";
  return 0;
}

int cmd_build(const std::string& dataset_dir, const std::string& out_kb, std::uint64_t seed,
              int k, const std::string& scope, double delta0_mm, double ransac_threshold,
              int ransac_iterations) {
  seed = effective_seed(seed);
  auto records = ingest_dataset(dataset_dir);
  if (records.empty()) throw ValidationError("dataset " + dataset_dir + " contains no records");

  PropertyConfig pc;
  pc.delta0_mm = delta0_mm;
  pc.ransac.threshold_m = ransac_threshold;
  pc.ransac.iterations = ransac_iterations;
  pc.ransac.seed = seed;

  SymbolConfig sc;
  sc.k = k;
  sc.scope = scope == "class" ? ClusterScope::cls : ClusterScope::corpus;
  sc.seed = seed;

  KnowledgeBase kb = build_kb(records, pc, sc);
  kb.config = {
      {"seed", std::to_string(seed)},
      {"k", std::to_string(k)},
      {"scope", scope},
      {"delta0_mm", std::to_string(delta0_mm)},
      {"ransac_threshold_m", std::to_string(ransac_threshold)},
      {"ransac_iterations", std::to_string(ransac_iterations)},
  };
  atomic_write(out_kb, kb_to_json(kb));

  std::cout << "kb written: " << out_kb << "\n";
  std::cout << "  instances: " << kb.instances.size() << "\n";
  std::cout << "  classes:   " << kb.classes.size() << "\n";
  for (const auto& m : kb.models) {
    std::cout << "  " << m.property_name;
    if (m.class_name) std::cout << " [" << *m.class_name << "]";
    std::cout << " centroids:";
    for (double c : m.centroids) std::cout << " " << c;
    std::cout << "\n";
  }
  return 0;
}

int cmd_analyze(const std::string& kb_path, const std::string& properties, int k, int neighbors,
                std::uint64_t seed, const std::string& out_csv, const std::string& svg,
                bool bridge) {
  seed = effective_seed(seed);
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
  params.k_clusters = k;
  params.neighbors = neighbors;
  params.seed = seed;
  params.bridge_components = bridge;

  AnalysisResult result = analyze(kb, params);
  auto labels = numeric_class_labels(result.matrix);

  fs::path tmp_csv = out_csv + ".tmp";
  export_csv(result, tmp_csv, labels);
  fs::rename(tmp_csv, out_csv);
  if (!svg.empty()) export_svg(result, svg, labels);

  std::cout << "embedded " << result.matrix.n_rows() << " instances, " << k
            << " clusters, inertia " << result.report.inertia << "\n";
  std::cout << "wrote " << out_csv;
  if (!svg.empty()) std::cout << " and " << svg;
  std::cout << "\n";
  return 0;
}

double l1_marginal_distance(const ClassConcept& a, const ClassConcept& b) {
  double d = 0.0;
  std::set<std::string> props;
  for (const auto& [p, _] : a.marginals) props.insert(p);
  for (const auto& [p, _] : b.marginals) props.insert(p);
  for (const auto& prop : props) {
    std::set<std::string> labels;
    auto ita = a.marginals.find(prop);
    auto itb = b.marginals.find(prop);
    if (ita != a.marginals.end())
      for (const auto& [l, _] : ita->second) labels.insert(l);
    if (itb != b.marginals.end())
      for (const auto& [l, _] : itb->second) labels.insert(l);
    for (const auto& label : labels) {
      double pa = ita != a.marginals.end() && ita->second.count(label) ? ita->second.at(label) : 0;
      double pb = itb != b.marginals.end() && itb->second.count(label) ? itb->second.at(label) : 0;
      d += std::abs(pa - pb);
    }
  }
  return d;
}

int cmd_query(const std::string& kb_path, const std::string& class_name) {
  KnowledgeBase kb = load_kb(kb_path);

  const ClassConcept* target = nullptr;
  for (const auto& cls : kb.classes)
    if (cls.class_name == class_name) target = &cls;
  if (!target) {
    std::string known;
    for (const auto& cls : kb.classes) known += (known.empty() ? "" : ", ") + cls.class_name;
    throw ValidationError("unknown class '" + class_name + "'; known classes: " + known);
  }

  std::cout << "class: " << target->class_name << " (" << target->instance_count
            << " instances)\n";
  std::cout << "marginals:\n";
  for (const auto& [prop, dist] : target->marginals) {
    std::cout << "  " << prop << ":";
    for (const auto& [label, p] : dist) std::cout << " " << label << "=" << p;
    std::cout << "\n";
  }
  std::cout << "joints:\n";
  for (const auto& [pair, dist] : target->joints) {
    std::cout << "  " << pair << ":";
    for (const auto& [labels, p] : dist) std::cout << " (" << labels << ")=" << p;
    std::cout << "\n";
  }

  std::vector<std::pair<double, std::string>> nearest;
  for (const auto& cls : kb.classes)
    if (cls.class_name != class_name)
      nearest.push_back({l1_marginal_distance(*target, cls), cls.class_name});
  std::sort(nearest.begin(), nearest.end());
  std::cout << "nearest classes (L1 over marginals):\n";
  for (std::size_t i = 0; i < nearest.size() && i < 5; ++i)
    std::cout << "  " << nearest[i].second << " (" << nearest[i].first << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robot-centric object knowledge base pipeline"};
  app.require_subcommand(1);

  std::string spec_file, out_dir, dataset_dir, kb_path = "kb.json", out_csv = "emb.csv";
  std::string scope = "corpus", properties = "physical", svg, class_name;
  std::uint64_t seed = 42;
  int points_per_view = 2000, k = 3, k_clusters = 7, neighbors = 5;
  int ransac_iterations = 500;
  double delta0_mm = 10.0, ransac_threshold = 0.005;
  bool bridge = false;

  auto* sim = app.add_subcommand("simulate", "Simulate measurements for an object corpus spec");
  sim->add_option("--spec", spec_file, "corpus spec JSON (array of object specs)")->required();
  sim->add_option("--out", out_dir, "output dataset directory")->required();
  sim->add_option("--seed", seed, "RNG seed");
  sim->add_option("--points-per-view", points_per_view, "cloud points per view")
      ->check(CLI::Range(100, 1000000));

  auto* build = app.add_subcommand("build", "Build a knowledge base from a dataset directory");
  build->add_option("--dataset", dataset_dir, "dataset directory")->required();
  build->add_option("--out", kb_path, "output kb.json path");
  build->add_option("--k", k, "clusters per property");
  build->add_option("--scope", scope, "clustering scope")
      ->check(CLI::IsMember({"corpus", "class"}));
  build->add_option("--seed", seed, "RNG seed");
  build->add_option("--delta0-mm", delta0_mm, "rigidity decay scale in mm");
  build->add_option("--ransac-threshold", ransac_threshold, "RANSAC inlier threshold in m");
  build->add_option("--ransac-iterations", ransac_iterations, "RANSAC iterations");

  auto* analyze_cmd = app.add_subcommand("analyze", "Isomap embedding + K-means clustering");
  analyze_cmd->add_option("--kb", kb_path, "knowledge base JSON")->required();
  analyze_cmd->add_option("--properties", properties,
                          "physical | functional | a single property name");
  analyze_cmd->add_option("--k", k_clusters, "number of clusters");
  analyze_cmd->add_option("--neighbors", neighbors, "Isomap neighbor count");
  analyze_cmd->add_option("--seed", seed, "RNG seed");
  analyze_cmd->add_option("--out", out_csv, "output CSV path");
  analyze_cmd->add_option("--svg", svg, "optional SVG scatter plot path");
  analyze_cmd->add_flag("--bridge-components", bridge,
                        "join disconnected neighbor-graph components");

  auto* query = app.add_subcommand("query", "Print a class concept and its nearest classes");
  query->add_option("--kb", kb_path, "knowledge base JSON")->required();
  query->add_option("--class", class_name, "class name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(spec_file, out_dir, seed, points_per_view);
    if (build->parsed())
      return cmd_build(dataset_dir, kb_path, seed, k, scope, delta0_mm, ransac_threshold,
                       ransac_iterations);
    if (analyze_cmd->parsed())
      return cmd_analyze(kb_path, properties, k_clusters, neighbors, seed, out_csv, svg, bridge);
    if (query->parsed()) return cmd_query(kb_path, class_name);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
