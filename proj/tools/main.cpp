// specmet command line: analyze one model, correlate a corpus, transform
// weights, evaluate accuracy, or synthesize test fixtures.
//
// Exit codes: 0 success, 2 usage, 3 load failure, 4 numeric failure.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "specmet/analysis.hpp"
#include "specmet/errors.hpp"
#include "specmet/metrics.hpp"
#include "specmet/model_store.hpp"
#include "specmet/net_eval.hpp"
#include "specmet/npy.hpp"
#include "specmet/plfit.hpp"
#include "specmet/serialize.hpp"
#include "specmet/synth.hpp"
#include "specmet/transforms.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitLoad = 3;
constexpr int kExitNumeric = 4;

struct AnalyzeArgs {
  std::string model_dir;
  int min_tail = specmet::kDefaultMinTail;
  std::string scan_csv_dir;
  bool pretty = false;
};

struct CorpusArgs {
  std::string corpus_path;
  std::string metric;
  std::string target = "test_acc";
  std::string by = "subgroup";
  double strength = 0.1;
  int min_tail = specmet::kDefaultMinTail;
  std::string csv_dir;
  std::string metrics_csv;
  bool pretty = false;
};

struct SmoothArgs {
  std::string model_dir;
  std::string transform;
  std::string out_dir;
  double lo_q = 0.005;
  double hi_q = 0.995;
};

struct EvalArgs {
  std::string model_dir;
  std::string inputs;
  std::string labels;
};

struct SynthModelArgs {
  std::string out_dir;
  std::string alphas = "2.2,2.8,3.4";
  int rows = 128;
  int cols = 192;
  std::uint64_t seed = 1;
  std::string model_id = "synthetic";
};

struct SynthCorpusArgs {
  std::string out_dir;
  int groups = 4;
  int per_group = 12;
  std::uint64_t seed = 1;
};

struct SynthMlpArgs {
  std::string out_dir;
  int dim = 32;
  int hidden = 64;
  int classes = 4;
  int samples = 256;
  std::uint64_t seed = 1;
};

std::vector<double> parse_alpha_list(const std::string& csv) {
  std::vector<double> alphas;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = csv.find(',', start);
    const std::string tok = csv.substr(start, comma == std::string::npos ? comma : comma - start);
    if (!tok.empty()) {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used != tok.size()) throw specmet::DomainError("bad alpha '" + tok + "'");
      alphas.push_back(v);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (alphas.empty()) throw specmet::DomainError("no layer alphas given");
  return alphas;
}

void print_json(const ordered_json& j, bool pretty) {
  if (pretty) std::cout << j.dump(2) << "\n";
  else std::cout << j.dump() << "\n";
}

// A corpus is either a directory (scanned recursively for manifest.json) or a
// JSON array of model directories, resolved relative to the file.
std::vector<fs::path> corpus_model_dirs(const fs::path& corpus) {
  std::vector<fs::path> dirs;
  if (fs::is_directory(corpus)) {
    for (const auto& entry : fs::recursive_directory_iterator(corpus)) {
      if (entry.is_regular_file() && entry.path().filename() == "manifest.json")
        dirs.push_back(entry.path().parent_path());
    }
  } else if (fs::is_regular_file(corpus)) {
    std::ifstream in(corpus);
    ordered_json j;
    try {
      j = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw specmet::FormatError("cannot parse corpus file " + corpus.string() + ": " + e.what());
    }
    if (!j.is_array()) throw specmet::FormatError("corpus file must be a JSON array of paths");
    for (const auto& item : j) {
      if (!item.is_string()) throw specmet::FormatError("corpus entries must be strings");
      fs::path p = item.get<std::string>();
      if (p.is_relative()) p = corpus.parent_path() / p;
      dirs.push_back(p);
    }
  } else {
    throw specmet::LoadError("corpus path does not exist: " + corpus.string());
  }
  std::sort(dirs.begin(), dirs.end());
  if (dirs.empty()) throw specmet::LoadError("no models found under " + corpus.string());
  return dirs;
}

int cmd_analyze(const AnalyzeArgs& args) {
  const specmet::ModelBundle bundle = specmet::load_model(args.model_dir);
  const auto per_matrix = specmet::collect_layer_metrics(bundle, args.min_tail);

  std::vector<double> init_distances;
  bool all_have_init = !bundle.layers.empty();
  for (const auto& d : bundle.data)
    if (!d.init) all_have_init = false;
  if (all_have_init) {
    for (std::size_t i = 0; i < bundle.layers.size(); ++i) {
      const auto cur = specmet::extract_matrices(bundle.layers[i], bundle.data[i].weights);
      const auto ini = specmet::extract_matrices(bundle.layers[i], *bundle.data[i].init);
      for (std::size_t s = 0; s < cur.size(); ++s)
        init_distances.push_back((cur[s].values - ini[s].values).norm());
    }
  }
  const specmet::ModelMetrics m =
      specmet::aggregate_layer_metrics(bundle.model_id, per_matrix, init_distances);

  if (!args.scan_csv_dir.empty()) {
    fs::create_directories(args.scan_csv_dir);
    for (const auto& lm : per_matrix) {
      if (!lm.fit) continue;
      const std::string name = specmet::sanitize_filename(lm.owner_layer) + "_s" +
                               std::to_string(lm.slice_index) + ".csv";
      specmet::write_scan_csv(*lm.fit, fs::path(args.scan_csv_dir) / name);
    }
  }
  print_json(specmet::analyze_json(bundle, m, per_matrix), args.pretty);
  return kExitOk;
}

int cmd_corpus(const CorpusArgs& args) {
  const auto& names = specmet::metric_names();
  if (std::find(names.begin(), names.end(), args.metric) == names.end()) {
    std::cerr << "unknown metric '" << args.metric << "'; valid:";
    for (const auto& n : names) std::cerr << " " << n;
    std::cerr << "\n";
    return kExitUsage;
  }
  if (args.target != "test_acc" && args.target != "train_acc") {
    std::cerr << "unknown target '" << args.target << "' (want test_acc or train_acc)\n";
    return kExitUsage;
  }
  if (args.by != "subgroup" && args.by != "group") {
    std::cerr << "unknown grouping '" << args.by << "' (want subgroup or group)\n";
    return kExitUsage;
  }

  std::vector<specmet::CorpusRow> rows;
  std::vector<specmet::ModelRecord> records;
  for (const auto& dir : corpus_model_dirs(args.corpus_path)) {
    const specmet::ModelBundle bundle = specmet::load_model(dir);
    const specmet::ModelMetrics m = specmet::model_metrics(bundle, args.min_tail);
    specmet::CorpusRow row;
    row.model_id = bundle.model_id;
    row.subgroup = args.by == "group" ? bundle.group : bundle.subgroup;
    row.hyperparams = bundle.hyperparams;
    row.metrics = m;
    row.train_acc = bundle.train_acc;
    row.test_acc = bundle.test_acc;
    rows.push_back(row);

    specmet::ModelRecord rec;
    rec.model_id = bundle.model_id;
    rec.subgroup = row.subgroup;
    for (const auto& name : names)
      if (auto v = specmet::metric_value(m, name)) rec.values[name] = *v;
    rec.train_acc = bundle.train_acc;
    rec.test_acc = bundle.test_acc;
    records.push_back(std::move(rec));
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.model_id < b.model_id; });

  const specmet::CorrelationReport report =
      specmet::subgroup_report(records, args.metric, args.target, args.strength);

  if (!args.metrics_csv.empty()) specmet::write_corpus_csv(rows, args.metrics_csv);
  if (!args.csv_dir.empty()) {
    fs::create_directories(args.csv_dir);
    std::map<std::string, std::vector<std::pair<double, double>>> points;
    for (const auto& rec : records) {
      const auto x = specmet::record_value(rec, args.metric);
      const auto y = specmet::record_value(rec, args.target);
      if (x && y) points[rec.subgroup].emplace_back(*x, *y);
    }
    for (const auto& [name, pts] : points)
      specmet::write_subgroup_csv(pts, args.metric, args.target,
                                  fs::path(args.csv_dir) /
                                      (specmet::sanitize_filename(name) + ".csv"));
  }
  print_json(specmet::to_json(report), args.pretty);
  return kExitOk;
}

int cmd_smooth(const SmoothArgs& args) {
  specmet::TransformSpec spec;
  spec.kind = specmet::parse_transform(args.transform);
  spec.lo_q = args.lo_q;
  spec.hi_q = args.hi_q;
  const specmet::ModelBundle bundle = specmet::load_model(args.model_dir);
  const specmet::ModelBundle transformed = specmet::transform_model(bundle, spec);
  specmet::write_model(transformed, args.out_dir);
  std::cerr << "wrote " << transform_name(spec.kind) << " model to " << args.out_dir << "\n";
  return kExitOk;
}

int cmd_eval(const EvalArgs& args) {
  const specmet::ModelBundle bundle = specmet::load_model(args.model_dir);
  const specmet::Dataset data = specmet::load_dataset(args.inputs, args.labels);
  const double acc = specmet::accuracy(bundle, data);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", acc);
  std::cout << buf << "\n";
  return kExitOk;
}

int cmd_synth_model(const SynthModelArgs& args) {
  const specmet::ModelBundle bundle = specmet::make_tpl_model(
      args.model_id, parse_alpha_list(args.alphas), args.rows, args.cols, args.seed);
  specmet::write_model(bundle, args.out_dir);
  std::cerr << "wrote model '" << bundle.model_id << "' (" << bundle.depth() << " layers) to "
            << args.out_dir << "\n";
  return kExitOk;
}

int cmd_synth_corpus(const SynthCorpusArgs& args) {
  const auto corpus = specmet::make_simpson_corpus(args.groups, args.per_group, args.seed);
  for (const auto& bundle : corpus)
    specmet::write_model(bundle, fs::path(args.out_dir) / bundle.model_id);
  std::cerr << "wrote " << corpus.size() << " models to " << args.out_dir << "\n";
  return kExitOk;
}

int cmd_synth_mlp(const SynthMlpArgs& args) {
  const specmet::EvalCase ec =
      specmet::make_mlp_case(args.dim, args.hidden, args.classes, args.samples, args.seed);
  const fs::path out(args.out_dir);
  specmet::write_model(ec.model, out / "model");
  specmet::Tensor inputs;
  inputs.shape = {ec.dataset.inputs.rows(), ec.dataset.inputs.cols()};
  inputs.data.resize(static_cast<std::size_t>(ec.dataset.inputs.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      inputs.data.data(), ec.dataset.inputs.rows(), ec.dataset.inputs.cols()) =
      ec.dataset.inputs;
  fs::create_directories(out);
  specmet::write_array_file(out / "inputs.npy", inputs);
  specmet::write_labels_file(out / "labels.npy", ec.dataset.labels);
  std::cerr << "wrote mlp model and dataset to " << args.out_dir << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scale and shape diagnostics for neural-network weight matrices"};
  app.require_subcommand(1);

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "fit one model and print its metrics as JSON");
  analyze->add_option("model_dir", analyze_args.model_dir, "model directory")->required();
  analyze->add_option("--min-tail", analyze_args.min_tail, "minimum tail points for a fit");
  analyze->add_option("--scan-csv", analyze_args.scan_csv_dir,
                      "directory for per-matrix x_min scan CSVs");
  analyze->add_flag("--pretty", analyze_args.pretty, "indent the JSON output");

  CorpusArgs corpus_args;
  auto* corpus = app.add_subcommand("corpus", "correlate a metric against accuracy across models");
  corpus->add_option("corpus", corpus_args.corpus_path,
                     "corpus directory or JSON array of model dirs")->required();
  corpus->add_option("--metric", corpus_args.metric, "metric column")->required();
  corpus->add_option("--target", corpus_args.target, "test_acc or train_acc");
  corpus->add_option("--by", corpus_args.by, "partition key: subgroup or group");
  corpus->add_option("--strength", corpus_args.strength, "minimum |tau| counted as a trend");
  corpus->add_option("--min-tail", corpus_args.min_tail, "minimum tail points for a fit");
  corpus->add_option("--csv-dir", corpus_args.csv_dir, "directory for per-subgroup scatter CSVs");
  corpus->add_option("--metrics-csv", corpus_args.metrics_csv, "write per-model metrics CSV here");
  corpus->add_flag("--pretty", corpus_args.pretty, "indent the JSON output");

  SmoothArgs smooth_args;
  auto* smooth = app.add_subcommand("smooth", "write a transformed copy of a model");
  smooth->add_option("model_dir", smooth_args.model_dir, "model directory")->required();
  smooth->add_option("--transform", smooth_args.transform, "svd10, svd20, or clip")->required();
  smooth->add_option("--out", smooth_args.out_dir, "output model directory")->required();
  smooth->add_option("--lo-q", smooth_args.lo_q, "low clip quantile");
  smooth->add_option("--hi-q", smooth_args.hi_q, "high clip quantile");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "print a model's argmax accuracy on a dataset");
  eval->add_option("model_dir", eval_args.model_dir, "model directory")->required();
  eval->add_option("--inputs", eval_args.inputs, "NPY inputs, one row per example")->required();
  eval->add_option("--labels", eval_args.labels, "NPY int64 labels")->required();

  auto* synth = app.add_subcommand("synth", "write synthetic fixtures");
  synth->require_subcommand(1);

  SynthModelArgs sm_args;
  auto* sm = synth->add_subcommand("model", "one model with planted tail exponents");
  sm->add_option("--out", sm_args.out_dir, "output directory")->required();
  sm->add_option("--alphas", sm_args.alphas, "comma-separated per-layer exponents");
  sm->add_option("--rows", sm_args.rows, "matrix rows");
  sm->add_option("--cols", sm_args.cols, "matrix cols");
  sm->add_option("--seed", sm_args.seed, "rng seed");
  sm->add_option("--id", sm_args.model_id, "model_id");

  SynthCorpusArgs sc_args;
  auto* sc = synth->add_subcommand("corpus", "corpus with a planted trend reversal");
  sc->add_option("--out", sc_args.out_dir, "output directory")->required();
  sc->add_option("--groups", sc_args.groups, "number of subgroups");
  sc->add_option("--per-group", sc_args.per_group, "models per subgroup");
  sc->add_option("--seed", sc_args.seed, "rng seed");

  SynthMlpArgs sp_args;
  auto* sp = synth->add_subcommand("mlp", "relu MLP plus a dataset it classifies perfectly");
  sp->add_option("--out", sp_args.out_dir, "output directory")->required();
  sp->add_option("--dim", sp_args.dim, "input width");
  sp->add_option("--hidden", sp_args.hidden, "hidden width");
  sp->add_option("--classes", sp_args.classes, "number of classes");
  sp->add_option("--samples", sp_args.samples, "dataset rows");
  sp->add_option("--seed", sp_args.seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*analyze) return cmd_analyze(analyze_args);
    if (*corpus) return cmd_corpus(corpus_args);
    if (*smooth) return cmd_smooth(smooth_args);
    if (*eval) return cmd_eval(eval_args);
    if (*sm) return cmd_synth_model(sm_args);
    if (*sc) return cmd_synth_corpus(sc_args);
    if (*sp) return cmd_synth_mlp(sp_args);
  } catch (const specmet::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoad;
  } catch (const specmet::UnsupportedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoad;
  } catch (const specmet::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoad;
  } catch (const specmet::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoad;
  } catch (const specmet::LoadError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitLoad;
  } catch (const specmet::Error& e) {  // domain, numeric, insufficient data
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}
