#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "szt/cli.hpp"
#include "szt/errors.hpp"
#include "szt/log.hpp"

namespace szt::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, std::string_view text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// The cache key covers everything that changes feature values but is not in
// the cache header itself.
std::uint64_t manifest_key(const RunConfig& config, const Manifest& manifest) {
  std::uint64_t h = fnv1a(serialize_manifest(manifest));
  h = fnv1a(fs::absolute(manifest.base_dir).lexically_normal().generic_string(), h);
  h = fnv1a(fmt_g(config.target_fs), h);
  return h;
}

json cv_spec_json(const RunConfig& config, const PreprocPoint& point, ClassifierKind kind) {
  return {{"method", static_cast<int>(config.method)},
          {"f_max", point.fmax_hz},
          {"W_l", point.window_s},
          {"O", point.overlap_s()},
          {"target_fs", config.target_fs},
          {"montage_channels", config.montage.size()},
          {"classifier", std::string(to_string(kind))},
          {"params", szt::config_to_json(config.model_config(kind))},
          {"standardize", config.standardize},
          {"seed", config.seed}};
}

MetricsReport cv_one(const RunConfig& config, const Manifest& manifest, const PreprocPoint& point,
                     ClassifierKind kind) {
  const FeatureSpec fspec{config.method, point.fmax_hz, config.log_floor};
  const FeatureMatrix fm = cached_features(config, manifest, point.window(), fspec);
  const FoldAssignment folds = make_folds(manifest.events, config.cv, config.fold_count(), config.seed);
  CvOptions opts;
  opts.standardize = config.standardize;
  opts.seed = config.seed;
  opts.workers = config.workers;
  opts.spec = cv_spec_json(config, point, kind);
  return run_cv(fm, config.model_config(kind), folds, opts);
}

}  // namespace

Manifest load_nonempty_manifest(const fs::path& path) {
  if (path.empty()) throw UsageError("no manifest given (--manifest or config.manifest)");
  if (fs::exists(path) && fs::is_regular_file(path)) {
    const std::string text = read_text(path);
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw DataError("empty manifest");
  }
  Manifest m = load_manifest(path);
  if (m.events.empty()) throw DataError("empty manifest");
  return m;
}

fs::path cache_path(const RunConfig& config, const Manifest& manifest, const WindowSpec& window,
                    const FeatureSpec& feature) {
  std::string name = hex64(manifest_key(config, manifest)).substr(0, 8) + "_m" + std::to_string(static_cast<int>(feature.method)) + "_f" + std::to_string(feature.fmax_hz) +
                     "_w" + fmt_g(window.length_s) + "_o" + fmt_g(window.overlap_s);
  if (feature.method == FeatureMethod::LogSpectrum) name += "_e" + fmt_g(feature.log_floor);
  return config.cache_root() / (name + "_" + hex64(montage_hash(config.montage)) + ".szft");
}

FeatureMatrix cached_features(const RunConfig& config, const Manifest& manifest, const WindowSpec& window,
                              const FeatureSpec& feature, bool* hit) {
  const fs::path path = cache_path(config, manifest, window, feature);
  const CacheHeader expect = make_cache_header(feature, window, config.montage, FeatureMatrix{});
  if (fs::exists(path)) {
    try {
      CacheContents c = read_cache(path, expect);
      log::info("cache_hit", {{"path", path.generic_string()}, {"rows", c.header.rows}});
      if (hit) *hit = true;
      return std::move(c.matrix);
    } catch (const DataError& e) {
      log::warn("cache_rebuild", {{"path", path.generic_string()}, {"reason", e.what()}});
    }
  }
  if (hit) *hit = false;
  FeaturizeOptions opts;
  opts.target_fs = config.target_fs;
  opts.workers = config.workers;
  FeaturizeResult res = featurize_manifest(manifest, config.montage, window, feature, opts);
  fs::create_directories(path.parent_path());
  write_cache(path, make_cache_header(feature, window, config.montage, res.matrix), res.matrix);
  log::info("cache_write", {{"path", path.generic_string()},
                            {"rows", res.matrix.rows()},
                            {"dim", res.matrix.dim()},
                            {"skipped_events", res.skipped.size()}});
  return std::move(res.matrix);
}

CommandOutput cmd_stats(const RunConfig& config) {
  const Manifest m = load_nonempty_manifest(config.manifest);
  echo_config(config, "stats");
  const auto rows = dataset_stats(m);
  const std::string table = stats_table(rows);
  write_text(config.out / "stats.csv", stats_csv(rows));
  write_text(config.out / "stats.txt", table);
  return {table};
}

CommandOutput cmd_synth(const RunConfig& config) {
  config.genspec.validate();
  echo_config(config, "synth");
  const Corpus corpus = generate_corpus(config.genspec, config.out, config.workers);
  write_text(config.out / "genspec.json", genspec_to_json(config.genspec).dump(2) + "\n");
  std::ostringstream os;
  os << "manifest: " << corpus.manifest_path.generic_string() << '\n'
     << "seizures: " << corpus.manifest.events.size() << '\n'
     << "clipped samples: " << corpus.clipped_samples << '\n';
  return {os.str()};
}

CommandOutput cmd_featurize(const RunConfig& config) {
  const Manifest m = load_nonempty_manifest(config.manifest);
  echo_config(config, "featurize");
  std::ostringstream os;
  for (const PreprocPoint& p : config.cv_points()) {
    const FeatureSpec fspec{config.method, p.fmax_hz, config.log_floor};
    bool hit = false;
    const FeatureMatrix fm = cached_features(config, m, p.window(), fspec, &hit);
    os << "f_max=" << p.fmax_hz << " W_l=" << fmt_g(p.window_s) << " O=" << fmt_g(p.overlap_s())
       << " rows=" << fm.rows() << " dim=" << fm.dim() << (hit ? " (cached)" : "") << '\n';
  }
  return {os.str()};
}

CommandOutput cmd_cv(const RunConfig& config) {
  const Manifest m = load_nonempty_manifest(config.manifest);
  echo_config(config, "cv");
  std::vector<CvRun> runs;
  for (const PreprocPoint& p : config.cv_points()) {
    for (ClassifierKind kind : config.classifier_list()) {
      CvRun run{p, kind, cv_one(config, m, p, kind)};
      log::info("cv_done", {{"f_max", p.fmax_hz},
                            {"W_l", p.window_s},
                            {"O", p.overlap_s()},
                            {"classifier", to_string(kind)},
                            {"mean_weighted_f1", run.report.mean_weighted_f1}});
      runs.push_back(std::move(run));
    }
  }
  const std::string table = results_table(runs, config.cv, config.fold_count());
  write_text(config.out / "metrics.json", runs_to_json(runs).dump(2) + "\n");
  write_text(config.out / "table.txt", table);
  return {table};
}

CommandOutput cmd_sweep(const RunConfig& config) {
  config.validate_grid();
  const Manifest m = load_nonempty_manifest(config.manifest);
  echo_config(config, "sweep");
  const FeatureProvider provider = [&](const WindowSpec& w, const FeatureSpec& f) {
    return cached_features(config, m, w, f);
  };
  std::vector<SweepRow> rows;
  for (ClassifierKind kind : config.classifier_list()) {
    SweepOptions opts;
    opts.method = config.method;
    opts.classifier = kind;
    opts.mode = config.cv;
    opts.folds = config.fold_count();
    opts.fold = config.sweep_fold;
    opts.budget = config.budget;
    opts.seed = config.seed;
    opts.standardize = config.standardize;
    opts.workers = config.workers;
    opts.log_floor = config.log_floor;
    opts.grid = config.grid;
    opts.on_point = [&](const SweepRow& row, const SearchResult& search) {
      write_text(config.out / "trials" /
                     (std::string(to_string(kind)) + "_" + std::to_string(row.grid_index) + ".jsonl"),
                 trial_log_jsonl(search));
    };
    auto part = sweep_preproc_grid(m.events, provider, opts);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  write_text(config.out / "sweep.csv", sweep_csv(rows));

  std::ostringstream os;
  os << "grid rows: " << rows.size() << '\n';
  const std::size_t n_points = [&] {
    std::vector<std::size_t> seen;
    for (const auto& r : rows) {
      if (std::find(seen.begin(), seen.end(), r.grid_index) == seen.end()) seen.push_back(r.grid_index);
    }
    return seen.size();
  }();
  if (n_points >= config.top) {
    const auto top = select_top_configs(rows, config.top);
    json arr = json::array();
    os << "top " << top.size() << " (f_max, W_l, O):\n";
    for (const auto& p : top) {
      arr.push_back({{"fmax", p.fmax_hz}, {"wl", p.window_s}, {"overlap", p.overlap_ratio}});
      os << "  " << p.fmax_hz << ", " << fmt_g(p.window_s) << ", " << fmt_g(p.overlap_s()) << '\n';
    }
    write_text(config.out / "top_configs.json", arr.dump(2) + "\n");
  } else {
    log::warn("top_configs_skipped", {{"points", n_points}, {"requested", config.top}});
  }
  return {os.str()};
}

CommandOutput cmd_search(const RunConfig& config) {
  const Manifest m = load_nonempty_manifest(config.manifest);
  echo_config(config, "search");
  const PreprocPoint point = config.point();
  const FeatureSpec fspec{config.method, point.fmax_hz, config.log_floor};
  const FeatureMatrix fm = cached_features(config, m, point.window(), fspec);
  const FoldAssignment folds = make_folds(m.events, config.cv, config.fold_count(), config.seed);
  const ClassifierKind kind = config.classifier;
  CvOptions opts;
  opts.standardize = config.standardize;
  opts.seed = config.seed;
  const Objective objective = [&](const json& params) {
    return run_cv(fm, szt::config_from_json(kind, params), folds, opts).mean_weighted_f1;
  };
  const SearchResult result = random_search(default_space(kind), objective, config.budget, config.seed,
                                            config.workers);
  write_text(config.out / "trials.jsonl", trial_log_jsonl(result));
  const Trial& best = result.best();
  const json summary = {{"classifier", std::string(to_string(kind))},
                        {"sampler", result.sampler},
                        {"budget", result.budget},
                        {"seed", result.seed},
                        {"best_index", best.index},
                        {"best_config", best.config},
                        {"best_weighted_f1", best.objective}};
  write_text(config.out / "search.json", summary.dump(2) + "\n");
  std::ostringstream os;
  os << "trials: " << result.trials.size() << "\nbest trial " << best.index << ": weighted F1 "
     << best.objective << "\nconfig: " << best.config.dump() << '\n';
  return {os.str()};
}

CommandOutput cmd_report(const RunConfig& config) {
  if (config.run_dir.empty()) throw UsageError("report needs a run directory (--run)");
  json doc;
  try {
    doc = json::parse(read_text(config.run_dir / "metrics.json"));
  } catch (const json::parse_error& e) {
    throw DataError(std::string("metrics.json: ") + e.what());
  }
  const auto runs = runs_from_json(doc);
  const std::string table = results_table(runs, runs.front().report.mode, runs.front().report.k);
  if (fs::absolute(config.out).lexically_normal() != fs::absolute(config.run_dir).lexically_normal()) {
    echo_config(config, "report");
    write_text(config.out / "table.txt", table);
  }
  return {table};
}

int run_command(const std::string& name, const RunConfig& config) {
  try {
    config.validate();
    CommandOutput out;
    if (name == "stats") {
      out = cmd_stats(config);
    } else if (name == "synth") {
      out = cmd_synth(config);
    } else if (name == "featurize") {
      out = cmd_featurize(config);
    } else if (name == "cv") {
      out = cmd_cv(config);
    } else if (name == "sweep") {
      out = cmd_sweep(config);
    } else if (name == "search") {
      out = cmd_search(config);
    } else if (name == "report") {
      out = cmd_report(config);
    } else {
      throw UsageError("unknown command: " + name);
    }
    std::cout << out.stdout_text << std::flush;
    return 0;
  } catch (const UsageError& e) {
    log::emit(log::Level::Error, "usage_error", {{"message", e.what()}});
    return 1;
  } catch (const NumericError& e) {
    log::emit(log::Level::Error, "numeric_error", {{"message", e.what()}});
    return 3;
  } catch (const DataError& e) {
    log::emit(log::Level::Error, "data_error", {{"message", e.what()}});
    return 2;
  } catch (const std::exception& e) {
    log::emit(log::Level::Error, "data_error", {{"message", e.what()}});
    return 2;
  }
}

}  // namespace szt::cli
