#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "szt/cli.hpp"
#include "szt/errors.hpp"

namespace szt::cli {
namespace {

using nlohmann::json;

// Typed field access that reports the JSON path of a bad value.
class Reader {
 public:
  Reader(const json& doc, std::string path) : doc_(doc), path_(std::move(path)) {
    if (!doc_.is_object()) throw UsageError(path_ + ": expected an object");
  }

  void check_keys(std::initializer_list<std::string_view> known) const {
    for (auto it = doc_.begin(); it != doc_.end(); ++it) {
      if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
        throw UsageError(path_ + "." + it.key() + ": unknown key");
      }
    }
  }

  bool has(const char* key) const { return doc_.contains(key); }
  const json& raw(const char* key) const { return doc_.at(key); }
  std::string at(const char* key) const { return path_ + "." + key; }

  std::string string(const char* key) const {
    const json& v = doc_.at(key);
    if (!v.is_string()) throw UsageError(at(key) + ": expected a string");
    return v.get<std::string>();
  }

  double number(const char* key) const {
    const json& v = doc_.at(key);
    if (!v.is_number()) throw UsageError(at(key) + ": expected a number");
    return v.get<double>();
  }

  std::int64_t integer(const char* key, std::int64_t lo, std::int64_t hi) const {
    const json& v = doc_.at(key);
    if (!v.is_number_integer()) throw UsageError(at(key) + ": expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) {
      throw UsageError(at(key) + ": " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
    }
    return x;
  }

  std::uint64_t unsigned_integer(const char* key) const {
    const json& v = doc_.at(key);
    if (!v.is_number_unsigned()) throw UsageError(at(key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const char* key) const {
    const json& v = doc_.at(key);
    if (!v.is_boolean()) throw UsageError(at(key) + ": expected true or false");
    return v.get<bool>();
  }

 private:
  const json& doc_;
  std::string path_;
};

template <typename F>
auto wrap(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(path + ": " + e.what());
  }
}

PreprocPoint point_from(const json& j, const std::string& path) {
  Reader r(j, path);
  r.check_keys({"fmax", "wl", "overlap"});
  PreprocPoint p;
  p.fmax_hz = static_cast<int>(r.integer("fmax", 1, 100000));
  p.window_s = r.number("wl");
  p.overlap_ratio = r.has("overlap") ? r.number("overlap") : 0.75;
  return p;
}

json point_json(const PreprocPoint& p) { return {{"fmax", p.fmax_hz}, {"wl", p.window_s}, {"overlap", p.overlap_ratio}}; }

FeatureMethod method_from(std::int64_t m) {
  return m == 1 ? FeatureMethod::LogSpectrum : FeatureMethod::SpectralCorrelation;
}

void check_point(const PreprocPoint& p, double target_fs, const std::string& path) {
  if (!(p.window_s > 0.0)) throw UsageError(path + ".wl: must be > 0");
  if (p.overlap_ratio != 0.5 && p.overlap_ratio != 0.75) {
    throw UsageError(path + ".overlap: must be 0.5 or 0.75 (fraction of W_l)");
  }
  if (p.fmax_hz < 2) throw UsageError(path + ".fmax: must be >= 2");
  if (static_cast<double>(p.fmax_hz) > target_fs / 2.0) {
    throw UsageError(path + ".fmax: " + std::to_string(p.fmax_hz) + " Hz exceeds Nyquist of target_fs");
  }
}

}  // namespace

int RunConfig::fold_count() const {
  if (folds) return *folds;
  return cv == CvMode::SeizureWise ? 5 : 3;
}

std::vector<PreprocPoint> RunConfig::cv_points() const {
  if (!points.empty()) return points;
  return {point()};
}

std::vector<ClassifierKind> RunConfig::classifier_list() const {
  if (!classifiers.empty()) return classifiers;
  return {classifier};
}

ModelConfig RunConfig::model_config(ClassifierKind kind) const {
  const std::string name(to_string(kind));
  const json p = params.contains(name) ? params.at(name) : json::object();
  return wrap("config.params." + name, [&] { return config_from_json(kind, p); });
}

void RunConfig::validate_grid() const {
  if (grid.empty()) throw UsageError("config.grid: at least one point required");
  for (std::size_t i = 0; i < grid.size(); ++i) check_point(grid[i], target_fs, "config.grid[" + std::to_string(i) + "]");
}

std::filesystem::path RunConfig::cache_root() const { return cache_dir.empty() ? out / "cache" : cache_dir; }

void RunConfig::validate() const {
  if (montage.empty()) throw UsageError("config.montage: at least one channel required");
  if (!(target_fs > 0.0)) throw UsageError("config.target_fs: must be > 0");
  if (workers < 1) throw UsageError("config.workers: must be >= 1");
  if (fold_count() < 2) throw UsageError("config.folds: must be >= 2");
  if (budget < 1) throw UsageError("config.budget: must be >= 1");
  if (sweep_fold < 0 || sweep_fold >= fold_count()) throw UsageError("config.sweep_fold: outside [0, folds)");
  if (top < 1) throw UsageError("config.top: must be >= 1");
  const auto pts = cv_points();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    check_point(pts[i], target_fs, points.empty() ? std::string("config") : "config.points[" + std::to_string(i) + "]");
  }
  if (!params.is_object()) throw UsageError("config.params: expected an object");
  for (auto it = params.begin(); it != params.end(); ++it) {
    const auto kind = wrap("config.params." + it.key(), [&] { return parse_classifier_kind(it.key()); });
    (void)model_config(kind);
  }
}

RunConfig config_from_json(const json& doc) {
  RunConfig c;
  Reader r(doc, "config");
  r.check_keys({"manifest", "out", "cache_dir", "run_dir", "montage", "target_fs", "method", "fmax", "wl", "overlap",
                "log_floor", "points", "classifier", "classifiers", "params", "cv", "folds", "standardize", "seed",
                "workers", "budget", "sweep_fold", "top", "grid", "genspec", "command"});
  if (r.has("manifest")) c.manifest = r.string("manifest");
  if (r.has("out")) c.out = r.string("out");
  if (r.has("cache_dir")) c.cache_dir = r.string("cache_dir");
  if (r.has("run_dir")) c.run_dir = r.string("run_dir");
  if (r.has("montage")) {
    const json& m = r.raw("montage");
    if (!m.is_array()) throw UsageError("config.montage: expected an array of strings");
    c.montage.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i].is_string()) throw UsageError("config.montage[" + std::to_string(i) + "]: expected a string");
      c.montage.push_back(m[i].get<std::string>());
    }
  }
  if (r.has("target_fs")) c.target_fs = r.number("target_fs");
  if (r.has("method")) c.method = method_from(r.integer("method", 1, 2));
  if (r.has("fmax")) c.fmax_hz = static_cast<int>(r.integer("fmax", 1, 100000));
  if (r.has("wl")) c.window_s = r.number("wl");
  if (r.has("overlap")) c.overlap_ratio = r.number("overlap");
  if (r.has("log_floor")) c.log_floor = r.number("log_floor");
  auto points_from = [&](const char* key) {
    const json& a = r.raw(key);
    if (!a.is_array()) throw UsageError(r.at(key) + ": expected an array");
    std::vector<PreprocPoint> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(point_from(a[i], r.at(key) + "[" + std::to_string(i) + "]"));
    return out;
  };
  if (r.has("points")) c.points = points_from("points");
  if (r.has("grid")) c.grid = points_from("grid");
  if (r.has("classifier")) {
    c.classifier = wrap(r.at("classifier"), [&] { return parse_classifier_kind(r.string("classifier")); });
  }
  if (r.has("classifiers")) {
    const json& a = r.raw("classifiers");
    if (!a.is_array()) throw UsageError("config.classifiers: expected an array");
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string path = "config.classifiers[" + std::to_string(i) + "]";
      if (!a[i].is_string()) throw UsageError(path + ": expected a string");
      c.classifiers.push_back(wrap(path, [&] { return parse_classifier_kind(a[i].get<std::string>()); }));
    }
  }
  if (r.has("params")) c.params = r.raw("params");
  if (r.has("cv")) c.cv = wrap(r.at("cv"), [&] { return parse_cv_mode(r.string("cv")); });
  if (r.has("folds")) c.folds = static_cast<int>(r.integer("folds", 2, 1000));
  if (r.has("standardize")) c.standardize = r.boolean("standardize");
  if (r.has("seed")) c.seed = r.unsigned_integer("seed");
  if (r.has("workers")) c.workers = static_cast<int>(r.integer("workers", 1, 1024));
  if (r.has("budget")) c.budget = static_cast<std::size_t>(r.integer("budget", 1, 1000000));
  if (r.has("sweep_fold")) c.sweep_fold = static_cast<int>(r.integer("sweep_fold", 0, 999));
  if (r.has("top")) c.top = static_cast<std::size_t>(r.integer("top", 1, 1000));
  if (r.has("genspec")) {
    const json& g = r.raw("genspec");
    if (!g.is_object()) throw UsageError("config.genspec: expected an object");
    try {
      c.genspec = genspec_from_json(g);
    } catch (const UsageError& e) {
      throw UsageError(std::string("config.") + e.what());
    }
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json points = json::array();
  for (const auto& p : c.points) points.push_back(point_json(p));
  json grid = json::array();
  for (const auto& p : c.grid) grid.push_back(point_json(p));
  json classifiers = json::array();
  for (auto k : c.classifiers) classifiers.push_back(std::string(to_string(k)));
  json doc = {{"manifest", c.manifest.generic_string()},
              {"out", c.out.generic_string()},
              {"cache_dir", c.cache_dir.generic_string()},
              {"run_dir", c.run_dir.generic_string()},
              {"montage", c.montage},
              {"target_fs", c.target_fs},
              {"method", static_cast<int>(c.method)},
              {"fmax", c.fmax_hz},
              {"wl", c.window_s},
              {"overlap", c.overlap_ratio},
              {"log_floor", c.log_floor},
              {"points", points},
              {"classifier", std::string(to_string(c.classifier))},
              {"classifiers", classifiers},
              {"params", c.params},
              {"cv", std::string(to_string(c.cv))},
              {"folds", c.fold_count()},
              {"standardize", c.standardize},
              {"seed", c.seed},
              {"workers", c.workers},
              {"budget", c.budget},
              {"sweep_fold", c.sweep_fold},
              {"top", c.top},
              {"grid", grid},
              {"genspec", genspec_to_json(c.genspec)}};
  return doc;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path.string() + ": invalid JSON: " + e.what());
  }
  return config_from_json(doc);
}

void echo_config(const RunConfig& config, std::string_view command) {
  std::filesystem::create_directories(config.out);
  json doc = config_to_json(config);
  doc["command"] = std::string(command);
  std::ofstream out(config.out / "config.resolved.json", std::ios::binary | std::ios::trunc);
  out << doc.dump(2) << '\n';
}

}  // namespace szt::cli
