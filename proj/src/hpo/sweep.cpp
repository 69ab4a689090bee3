#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>

#include "szt/errors.hpp"
#include "szt/hpo.hpp"
#include "szt/log.hpp"

namespace szt {

std::vector<PreprocPoint> preproc_grid() {
  std::vector<PreprocPoint> grid;
  for (int fmax : kGridFmax) {
    for (double wl : kGridWindow) {
      for (double ratio : kGridOverlapRatio) grid.push_back({fmax, wl, ratio});
    }
  }
  return grid;
}

std::vector<SweepRow> sweep_preproc_grid(std::span<const SeizureEvent> events, const FeatureProvider& features,
                                         const SweepOptions& options) {
  if (events.empty()) throw DataError("sweep: manifest has no events");
  if (options.fold < 0 || options.fold >= options.folds) throw UsageError("sweep: fold index out of range");
  const FoldAssignment folds = make_folds(events, options.mode, options.folds, options.seed);
  const SearchSpace space = options.space.value_or(default_space(options.classifier));

  std::vector<SweepRow> rows;
  const auto grid = preproc_grid();
  for (const PreprocPoint& point : options.grid) {
    const FeatureSpec fspec{options.method, point.fmax_hz, options.log_floor};
    const FeatureMatrix fm = features(point.window(), fspec);
    CvOptions cv;
    cv.standardize = options.standardize;
    cv.seed = options.seed;
    cv.workers = 1;
    const Objective objective = [&](const nlohmann::json& params) {
      const ModelConfig model = config_from_json(options.classifier, params);
      return run_fold(fm, model, folds, options.fold, cv).weighted_f1;
    };
    const SearchResult search = random_search(space, objective, options.budget, options.seed, options.workers);

    SweepRow row;
    row.method = options.method;
    row.classifier = options.classifier;
    row.point = point;
    const auto it = std::find(grid.begin(), grid.end(), point);
    row.grid_index = static_cast<std::size_t>(it - grid.begin());
    row.weighted_f1 = search.best().objective;
    row.best_config = search.best().config;
    log::info("sweep_point", {{"f_max", point.fmax_hz},
                              {"W_l", point.window_s},
                              {"O", point.overlap_s()},
                              {"weighted_f1", row.weighted_f1}});
    if (options.on_point) options.on_point(row, search);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

std::string fmt(double v, const char* spec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "method,classifier,f_max,W_l,O,weighted_f1\n";
  for (const auto& r : rows) {
    os << static_cast<int>(r.method) << ',' << to_string(r.classifier) << ',' << r.point.fmax_hz << ','
       << fmt(r.point.window_s, "%g") << ',' << fmt(r.point.overlap_s(), "%g") << ','
       << fmt(r.weighted_f1, "%.10f") << '\n';
  }
  return os.str();
}

std::vector<SweepRow> parse_sweep_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("method,classifier,f_max,W_l,O,weighted_f1", 0) != 0) {
    throw DataError("sweep CSV: missing header");
  }
  const auto grid = preproc_grid();
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string method, classifier, fmax, wl, o, score;
    if (!std::getline(ls, method, ',') || !std::getline(ls, classifier, ',') || !std::getline(ls, fmax, ',') ||
        !std::getline(ls, wl, ',') || !std::getline(ls, o, ',') || !std::getline(ls, score, ',')) {
      throw DataError("sweep CSV: malformed row \"" + line + "\"");
    }
    SweepRow r;
    try {
      r.method = static_cast<FeatureMethod>(std::stoi(method));
      r.classifier = parse_classifier_kind(classifier);
      r.point.fmax_hz = std::stoi(fmax);
      r.point.window_s = std::stod(wl);
      r.point.overlap_ratio = std::stod(o) / r.point.window_s;
      r.weighted_f1 = std::stod(score);
    } catch (const std::logic_error&) {
      throw DataError("sweep CSV: malformed row \"" + line + "\"");
    }
    const auto it = std::find_if(grid.begin(), grid.end(), [&](const PreprocPoint& p) {
      return p.fmax_hz == r.point.fmax_hz && p.window_s == r.point.window_s &&
             std::abs(p.overlap_ratio - r.point.overlap_ratio) < 1e-9;
    });
    if (it != grid.end()) r.point.overlap_ratio = it->overlap_ratio;
    r.grid_index = static_cast<std::size_t>(it - grid.begin());
    rows.push_back(r);
  }
  return rows;
}

std::vector<PreprocPoint> select_top_configs(std::span<const SweepRow> rows, std::size_t n) {
  if (rows.empty()) throw UsageError("select_top_configs: empty sweep table");
  struct Entry {
    PreprocPoint point;
    std::size_t order;
    double score;
  };
  std::vector<Entry> best;
  for (const auto& r : rows) {
    auto it = std::find_if(best.begin(), best.end(), [&](const Entry& e) { return e.point == r.point; });
    if (it == best.end()) {
      best.push_back({r.point, r.grid_index, r.weighted_f1});
    } else {
      it->score = std::max(it->score, r.weighted_f1);
    }
  }
  if (n > best.size()) {
    throw UsageError("select_top_configs: asked for " + std::to_string(n) + " configs but table has " +
                     std::to_string(best.size()));
  }
  std::stable_sort(best.begin(), best.end(), [](const Entry& a, const Entry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.order < b.order;
  });
  std::vector<PreprocPoint> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(best[i].point);
  return out;
}

}  // namespace szt
