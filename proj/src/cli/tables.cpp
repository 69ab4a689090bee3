#include <algorithm>
#include <cstdio>
#include <sstream>

#include "szt/cli.hpp"
#include "szt/errors.hpp"

namespace szt::cli {
namespace {

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string results_table(const std::vector<CvRun>& runs, CvMode mode, int k) {
  std::vector<PreprocPoint> rows;
  std::vector<ClassifierKind> cols;
  for (const auto& run : runs) {
    if (std::find(rows.begin(), rows.end(), run.point) == rows.end()) rows.push_back(run.point);
    if (std::find(cols.begin(), cols.end(), run.classifier) == cols.end()) cols.push_back(run.classifier);
  }
  std::ostringstream os;
  os << "Weighted F1, " << k << "-fold " << to_string(mode) << "-wise cross-validation\n";
  os << pad("f_max", 7) << pad("W_l", 7) << pad("O", 7);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const std::string name(to_string(cols[c]));
    os << (c + 1 == cols.size() ? name : pad(name, 8));
  }
  os << '\n';
  for (const auto& p : rows) {
    os << pad(std::to_string(p.fmax_hz), 7) << pad(fmt("%g", p.window_s), 7) << pad(fmt("%g", p.overlap_s()), 7);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      std::string cell = "-";
      for (const auto& run : runs) {
        if (run.point == p && run.classifier == cols[c]) cell = fmt("%.4f", run.report.mean_weighted_f1);
      }
      os << (c + 1 == cols.size() ? cell : pad(cell, 8));
    }
    os << '\n';
  }
  return os.str();
}

nlohmann::json runs_to_json(const std::vector<CvRun>& runs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& run : runs) {
    arr.push_back({{"f_max", run.point.fmax_hz},
                   {"W_l", run.point.window_s},
                   {"overlap_ratio", run.point.overlap_ratio},
                   {"classifier", std::string(to_string(run.classifier))},
                   {"report", report_to_json(run.report)}});
  }
  return {{"runs", arr}};
}

std::vector<CvRun> runs_from_json(const nlohmann::json& doc) {
  std::vector<CvRun> runs;
  try {
    for (const auto& j : doc.at("runs")) {
      CvRun run;
      run.point.fmax_hz = j.at("f_max").get<int>();
      run.point.window_s = j.at("W_l").get<double>();
      run.point.overlap_ratio = j.at("overlap_ratio").get<double>();
      run.classifier = parse_classifier_kind(j.at("classifier").get<std::string>());
      run.report = report_from_json(j.at("report"));
      runs.push_back(std::move(run));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("metrics file: ") + e.what());
  }
  if (runs.empty()) throw DataError("metrics file: no runs");
  return runs;
}

}  // namespace szt::cli
