#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include "szt/ingest.hpp"

namespace szt {

std::vector<TypeStats> dataset_stats(const Manifest& manifest) {
  std::array<TypeStats, kNumClasses> acc{};
  std::array<std::set<std::string>, kNumClasses> patients;
  for (int c = 0; c < kNumClasses; ++c) acc[c].type = static_cast<SeizureType>(c);
  for (const auto& e : manifest.events) {
    auto& row = acc[class_id(e.type)];
    ++row.seizures;
    row.duration_s += e.duration();
    patients[class_id(e.type)].insert(e.patient_id);
  }
  std::vector<TypeStats> rows;
  for (int c = 0; c < kNumClasses; ++c) {
    if (acc[c].seizures == 0) continue;
    acc[c].patients = patients[c].size();
    rows.push_back(acc[c]);
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const TypeStats& a, const TypeStats& b) { return a.seizures > b.seizures; });
  return rows;
}

namespace {

std::string format_duration(double d) {
  std::ostringstream os;
  if (d == std::round(d)) {
    os << static_cast<long long>(d);
  } else {
    os << std::fixed << std::setprecision(3) << d;
    std::string s = os.str();
    while (s.back() == '0') s.pop_back();
    return s;
  }
  return os.str();
}

}  // namespace

std::string stats_csv(std::span<const TypeStats> rows) {
  std::ostringstream os;
  os << "type,n_seizures,duration_s,n_patients\n";
  for (const auto& r : rows) {
    os << to_code(r.type) << ',' << r.seizures << ',' << format_duration(r.duration_s) << ',' << r.patients << '\n';
  }
  return os.str();
}

std::string stats_table(std::span<const TypeStats> rows) {
  const std::vector<std::string> head = {"Seizure Type", "Seizure Number", "Duration (Seconds)", "Patient Number"};
  std::vector<std::array<std::string, 4>> body;
  std::array<std::size_t, 4> width{};
  for (std::size_t i = 0; i < 4; ++i) width[i] = head[i].size();
  for (const auto& r : rows) {
    body.push_back({std::string(display_name(r.type)), std::to_string(r.seizures), format_duration(r.duration_s),
                    std::to_string(r.patients)});
    for (std::size_t i = 0; i < 4; ++i) width[i] = std::max(width[i], body.back()[i].size());
  }
  std::ostringstream os;
  auto emit = [&](const auto& cells) {
    for (std::size_t i = 0; i < 4; ++i) {
      if (i > 0) os << "  ";
      if (i == 0) {
        os << std::left << std::setw(static_cast<int>(width[i])) << cells[i];
      } else {
        os << std::right << std::setw(static_cast<int>(width[i])) << cells[i];
      }
    }
    os << '\n';
  };
  emit(head);
  std::size_t total = 2 * 3;
  for (auto w : width) total += w;
  os << std::string(total, '-') << '\n';
  for (const auto& row : body) emit(row);
  return os.str();
}

}  // namespace szt
