#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "szt/errors.hpp"
#include "szt/ingest.hpp"
#include "szt/log.hpp"

namespace szt {
namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(strip(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_seconds(std::string_view field, std::size_t line_no, const char* name) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
    throw ManifestError("manifest line " + std::to_string(line_no) + ": bad " + name + " \"" + std::string(field) +
                        "\"");
  }
  return v;
}

std::string format_seconds(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  // Shortest representation that round-trips.
  for (int p = 1; p <= 17; ++p) {
    std::ostringstream t;
    t.precision(p);
    t << v;
    if (std::stod(t.str()) == v) return t.str();
  }
  return os.str();
}

}  // namespace

std::filesystem::path Manifest::resolve(const SeizureEvent& e) const {
  std::filesystem::path p(e.file_path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::set<std::tuple<std::string, std::string, double, double>> seen_events;
  std::map<std::pair<std::string, std::string>, std::string> file_of_session;
  std::map<std::string, std::pair<std::string, std::string>> session_of_file;

  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;

    if (!header_seen) {
      if (line.front() == '#') {
        auto body = strip(line.substr(1));
        if (body.rfind("version:", 0) == 0) m.version = std::string(strip(body.substr(8)));
        continue;
      }
      if (line != kManifestHeader) {
        throw ManifestError("manifest line " + std::to_string(line_no) + ": expected header \"" +
                            std::string(kManifestHeader) + "\"");
      }
      header_seen = true;
      continue;
    }

    const auto fields = split_commas(line);
    if (fields.size() != 6) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": expected 6 fields, got " +
                          std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": empty id or path");
    }
    const std::string_view code = fields[5];
    if (code == "MYSZ") {
      ++m.skipped_mysz;
      log::warn("manifest_skip_mysz", {{"line", line_no}});
      continue;
    }
    const auto type = parse_type_code(code);
    if (!type) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": unknown seizure type \"" +
                          std::string(code) + "\"");
    }
    SeizureEvent e;
    e.patient_id = std::string(fields[0]);
    e.session_id = std::string(fields[1]);
    e.file_path = std::string(fields[2]);
    e.start_s = parse_seconds(fields[3], line_no, "start_s");
    e.stop_s = parse_seconds(fields[4], line_no, "stop_s");
    e.type = *type;
    if (!(e.stop_s > e.start_s)) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": stop_s must exceed start_s");
    }

    const auto session_key = std::make_pair(e.patient_id, e.session_id);
    if (auto it = file_of_session.find(session_key); it != file_of_session.end() && it->second != e.file_path) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": patient/session " + e.patient_id + "/" +
                          e.session_id + " maps to more than one file");
    }
    if (auto it = session_of_file.find(e.file_path); it != session_of_file.end() && it->second != session_key) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": file " + e.file_path +
                          " is referenced by more than one patient/session");
    }
    file_of_session[session_key] = e.file_path;
    session_of_file[e.file_path] = session_key;

    if (!seen_events.emplace(e.patient_id, e.file_path, e.start_s, e.stop_s).second) {
      throw ManifestError("manifest line " + std::to_string(line_no) + ": duplicate event");
    }
    m.events.push_back(std::move(e));
  }
  if (!header_seen) throw ManifestError("manifest: missing header row");
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open manifest: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Manifest m = parse_manifest(ss.str());
  m.base_dir = path.parent_path();
  return m;
}

std::string serialize_manifest(const Manifest& manifest) {
  std::ostringstream os;
  if (!manifest.version.empty()) os << "# version: " << manifest.version << '\n';
  os << kManifestHeader << '\n';
  for (const auto& e : manifest.events) {
    os << e.patient_id << ',' << e.session_id << ',' << e.file_path << ',' << format_seconds(e.start_s) << ','
       << format_seconds(e.stop_s) << ',' << to_code(e.type) << '\n';
  }
  return os.str();
}

}  // namespace szt
