#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "szt/numerics.hpp"
#include "szt/seizure_type.hpp"

namespace szt {

struct EdfHeader {
  std::string version;
  std::string patient_id;
  std::string recording_id;
  std::string start_date;  // dd.mm.yy
  std::string start_time;  // hh.mm.ss
  std::int64_t header_bytes = 0;
  std::int64_t record_count = -1;  // -1: unknown
  double record_duration = 0.0;    // seconds
  int signal_count = 0;
};

struct SignalHeader {
  std::string label;
  std::string transducer;
  std::string physical_dimension;
  double physical_min = 0.0;
  double physical_max = 0.0;
  int digital_min = 0;
  int digital_max = 0;
  std::string prefiltering;
  int samples_per_record = 0;

  double sampling_rate(double record_duration) const { return samples_per_record / record_duration; }
  // Linear digital -> physical calibration.
  double to_physical(int digital) const {
    return physical_min + (static_cast<double>(digital) - digital_min) * (physical_max - physical_min) /
                              static_cast<double>(digital_max - digital_min);
  }
};

struct EdfHeaders {
  EdfHeader header;
  std::vector<SignalHeader> signals;
};

// Decodes the fixed-width ASCII header block(s). Needs the full
// 256 + 256*N_sig prefix; data records are not touched.
EdfHeaders parse_edf_header(std::span<const std::uint8_t> raw);
EdfHeaders read_edf_header(const std::filesystem::path& path);

struct Recording {
  std::vector<std::string> channel_labels;
  double fs = 0.0;
  RealMatrix samples;  // channels x time, physical units

  double duration() const { return fs > 0.0 ? static_cast<double>(samples.cols()) / fs : 0.0; }
};

// Channels in montage order over [t0, t1) seconds, each resampled linearly to
// target_fs when its native rate differs. Labels are matched after trimming.
Recording read_channels(const std::filesystem::path& path, std::span<const std::string> montage, double t0,
                        double t1, double target_fs = 250.0);

struct SeizureEvent {
  std::string patient_id;
  std::string session_id;
  std::string file_path;  // as written in the manifest
  double start_s = 0.0;
  double stop_s = 0.0;
  SeizureType type = SeizureType::FNSZ;

  double duration() const { return stop_s - start_s; }
  bool operator==(const SeizureEvent&) const = default;
};

struct Manifest {
  std::string version;
  std::vector<SeizureEvent> events;
  std::size_t skipped_mysz = 0;
  // Relative file paths resolve against this directory.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const SeizureEvent& e) const;
};

inline constexpr std::string_view kManifestHeader = "patient_id,session_id,file_path,start_s,stop_s,type";

// CSV with the exact header row above. Leading lines starting with '#' are
// comments; "# version: <tag>" sets Manifest::version.
Manifest parse_manifest(std::string_view text);
Manifest load_manifest(const std::filesystem::path& path);
std::string serialize_manifest(const Manifest& manifest);

struct TypeStats {
  SeizureType type;
  std::size_t seizures = 0;
  double duration_s = 0.0;
  std::size_t patients = 0;
};

// Rows for types present in the manifest, by descending seizure count
// (ties by type order).
std::vector<TypeStats> dataset_stats(const Manifest& manifest);
std::string stats_csv(std::span<const TypeStats> rows);
std::string stats_table(std::span<const TypeStats> rows);

}  // namespace szt
