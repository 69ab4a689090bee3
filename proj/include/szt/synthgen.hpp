#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "szt/ingest.hpp"

namespace szt {

struct Band {
  double center_hz = 10.0;
  double bandwidth_hz = 0.0;  // components at center and center +- bandwidth/2
  double amplitude_uv = 10.0;
};

struct ClassSignature {
  std::vector<Band> bands;          // seizure-specific bands, active inside the event
  std::vector<double> group_gain;   // per channel group, applied to the bands above
  double amplitude_jitter = 0.1;    // relative sigma of the per-seizure amplitude
};

struct GenSpec {
  std::vector<SeizureType> classes{kAllSeizureTypes.begin(), kAllSeizureTypes.end()};
  int patients_per_class = 4;
  int seizures_per_patient = 4;
  double clip_duration_s = 60.0;
  double padding_s = 1.0;  // background-only signal before and after each seizure
  int channels = 20;
  int channel_groups = 4;
  double fs = 250.0;
  double noise_uv = 20.0;
  double separability = 1.0;        // delta in [0, 1]
  double class_amplitude_uv = 10.0; // class band amplitude at delta = 1
  double patient_gain_jitter = 0.2; // +- relative, per patient and per channel
  std::vector<Band> background{{2.0, 0.0, 20.0}};
  bool shared_patients = false;
  double physical_range_uv = 3276.7;
  std::uint64_t seed = 1;
  std::optional<std::vector<ClassSignature>> signatures;  // overrides the defaults

  void validate() const;
  std::size_t corpus_size() const;
};

GenSpec genspec_from_json(const nlohmann::json& doc);
nlohmann::json genspec_to_json(const GenSpec& spec);

// Class i gets one band at 4 + 3i Hz (2 Hz wide) with amplitude
// delta * class_amplitude_uv, boosted 3x on the channel groups selected by
// the bits of i + 1.
std::vector<ClassSignature> default_signatures(const GenSpec& spec);

// TUH-style referential labels ("EEG FP1-REF", ...), extended generically past 20.
std::vector<std::string> default_montage(int channels);

struct PatientProfile {
  std::string id;
  double gain = 1.0;
  std::vector<double> channel_gain;
};

struct ClipPlan {
  std::size_t class_index = 0;
  std::size_t patient_index = 0;  // into the patient table
  int seizure_index = 0;
  std::uint64_t seed = 0;
  std::string session_id;
};

// Synthesises one clip (padding + seizure + padding) in physical units.
Recording render_clip(const GenSpec& spec, const ClassSignature& signature, const PatientProfile& patient,
                      std::uint64_t clip_seed, bool with_noise = true);

struct Corpus {
  Manifest manifest;
  std::filesystem::path manifest_path;
  std::vector<std::string> montage;
  std::size_t clipped_samples = 0;
};

// Writes <out>/edf/*.edf and <out>/manifest.csv. Byte-identical for equal specs.
Corpus generate_corpus(const GenSpec& spec, const std::filesystem::path& out_dir, int workers = 1);

struct EdfWriteStats {
  std::size_t clipped = 0;
};

// Standard EDF with 1-second records, 16-bit samples over the symmetric
// physical range [-range, range]. Out-of-range samples are clipped and counted.
EdfWriteStats write_edf(const Recording& recording, const std::filesystem::path& path, double physical_range_uv,
                        const std::string& patient_id = "X", const std::string& recording_id = "synthetic");

}  // namespace szt
