#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <thread>

#include "szt/errors.hpp"
#include "szt/rng.hpp"
#include "szt/synthgen.hpp"

namespace szt {
namespace {

constexpr std::uint64_t kPatientStream = 0x5041544945ULL;
constexpr std::uint64_t kClipStream = 0x434C4950ULL;

const std::vector<std::string> kTuhLabels = {
    "EEG FP1-REF", "EEG FP2-REF", "EEG F3-REF", "EEG F4-REF", "EEG C3-REF", "EEG C4-REF", "EEG P3-REF",
    "EEG P4-REF",  "EEG O1-REF",  "EEG O2-REF", "EEG F7-REF", "EEG F8-REF", "EEG T3-REF", "EEG T4-REF",
    "EEG T5-REF",  "EEG T6-REF",  "EEG A1-REF", "EEG A2-REF", "EEG FZ-REF", "EEG CZ-REF"};

std::vector<double> band_components(const Band& b) {
  if (b.bandwidth_hz <= 0.0) return {b.center_hz};
  return {b.center_hz - b.bandwidth_hz / 2.0, b.center_hz, b.center_hz + b.bandwidth_hz / 2.0};
}

void check_band(const Band& b, double nyquist, const char* what) {
  if (b.amplitude_uv < 0.0) throw UsageError(std::string(what) + " band amplitude must be >= 0");
  if (b.bandwidth_hz < 0.0) throw UsageError(std::string(what) + " bandwidth must be >= 0");
  if (!(b.center_hz + b.bandwidth_hz / 2.0 < nyquist)) {
    throw UsageError(std::string(what) + " band at " + std::to_string(b.center_hz) + " Hz reaches Nyquist");
  }
  if (!(b.center_hz - b.bandwidth_hz / 2.0 > 0.0)) throw UsageError(std::string(what) + " band must stay above 0 Hz");
}

std::string patient_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "p%03zu", index);
  return buf;
}

}  // namespace

void GenSpec::validate() const {
  if (classes.empty() || classes.size() > static_cast<std::size_t>(kNumClasses)) {
    throw UsageError("genspec: between 1 and 7 classes required");
  }
  if (patients_per_class < 3) throw UsageError("genspec: patients_per_class must be >= 3");
  if (shared_patients && patients_per_class < 4) {
    throw UsageError("genspec: shared_patients needs patients_per_class >= 4 to keep 3 fresh patients per class");
  }
  if (seizures_per_patient < 1) throw UsageError("genspec: seizures_per_patient must be >= 1");
  if (clip_duration_s < 16.0) throw UsageError("genspec: clip_duration_s must be >= 16 (largest grid window)");
  if (padding_s < 0.0) throw UsageError("genspec: padding_s must be >= 0");
  if (channels < 2) throw UsageError("genspec: channels must be >= 2");
  if (channel_groups < 1 || channel_groups > channels) throw UsageError("genspec: bad channel_groups");
  if (!(fs > 0.0) || fs != std::round(fs)) throw UsageError("genspec: fs must be a positive whole number");
  if (noise_uv < 0.0) throw UsageError("genspec: noise_uv must be >= 0");
  if (separability < 0.0 || separability > 1.0) throw UsageError("genspec: separability must be in [0, 1]");
  if (patient_gain_jitter < 0.0 || patient_gain_jitter >= 1.0) {
    throw UsageError("genspec: patient_gain_jitter must be in [0, 1)");
  }
  const double nyquist = fs / 2.0;
  for (const auto& b : background) check_band(b, nyquist, "background");
  const auto sigs = signatures.value_or(default_signatures(*this));
  if (sigs.size() != classes.size()) throw UsageError("genspec: one signature per class required");
  for (const auto& s : sigs) {
    for (const auto& b : s.bands) check_band(b, nyquist, "signature");
    if (s.group_gain.size() != static_cast<std::size_t>(channel_groups)) {
      throw UsageError("genspec: signature group_gain must have channel_groups entries");
    }
    for (double g : s.group_gain) {
      if (g < 0.0) throw UsageError("genspec: group gains must be >= 0");
    }
  }
}

std::size_t GenSpec::corpus_size() const {
  return classes.size() * static_cast<std::size_t>(patients_per_class) *
         static_cast<std::size_t>(seizures_per_patient);
}

std::vector<ClassSignature> default_signatures(const GenSpec& spec) {
  std::vector<ClassSignature> out;
  for (std::size_t i = 0; i < spec.classes.size(); ++i) {
    ClassSignature s;
    s.bands.push_back({4.0 + 3.0 * static_cast<double>(i), 2.0, spec.separability * spec.class_amplitude_uv});
    const std::size_t pattern = i + 1;
    for (int g = 0; g < spec.channel_groups; ++g) {
      s.group_gain.push_back(((pattern >> g) & 1U) != 0U ? 3.0 : 1.0);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> default_montage(int channels) {
  std::vector<std::string> out;
  for (int c = 0; c < channels; ++c) {
    if (static_cast<std::size_t>(c) < kTuhLabels.size()) {
      out.push_back(kTuhLabels[static_cast<std::size_t>(c)]);
    } else {
      out.push_back("EEG X" + std::to_string(c + 1) + "-REF");
    }
  }
  return out;
}

Recording render_clip(const GenSpec& spec, const ClassSignature& signature, const PatientProfile& patient,
                      std::uint64_t clip_seed, bool with_noise) {
  const auto n_ch = static_cast<std::size_t>(spec.channels);
  const double total_s = spec.clip_duration_s + 2.0 * spec.padding_s;
  const auto n = static_cast<std::size_t>(std::llround(total_s * spec.fs));
  const auto seizure_first = static_cast<std::size_t>(std::llround(spec.padding_s * spec.fs));
  const auto seizure_last = static_cast<std::size_t>(std::llround((spec.padding_s + spec.clip_duration_s) * spec.fs));

  Rng rng(clip_seed);
  const double amp_scale = std::max(0.0, 1.0 + signature.amplitude_jitter * rng.normal());

  Recording rec;
  rec.fs = spec.fs;
  rec.channel_labels = default_montage(spec.channels);
  rec.samples = RealMatrix(n_ch, n);
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t c = 0; c < n_ch; ++c) {
    const std::size_t group = c * static_cast<std::size_t>(spec.channel_groups) / n_ch;
    const double gain = patient.gain * patient.channel_gain[c];
    auto row = rec.samples.row(c);

    struct Component {
      double freq, amp, phase;
      bool seizure_only;
    };
    std::vector<Component> comps;
    for (const auto& b : spec.background) {
      const auto freqs = band_components(b);
      for (std::size_t k = 0; k < freqs.size(); ++k) {
        const double w = freqs.size() == 1 || k == 1 ? 1.0 : 0.5;
        comps.push_back({freqs[k], b.amplitude_uv * w, two_pi * rng.uniform(), false});
      }
    }
    for (const auto& b : signature.bands) {
      const auto freqs = band_components(b);
      for (std::size_t k = 0; k < freqs.size(); ++k) {
        const double w = freqs.size() == 1 || k == 1 ? 1.0 : 0.5;
        comps.push_back(
            {freqs[k], b.amplitude_uv * w * amp_scale * signature.group_gain[group], two_pi * rng.uniform(), true});
      }
    }
    for (std::size_t t = 0; t < n; ++t) {
      const double time = static_cast<double>(t) / spec.fs;
      const bool in_seizure = t >= seizure_first && t < seizure_last;
      double v = 0.0;
      for (const auto& comp : comps) {
        if (comp.seizure_only && !in_seizure) continue;
        v += comp.amp * std::sin(two_pi * comp.freq * time + comp.phase);
      }
      row[t] = gain * v;
    }
    if (with_noise) {
      for (std::size_t t = 0; t < n; ++t) row[t] += gain * spec.noise_uv * rng.normal();
    }
  }
  return rec;
}

namespace {

std::vector<PatientProfile> make_patients(const GenSpec& spec, std::size_t count) {
  std::vector<PatientProfile> out;
  const double j = spec.patient_gain_jitter;
  for (std::size_t p = 0; p < count; ++p) {
    Rng rng(mix_seed(spec.seed ^ kPatientStream, p));
    PatientProfile prof;
    prof.id = patient_name(p);
    prof.gain = rng.uniform(1.0 - j, 1.0 + j);
    for (int c = 0; c < spec.channels; ++c) prof.channel_gain.push_back(rng.uniform(1.0 - j, 1.0 + j));
    out.push_back(std::move(prof));
  }
  return out;
}

}  // namespace

Corpus generate_corpus(const GenSpec& spec, const std::filesystem::path& out_dir, int workers) {
  spec.validate();
  const auto sigs = spec.signatures.value_or(default_signatures(spec));
  const auto ppc = static_cast<std::size_t>(spec.patients_per_class);
  const std::size_t n_classes = spec.classes.size();

  // Patient table: ppc per class, unique across classes. With shared
  // patients, the first patient of class i > 0 is the last patient of class i-1.
  std::vector<std::vector<std::size_t>> class_patients(n_classes);
  std::size_t n_patients = 0;
  for (std::size_t ci = 0; ci < n_classes; ++ci) {
    for (std::size_t p = 0; p < ppc; ++p) {
      if (spec.shared_patients && ci > 0 && p == 0) {
        class_patients[ci].push_back(class_patients[ci - 1].back());
      } else {
        class_patients[ci].push_back(n_patients++);
      }
    }
  }
  const auto patients = make_patients(spec, n_patients);

  std::vector<ClipPlan> plans;
  for (std::size_t ci = 0; ci < n_classes; ++ci) {
    for (std::size_t p = 0; p < ppc; ++p) {
      for (int s = 0; s < spec.seizures_per_patient; ++s) {
        ClipPlan plan;
        plan.class_index = ci;
        plan.patient_index = class_patients[ci][p];
        plan.seizure_index = s;
        plan.seed = mix_seed(spec.seed ^ kClipStream, plans.size());
        char buf[32];
        std::snprintf(buf, sizeof buf, "c%zus%02d", ci, s);
        plan.session_id = buf;
        plans.push_back(std::move(plan));
      }
    }
  }

  std::filesystem::create_directories(out_dir / "edf");
  Corpus corpus;
  corpus.montage = default_montage(spec.channels);
  corpus.manifest.version = "synthetic";
  corpus.manifest.base_dir = out_dir;
  std::vector<std::size_t> clipped(plans.size(), 0);
  std::vector<std::string> errors(plans.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < plans.size(); i = next++) {
      const ClipPlan& plan = plans[i];
      const PatientProfile& patient = patients[plan.patient_index];
      try {
        const Recording rec = render_clip(spec, sigs[plan.class_index], patient, plan.seed);
        const auto rel = std::filesystem::path("edf") / (patient.id + "_" + plan.session_id + ".edf");
        clipped[i] = write_edf(rec, out_dir / rel, spec.physical_range_uv, patient.id).clipped;
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, workers));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(n_workers, plans.size()); ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw DataError("generate_corpus: " + e);
  }

  for (std::size_t i = 0; i < plans.size(); ++i) {
    const ClipPlan& plan = plans[i];
    const PatientProfile& patient = patients[plan.patient_index];
    SeizureEvent e;
    e.patient_id = patient.id;
    e.session_id = plan.session_id;
    e.file_path = "edf/" + patient.id + "_" + plan.session_id + ".edf";
    e.start_s = spec.padding_s;
    e.stop_s = spec.padding_s + spec.clip_duration_s;
    e.type = spec.classes[plan.class_index];
    corpus.manifest.events.push_back(std::move(e));
    corpus.clipped_samples += clipped[i];
  }
  corpus.manifest_path = out_dir / "manifest.csv";
  std::ofstream out(corpus.manifest_path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write manifest: " + corpus.manifest_path.string());
  out << serialize_manifest(corpus.manifest);
  return corpus;
}

// ---- JSON -------------------------------------------------------------------

namespace {

nlohmann::json band_json(const Band& b) {
  return {{"center_hz", b.center_hz}, {"bandwidth_hz", b.bandwidth_hz}, {"amplitude_uv", b.amplitude_uv}};
}

Band band_from(const nlohmann::json& j) {
  return {j.at("center_hz").get<double>(), j.value("bandwidth_hz", 0.0), j.at("amplitude_uv").get<double>()};
}

}  // namespace

GenSpec genspec_from_json(const nlohmann::json& doc) {
  GenSpec s;
  try {
    static const std::vector<std::string> known = {
        "classes", "patients_per_class", "seizures_per_patient", "clip_duration_s", "padding_s",
        "channels", "channel_groups", "fs", "noise_uv", "separability", "class_amplitude_uv",
        "patient_gain_jitter", "background", "shared_patients", "physical_range_uv", "seed", "signatures"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
        throw UsageError("genspec: unknown key \"" + it.key() + "\"");
      }
    }
    if (doc.contains("classes")) {
      s.classes.clear();
      for (const auto& c : doc.at("classes")) {
        const auto t = parse_type_code(c.get<std::string>());
        if (!t) throw UsageError("genspec.classes: unknown type \"" + c.get<std::string>() + "\"");
        s.classes.push_back(*t);
      }
    }
    s.patients_per_class = doc.value("patients_per_class", s.patients_per_class);
    s.seizures_per_patient = doc.value("seizures_per_patient", s.seizures_per_patient);
    s.clip_duration_s = doc.value("clip_duration_s", s.clip_duration_s);
    s.padding_s = doc.value("padding_s", s.padding_s);
    s.channels = doc.value("channels", s.channels);
    s.channel_groups = doc.value("channel_groups", s.channel_groups);
    s.fs = doc.value("fs", s.fs);
    s.noise_uv = doc.value("noise_uv", s.noise_uv);
    s.separability = doc.value("separability", s.separability);
    s.class_amplitude_uv = doc.value("class_amplitude_uv", s.class_amplitude_uv);
    s.patient_gain_jitter = doc.value("patient_gain_jitter", s.patient_gain_jitter);
    s.shared_patients = doc.value("shared_patients", s.shared_patients);
    s.physical_range_uv = doc.value("physical_range_uv", s.physical_range_uv);
    s.seed = doc.value("seed", s.seed);
    if (doc.contains("background")) {
      s.background.clear();
      for (const auto& b : doc.at("background")) s.background.push_back(band_from(b));
    }
    if (doc.contains("signatures")) {
      std::vector<ClassSignature> sigs;
      for (const auto& j : doc.at("signatures")) {
        ClassSignature sig;
        for (const auto& b : j.at("bands")) sig.bands.push_back(band_from(b));
        sig.group_gain = j.at("group_gain").get<std::vector<double>>();
        sig.amplitude_jitter = j.value("amplitude_jitter", sig.amplitude_jitter);
        sigs.push_back(std::move(sig));
      }
      s.signatures = std::move(sigs);
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("genspec: ") + e.what());
  }
  return s;
}

nlohmann::json genspec_to_json(const GenSpec& s) {
  nlohmann::json classes = nlohmann::json::array();
  for (auto t : s.classes) classes.push_back(to_code(t));
  nlohmann::json background = nlohmann::json::array();
  for (const auto& b : s.background) background.push_back(band_json(b));
  nlohmann::json doc = {{"classes", classes},
                        {"patients_per_class", s.patients_per_class},
                        {"seizures_per_patient", s.seizures_per_patient},
                        {"clip_duration_s", s.clip_duration_s},
                        {"padding_s", s.padding_s},
                        {"channels", s.channels},
                        {"channel_groups", s.channel_groups},
                        {"fs", s.fs},
                        {"noise_uv", s.noise_uv},
                        {"separability", s.separability},
                        {"class_amplitude_uv", s.class_amplitude_uv},
                        {"patient_gain_jitter", s.patient_gain_jitter},
                        {"background", background},
                        {"shared_patients", s.shared_patients},
                        {"physical_range_uv", s.physical_range_uv},
                        {"seed", s.seed}};
  if (s.signatures) {
    nlohmann::json sigs = nlohmann::json::array();
    for (const auto& sig : *s.signatures) {
      nlohmann::json bands = nlohmann::json::array();
      for (const auto& b : sig.bands) bands.push_back(band_json(b));
      sigs.push_back({{"bands", bands}, {"group_gain", sig.group_gain}, {"amplitude_jitter", sig.amplitude_jitter}});
    }
    doc["signatures"] = sigs;
  }
  return doc;
}

}  // namespace szt
