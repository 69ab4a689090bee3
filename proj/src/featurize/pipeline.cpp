#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "szt/errors.hpp"
#include "szt/featurize.hpp"
#include "szt/log.hpp"

namespace szt {
namespace {

struct EventRows {
  std::vector<std::vector<double>> features;
  std::vector<double> starts;
  std::optional<SkippedEvent> skipped;
  std::exception_ptr fatal;
};

EventRows featurize_event(const Manifest& manifest, std::size_t index, std::span<const std::string> montage,
                          const WindowSpec& window, const FeatureSpec& feature, double target_fs) {
  const SeizureEvent& e = manifest.events[index];
  EventRows out;
  try {
    const Recording clip = read_channels(manifest.resolve(e), montage, e.start_s, e.stop_s, target_fs);
    for (const Window& w : window_clip(clip, window)) {
      out.features.push_back(window_features(w.samples, clip.fs, feature));
      out.starts.push_back(e.start_s + w.start_s);
    }
  } catch (const NumericError&) {
    out.fatal = std::current_exception();
  } catch (const UsageError&) {
    out.fatal = std::current_exception();
  } catch (const Error& err) {
    out.skipped = SkippedEvent{index, e.file_path, err.what()};
  } catch (const std::filesystem::filesystem_error& err) {
    out.skipped = SkippedEvent{index, e.file_path, err.what()};
  }
  return out;
}

}  // namespace

FeaturizeResult featurize_manifest(const Manifest& manifest, std::span<const std::string> montage,
                                   const WindowSpec& window, const FeatureSpec& feature,
                                   const FeaturizeOptions& options) {
  window.validate();
  feature.validate();
  if (montage.empty()) throw UsageError("featurize: montage is empty");
  const std::size_t n_events = manifest.events.size();
  std::vector<EventRows> per_event(n_events);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_events; i = next++) {
      per_event[i] = featurize_event(manifest, i, montage, window, feature, options.target_fs);
    }
  };
  const auto n_workers = static_cast<std::size_t>(std::max(1, options.workers));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < std::min(n_workers, n_events); ++t) pool.emplace_back(worker);
  }

  FeaturizeResult result;
  std::size_t total = 0;
  std::size_t dim = 0;
  for (const auto& ev : per_event) {
    if (ev.fatal) std::rethrow_exception(ev.fatal);
    total += ev.features.size();
    if (!ev.features.empty()) dim = ev.features.front().size();
  }
  for (const auto& ev : per_event) {
    if (ev.skipped) {
      log::warn("event_skipped", {{"event", ev.skipped->event_index},
                                  {"file", ev.skipped->file},
                                  {"reason", ev.skipped->reason}});
      result.skipped.push_back(*ev.skipped);
    }
  }
  if (total == 0) throw DataError("featurize: no windows produced from manifest");

  FeatureMatrix& m = result.matrix;
  std::vector<double> values;
  values.reserve(total * dim);
  for (std::size_t i = 0; i < n_events; ++i) {
    const auto& ev = per_event[i];
    const SeizureEvent& e = manifest.events[i];
    for (std::size_t w = 0; w < ev.features.size(); ++w) {
      values.insert(values.end(), ev.features[w].begin(), ev.features[w].end());
      m.labels.push_back(static_cast<std::uint8_t>(e.type));
      m.patients.push_back(e.patient_id);
      m.seizure_ids.push_back(static_cast<std::uint32_t>(i));
      m.window_starts.push_back(ev.starts[w]);
    }
  }
  m.features = RealMatrix(total, dim, std::move(values));
  return result;
}

}  // namespace szt
