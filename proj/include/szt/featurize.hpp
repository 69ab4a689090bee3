#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "szt/ingest.hpp"
#include "szt/numerics.hpp"

namespace szt {

struct WindowSpec {
  double length_s = 1.0;   // W_l
  double overlap_s = 0.75; // O, 0 <= O < W_l

  double stride() const { return length_s - overlap_s; }
  void validate() const;
};

enum class FeatureMethod : std::uint8_t { LogSpectrum = 1, SpectralCorrelation = 2 };

struct FeatureSpec {
  FeatureMethod method = FeatureMethod::LogSpectrum;
  int fmax_hz = 48;
  double log_floor = 1e-10;

  void validate() const;
};

// Number of whole windows in a clip of duration_s; partial tails are dropped.
std::size_t window_count(double duration_s, const WindowSpec& spec);

struct Window {
  double start_s = 0.0;  // relative to the clip start
  RealMatrix samples;    // channels x round(W_l * fs)
};

// Empty result (with a logged warning) when the clip is shorter than W_l.
std::vector<Window> window_clip(const Recording& clip, const WindowSpec& spec);

// Half-open bin range [first, last) of frequencies 1 <= f < f_max for a
// window of n samples at rate fs.
struct BinRange {
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t count() const { return last - first; }
};
BinRange frequency_bins(std::size_t window_samples, double fs, int fmax_hz);

// Per-window feature dimension for N channels.
std::size_t feature_dimension(const FeatureSpec& spec, std::size_t channels, std::size_t window_samples, double fs);

// log10(max(|X(f)|, floor)) for 1 <= f < f_max, channel-major (N x B flattened).
std::vector<double> method1_features(const RealMatrix& window, double fs, const FeatureSpec& spec);

// Clipped magnitudes -> per-bucket z-score across channels -> channel
// correlation -> strict upper triangle (row-major) followed by eigenvalues
// sorted by descending |value| (ties: descending signed value).
std::vector<double> method2_features(const RealMatrix& window, double fs, const FeatureSpec& spec);

// Dispatches on spec.method.
std::vector<double> window_features(const RealMatrix& window, double fs, const FeatureSpec& spec);

struct FeatureMatrix {
  RealMatrix features;  // rows = windows
  std::vector<std::uint8_t> labels;
  std::vector<std::string> patients;
  std::vector<std::uint32_t> seizure_ids;  // manifest event index
  std::vector<double> window_starts;       // seconds into the source file

  std::size_t rows() const { return features.rows(); }
  std::size_t dim() const { return features.cols(); }
  bool operator==(const FeatureMatrix&) const = default;
};

struct SkippedEvent {
  std::size_t event_index = 0;
  std::string file;
  std::string reason;
};

struct FeaturizeResult {
  FeatureMatrix matrix;
  std::vector<SkippedEvent> skipped;
};

struct FeaturizeOptions {
  double target_fs = 250.0;
  int workers = 1;
};

// Rows in manifest order then window order. Events whose files cannot be
// read or lack a montage channel are skipped and reported. Throws DataError
// if no windows remain.
FeaturizeResult featurize_manifest(const Manifest& manifest, std::span<const std::string> montage,
                                   const WindowSpec& window, const FeatureSpec& feature,
                                   const FeaturizeOptions& options = {});

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population; 0 marks a constant column
};

ColumnStats standardize_fit(const RealMatrix& train);
RealMatrix standardize_apply(const ColumnStats& stats, const RealMatrix& x);

// ---- binary feature cache -------------------------------------------------

inline constexpr std::uint16_t kCacheVersion = 1;

struct CacheHeader {
  FeatureMethod method = FeatureMethod::LogSpectrum;
  std::uint16_t fmax_hz = 0;
  float window_s = 0.0F;
  float overlap_s = 0.0F;
  std::uint64_t montage_hash = 0;
  std::uint32_t dim = 0;
  std::uint64_t rows = 0;
};

// FNV-1a 64 over the montage labels joined with ','.
std::uint64_t montage_hash(std::span<const std::string> montage);

CacheHeader make_cache_header(const FeatureSpec& feature, const WindowSpec& window,
                              std::span<const std::string> montage, const FeatureMatrix& m);

void write_cache(const std::filesystem::path& path, const CacheHeader& header, const FeatureMatrix& m);

struct CacheContents {
  CacheHeader header;
  FeatureMatrix matrix;
};

// With an expectation, method/f_max/W_l/O/montage must match or
// SpecMismatchError is thrown.
CacheContents read_cache(const std::filesystem::path& path, const std::optional<CacheHeader>& expect = std::nullopt);

}  // namespace szt
