#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "szt/errors.hpp"
#include "szt/featurize.hpp"
#include "szt/log.hpp"
#include "szt/synthgen.hpp"

using namespace szt;

namespace {

const std::array<int, 5> kFmax = {12, 24, 48, 64, 96};
const std::array<int, 5> kWindow = {1, 2, 4, 8, 16};

RealMatrix random_window(std::mt19937_64& gen, std::size_t n, std::size_t len) {
  return RealMatrix(n, len, oracle::random_vector(gen, n * len, -50, 50));
}

// Method 2 assembled from the independent oracles: long-double DFT, explicit
// per-bucket z-scores, two-pass Pearson and Eigen's symmetric solver.
std::vector<double> method2_oracle(const RealMatrix& w, double fs, int fmax) {
  const std::size_t n = w.rows(), len = w.cols();
  const double res = fs / static_cast<double>(len);
  std::vector<std::size_t> bins;
  for (std::size_t k = 0; k <= len / 2; ++k) {
    const double f = static_cast<double>(k) * res;
    if (f >= 1.0 - 1e-9 && f < fmax - 1e-9) bins.push_back(k);
  }
  std::vector<std::vector<double>> mags(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto full = oracle::dft_magnitudes(std::vector<double>(w.row(c).begin(), w.row(c).end()));
    for (auto k : bins) mags[c].push_back(full[k]);
  }
  for (std::size_t b = 0; b < bins.size(); ++b) {
    double mean = 0, var = 0;
    for (std::size_t c = 0; c < n; ++c) mean += mags[c][b];
    mean /= static_cast<double>(n);
    for (std::size_t c = 0; c < n; ++c) var += (mags[c][b] - mean) * (mags[c][b] - mean);
    const double sd = std::sqrt(var / static_cast<double>(n));
    for (std::size_t c = 0; c < n; ++c) mags[c][b] = (mags[c][b] - mean) / sd;
  }
  Eigen::MatrixXd corr(n, n);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = i == j ? 1.0 : oracle::pearson(mags[i], mags[j]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(corr(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(corr, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end(), [](double a, double b) { return std::fabs(a) > std::fabs(b); });
  out.insert(out.end(), ev.begin(), ev.end());
  return out;
}

Recording sine_recording(std::size_t channels, double seconds, double fs, double hz) {
  Recording r;
  r.fs = fs;
  r.channel_labels = default_montage(static_cast<int>(channels));
  const auto n = static_cast<std::size_t>(std::llround(seconds * fs));
  r.samples = RealMatrix(channels, n);
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t t = 0; t < n; ++t) {
      r.samples(c, t) = (10.0 + c) * std::sin(2 * std::numbers::pi * hz * t / fs + 0.3 * c);
    }
  }
  return r;
}

class QuietLog : public ::testing::Test {
 protected:
  void SetUp() override { log::set_quiet(true); }
  void TearDown() override { log::set_quiet(false); }
};

}  // namespace

// ---- windows ----------------------------------------------------------------------

TEST(Windows, WorkedCounts) {
  EXPECT_EQ(window_count(10, {4, 2}), 4u);
  EXPECT_EQ(window_count(1, {1, 0.75}), 1u);
  EXPECT_EQ(window_count(4, {1, 0.75}), 13u);
  EXPECT_EQ(window_count(10, {1, 0.75}), 37u);
  EXPECT_EQ(window_count(0.5, {1, 0.75}), 0u);
}

TEST(Windows, CountFormulaHoldsAcrossTheGrid) {
  // Durations in hundredths of a second keep the oracle in exact integers.
  std::mt19937_64 gen(21);
  for (int wl : kWindow) {
    for (int ratio_pct : {50, 75}) {
      const long stride_c = wl * (100 - ratio_pct);  // (W_l - O) in hundredths
      const WindowSpec spec{static_cast<double>(wl), wl * ratio_pct / 100.0};
      std::uniform_int_distribution<long> dur(wl * 100L, 60000L);
      for (int i = 0; i < 300; ++i) {
        const long t_c = i < 3 ? wl * 100L + i * stride_c : dur(gen);
        const std::size_t expected = static_cast<std::size_t>((t_c - wl * 100L) / stride_c) + 1;
        EXPECT_EQ(window_count(static_cast<double>(t_c) / 100.0, spec), expected)
            << "T=" << t_c / 100.0 << " W_l=" << wl << " ratio=" << ratio_pct;
      }
    }
  }
}

TEST(Windows, ClipStartsAndShapes) {
  const Recording r = sine_recording(3, 10, 250, 5);
  const auto windows = window_clip(r, {4, 2});
  ASSERT_EQ(windows.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(windows[i].start_s, 2.0 * i);
    EXPECT_EQ(windows[i].samples.rows(), 3u);
    EXPECT_EQ(windows[i].samples.cols(), 1000u);
    EXPECT_EQ(windows[i].samples(1, 0), r.samples(1, 500 * i));
  }
  log::set_quiet(true);
  EXPECT_TRUE(window_clip(sine_recording(2, 0.5, 250, 5), {1, 0.75}).empty());
  log::set_quiet(false);
  EXPECT_THROW(window_clip(r, {1, 1}), UsageError);
}

// ---- shapes ---------------------------------------------------------------------

TEST(ShapeLaws, MethodOneAcrossGrid) {
  for (std::size_t n : {4u, 20u}) {
    for (int fmax : kFmax) {
      for (int wl : kWindow) {
        const FeatureSpec spec{FeatureMethod::LogSpectrum, fmax};
        const auto len = static_cast<std::size_t>(250 * wl);
        EXPECT_EQ(feature_dimension(spec, n, len, 250), n * static_cast<std::size_t>((fmax - 1) * wl));
      }
    }
  }
}

TEST(ShapeLaws, MethodOneOutputLengthMatches) {
  std::mt19937_64 gen(1);
  for (int fmax : kFmax) {
    for (int wl : kWindow) {
      const RealMatrix w = random_window(gen, 4, static_cast<std::size_t>(250 * wl));
      const auto f = method1_features(w, 250, {FeatureMethod::LogSpectrum, fmax});
      EXPECT_EQ(f.size(), 4u * static_cast<std::size_t>((fmax - 1) * wl));
    }
  }
}

TEST(ShapeLaws, TwentyByFortySeven) {
  std::mt19937_64 gen(2);
  const auto f = method1_features(random_window(gen, 20, 250), 250, {FeatureMethod::LogSpectrum, 48});
  EXPECT_EQ(f.size(), 940u);
  EXPECT_EQ(frequency_bins(250, 250, 48).count(), 47u);
  EXPECT_EQ(frequency_bins(250, 250, 48).first, 1u);
}

TEST(ShapeLaws, MethodTwoIndependentOfFmaxAndWindow) {
  std::mt19937_64 gen(3);
  for (int fmax : {12, 96}) {
    for (int wl : {1, 4}) {
      const auto f =
          method2_features(random_window(gen, 20, static_cast<std::size_t>(250 * wl)), 250, {FeatureMethod::SpectralCorrelation, fmax});
      EXPECT_EQ(f.size(), 210u);
      EXPECT_EQ(feature_dimension({FeatureMethod::SpectralCorrelation, fmax}, 20, 250 * wl, 250), 210u);
    }
  }
}

// ---- method 1 ----------------------------------------------------------------------

TEST(MethodOne, MatchesDftOracle) {
  std::mt19937_64 gen(4);
  for (std::size_t len : {250u, 500u, 256u}) {
    const RealMatrix w = random_window(gen, 3, len);
    const FeatureSpec spec{FeatureMethod::LogSpectrum, 24};
    const auto f = method1_features(w, 250, spec);
    const BinRange bins = frequency_bins(len, 250, 24);
    std::size_t idx = 0;
    for (std::size_t c = 0; c < 3; ++c) {
      const auto full = oracle::dft_magnitudes(std::vector<double>(w.row(c).begin(), w.row(c).end()));
      for (std::size_t k = bins.first; k < bins.last; ++k) {
        EXPECT_NEAR(f[idx++], std::log10(std::max(full[k], 1e-10)), 1e-9);
      }
    }
  }
}

TEST(MethodOne, ConstantWindowHitsTheFloor) {
  const RealMatrix w(3, 250, 7.0);
  for (double v : method1_features(w, 250, {FeatureMethod::LogSpectrum, 48, 1e-10})) EXPECT_DOUBLE_EQ(v, -10.0);
}

TEST(MethodOne, SinePeaksAtItsBin) {
  const Recording r = sine_recording(2, 1, 250, 10);
  const auto f = method1_features(r.samples, 250, {FeatureMethod::LogSpectrum, 24});
  ASSERT_EQ(f.size(), 46u);
  for (std::size_t c = 0; c < 2; ++c) {
    const auto first = f.begin() + static_cast<std::ptrdiff_t>(23 * c);
    const auto peak = static_cast<std::size_t>(std::max_element(first, first + 23) - first);
    EXPECT_EQ(peak + 1, 10u);  // bin 0 is 1 Hz
  }
}

TEST(MethodOne, FmaxAboveNyquistIsRejected) {
  const RealMatrix w(2, 100, 1.0);
  EXPECT_THROW(method1_features(w, 100, {FeatureMethod::LogSpectrum, 96}), DataError);
}

// ---- method 2 ----------------------------------------------------------------------

TEST(MethodTwo, MatchesCompositionalOracle) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 10; ++trial) {
    const RealMatrix w = random_window(gen, 4, 500);
    const auto got = method2_features(w, 250, {FeatureMethod::SpectralCorrelation, 48});
    const auto want = method2_oracle(w, 250, 48);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-8) << "i=" << i;
  }
}

TEST(MethodTwo, EigenvalueBlockSortedByMagnitude) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = method2_features(random_window(gen, 8, 250), 250, {FeatureMethod::SpectralCorrelation, 48});
    for (std::size_t i = 28; i + 1 < f.size(); ++i) EXPECT_GE(std::fabs(f[i]), std::fabs(f[i + 1]));
  }
}

TEST(MethodTwo, IdenticalChannelsGiveZeroBuckets) {
  // Every bucket is constant across channels, so z-scoring maps it to zero and
  // each channel becomes a degenerate (zero-variance) row of the correlation.
  RealMatrix w(5, 250);
  std::mt19937_64 gen(7);
  const auto base = oracle::random_vector(gen, 250);
  for (std::size_t c = 0; c < 5; ++c) std::copy(base.begin(), base.end(), w.row(c).begin());
  const auto f = method2_features(w, 250, {FeatureMethod::SpectralCorrelation, 48});
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(f[i], 0.0);
  for (std::size_t i = 10; i < 15; ++i) EXPECT_NEAR(f[i], 1.0, 1e-12);
}

TEST(MethodTwo, InvariantUnderCommonGainAndChannelOffsets) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> gain(0.1, 10), shift(-500, 500);
  for (int trial = 0; trial < 10; ++trial) {
    const RealMatrix w = random_window(gen, 6, 250);
    RealMatrix v = w;
    const double a = gain(gen);
    for (std::size_t c = 0; c < 6; ++c) {
      const double b = shift(gen);
      for (double& x : v.row(c)) x = a * x + b;
    }
    const FeatureSpec spec{FeatureMethod::SpectralCorrelation, 48};
    const auto f1 = method2_features(w, 250, spec), f2 = method2_features(v, 250, spec);
    for (std::size_t i = 0; i < f1.size(); ++i) EXPECT_NEAR(f1[i], f2[i], 1e-8);
  }
}

TEST(MethodTwo, NeedsTwoChannels) {
  EXPECT_THROW(method2_features(RealMatrix(1, 250, 1.0), 250, {FeatureMethod::SpectralCorrelation, 48}),
               DimensionError);
}

// ---- standardization --------------------------------------------------------------

TEST(Standardize, FitsTrainOnly) {
  std::mt19937_64 gen(9);
  RealMatrix train(50, 4, oracle::random_vector(gen, 200, 0, 10));
  for (std::size_t r = 0; r < 50; ++r) train(r, 2) = 5.0;
  const ColumnStats s = standardize_fit(train);
  EXPECT_EQ(s.stddev[2], 0.0);
  const RealMatrix t = standardize_apply(s, train);
  for (std::size_t c = 0; c < 4; ++c) {
    double mean = 0, sq = 0;
    for (std::size_t r = 0; r < 50; ++r) {
      mean += t(r, c);
      sq += t(r, c) * t(r, c);
    }
    mean /= 50;
    EXPECT_LT(std::fabs(mean), 1e-10);
    if (c == 2) {
      EXPECT_EQ(sq, 0.0);
    } else {
      EXPECT_NEAR(sq / 50, 1.0, 1e-10);
    }
  }
  RealMatrix test(20, 4, oracle::random_vector(gen, 80, 20, 30));
  const RealMatrix tt = standardize_apply(s, test);
  double mean0 = 0;
  for (std::size_t r = 0; r < 20; ++r) mean0 += tt(r, 0) / 20;
  EXPECT_GT(std::fabs(mean0), 1.0);
  EXPECT_THROW(standardize_apply(s, RealMatrix(1, 3)), DimensionError);
}

// ---- cache -----------------------------------------------------------------------

namespace {

FeatureMatrix sample_matrix() {
  std::mt19937_64 gen(10);
  FeatureMatrix m;
  m.features = RealMatrix(6, 3, oracle::random_vector(gen, 18, -1e6, 1e6));
  m.features(0, 0) = -0.0;
  m.features(1, 1) = std::numeric_limits<double>::denorm_min();
  m.labels = {0, 1, 2, 3, 4, 6};
  m.patients = {"a", "b", "a", "c", "ü", "b"};
  m.seizure_ids = {0, 0, 1, 2, 3, 4};
  m.window_starts = {0.0, 0.25, 1.5, 2.0, 3.125, 1e9};
  return m;
}

}  // namespace

TEST(Cache, LosslessRoundTrip) {
  const auto dir = oracle::scratch_dir("cache_roundtrip");
  const FeatureMatrix m = sample_matrix();
  const std::vector<std::string> montage = {"A", "B"};
  const CacheHeader h = make_cache_header({FeatureMethod::SpectralCorrelation, 24}, {2, 1.5}, montage, m);
  write_cache(dir / "c.szft", h, m);
  const CacheContents back = read_cache(dir / "c.szft", h);
  EXPECT_EQ(back.matrix.labels, m.labels);
  EXPECT_EQ(back.matrix.patients, m.patients);
  EXPECT_EQ(back.matrix.seizure_ids, m.seizure_ids);
  EXPECT_EQ(back.matrix.window_starts, m.window_starts);
  ASSERT_EQ(back.matrix.features.values().size(), m.features.values().size());
  EXPECT_EQ(std::memcmp(back.matrix.features.values().data(), m.features.values().data(), 18 * sizeof(double)), 0);
  EXPECT_EQ(back.header.method, FeatureMethod::SpectralCorrelation);
  EXPECT_EQ(back.header.fmax_hz, 24);
  EXPECT_EQ(back.header.window_s, 2.0F);
  EXPECT_EQ(back.header.overlap_s, 1.5F);
  EXPECT_EQ(back.header.dim, 3u);
  EXPECT_EQ(back.header.rows, 6u);
  EXPECT_EQ(back.header.montage_hash, montage_hash(montage));
}

TEST(Cache, HeaderLayoutIsLittleEndian) {
  const auto dir = oracle::scratch_dir("cache_layout");
  const FeatureMatrix m = sample_matrix();
  const CacheHeader h = make_cache_header({FeatureMethod::LogSpectrum, 48}, {1, 0.75}, std::vector<std::string>{"A"}, m);
  write_cache(dir / "c.szft", h, m);
  std::ifstream in(dir / "c.szft", std::ios::binary);
  std::vector<unsigned char> b((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ASSERT_GT(b.size(), 39u);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "SZFT");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[6], 1);   // method
  EXPECT_EQ(b[7], 48);  // f_max low byte
  EXPECT_EQ(b[8], 0);
  float wl = 0;
  std::memcpy(&wl, &b[9], 4);
  EXPECT_EQ(wl, 1.0F);
  std::uint32_t dim = 0;
  std::memcpy(&dim, &b[25], 4);
  EXPECT_EQ(dim, 3u);
  std::uint64_t rows = 0;
  std::memcpy(&rows, &b[29], 8);
  EXPECT_EQ(rows, 6u);
  EXPECT_EQ(b[37], 0);  // first row label
}

TEST(Cache, MontageHashIsFnv1aOfJoinedLabels) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : std::string("EEG A,EEG B")) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  EXPECT_EQ(montage_hash(std::vector<std::string>{"EEG A", "EEG B"}), h);
}

TEST(Cache, ErrorsOnMagicTruncationAndMismatch) {
  const auto dir = oracle::scratch_dir("cache_errors");
  const FeatureMatrix m = sample_matrix();
  const std::vector<std::string> montage = {"A"};
  const CacheHeader h24 = make_cache_header({FeatureMethod::LogSpectrum, 24}, {1, 0.75}, montage, m);
  write_cache(dir / "c.szft", h24, m);

  const CacheHeader h48 = make_cache_header({FeatureMethod::LogSpectrum, 48}, {1, 0.75}, montage, m);
  EXPECT_THROW(read_cache(dir / "c.szft", h48), SpecMismatchError);
  const CacheHeader other_montage =
      make_cache_header({FeatureMethod::LogSpectrum, 24}, {1, 0.75}, std::vector<std::string>{"B"}, m);
  EXPECT_THROW(read_cache(dir / "c.szft", other_montage), SpecMismatchError);

  std::ifstream in(dir / "c.szft", std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string bad = bytes;
  bad[0] = 'X';
  std::ofstream(dir / "magic.szft", std::ios::binary) << bad;
  EXPECT_THROW(read_cache(dir / "magic.szft"), CacheVersionError);
  bad = bytes;
  bad[4] = 9;
  std::ofstream(dir / "version.szft", std::ios::binary) << bad;
  EXPECT_THROW(read_cache(dir / "version.szft"), CacheVersionError);
  std::ofstream(dir / "short.szft", std::ios::binary) << bytes.substr(0, bytes.size() / 2);
  EXPECT_THROW(read_cache(dir / "short.szft"), CacheTruncatedError);
  std::ofstream(dir / "tiny.szft", std::ios::binary) << bytes.substr(0, 10);
  EXPECT_THROW(read_cache(dir / "tiny.szft"), CacheTruncatedError);
}

// ---- manifest featurization ----------------------------------------------------------

class FeaturizeManifest : public QuietLog {
 protected:
  void SetUp() override {
    QuietLog::SetUp();
    dir_ = oracle::scratch_dir("featurize_manifest");
    std::filesystem::create_directories(dir_ / "edf");
    const char* types[] = {"FNSZ", "GNSZ", "ABSZ"};
    std::string csv = "patient_id,session_id,file_path,start_s,stop_s,type\n";
    for (int i = 0; i < 3; ++i) {
      const Recording r = sine_recording(3, 12, 250, 4.0 + 3 * i);
      write_edf(r, dir_ / "edf" / ("f" + std::to_string(i) + ".edf"), 3276.7);
      csv += "p" + std::to_string(i) + ",s0,edf/f" + std::to_string(i) + ".edf,1,11," + types[i] + "\n";
    }
    std::ofstream(dir_ / "m.csv") << csv;
    montage_ = default_montage(3);
  }
  std::filesystem::path dir_;
  std::vector<std::string> montage_;
};

TEST_F(FeaturizeManifest, RowCountsAndProvenance) {
  const Manifest m = load_manifest(dir_ / "m.csv");
  const auto res = featurize_manifest(m, montage_, {1, 0.75}, {FeatureMethod::LogSpectrum, 48});
  EXPECT_TRUE(res.skipped.empty());
  ASSERT_EQ(res.matrix.rows(), 3u * 37u);
  EXPECT_EQ(res.matrix.dim(), 3u * 47u);
  EXPECT_EQ(res.matrix.labels[0], 0);
  EXPECT_EQ(res.matrix.labels[37], 1);
  EXPECT_EQ(res.matrix.labels[74], 3);
  EXPECT_EQ(res.matrix.patients[40], "p1");
  EXPECT_EQ(res.matrix.seizure_ids[80], 2u);
  EXPECT_DOUBLE_EQ(res.matrix.window_starts[0], 1.0);
  EXPECT_DOUBLE_EQ(res.matrix.window_starts[1], 1.25);
}

TEST_F(FeaturizeManifest, DeterministicAcrossRunsAndWorkers) {
  const Manifest m = load_manifest(dir_ / "m.csv");
  const FeatureSpec spec{FeatureMethod::SpectralCorrelation, 24};
  const auto a = featurize_manifest(m, montage_, {2, 1}, spec);
  const auto b = featurize_manifest(m, montage_, {2, 1}, spec, {250, 3});
  EXPECT_EQ(a.matrix, b.matrix);
  const auto h = make_cache_header(spec, {2, 1}, montage_, a.matrix);
  write_cache(dir_ / "a.szft", h, a.matrix);
  write_cache(dir_ / "b.szft", h, b.matrix);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  };
  EXPECT_EQ(slurp(dir_ / "a.szft"), slurp(dir_ / "b.szft"));
}

TEST_F(FeaturizeManifest, UnreadableFileIsSkippedAndReported) {
  std::filesystem::remove(dir_ / "edf" / "f1.edf");
  std::ofstream(dir_ / "edf" / "f1.edf") << "garbage";
  const Manifest m = load_manifest(dir_ / "m.csv");
  const auto res = featurize_manifest(m, montage_, {1, 0.75}, {FeatureMethod::LogSpectrum, 48});
  ASSERT_EQ(res.skipped.size(), 1u);
  EXPECT_EQ(res.skipped[0].event_index, 1u);
  EXPECT_EQ(res.skipped[0].file, "edf/f1.edf");
  EXPECT_EQ(res.matrix.rows(), 74u);
  EXPECT_EQ(std::count(res.matrix.seizure_ids.begin(), res.matrix.seizure_ids.end(), 1u), 0);
}

TEST_F(FeaturizeManifest, MissingMontageChannelSkipsEvent) {
  const Manifest m = load_manifest(dir_ / "m.csv");
  auto montage = montage_;
  montage.push_back("EEG NOPE-REF");
  EXPECT_THROW(featurize_manifest(m, montage, {1, 0.75}, {FeatureMethod::LogSpectrum, 48}), DataError);
}
