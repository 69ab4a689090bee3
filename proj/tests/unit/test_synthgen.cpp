#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <set>

#include "oracles.hpp"
#include "szt/errors.hpp"
#include "szt/synthgen.hpp"

using namespace szt;
namespace fs = std::filesystem;

namespace {

GenSpec small_spec() {
  GenSpec g;
  g.patients_per_class = 3;
  g.seizures_per_patient = 2;
  g.clip_duration_s = 16;
  g.channels = 8;
  g.fs = 100;
  g.seed = 77;
  return g;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST(GenSpec, ValidationRejectsBadSpecs) {
  EXPECT_NO_THROW(small_spec().validate());
  auto bad = [](auto mutate) {
    GenSpec g = small_spec();
    mutate(g);
    return g;
  };
  EXPECT_THROW(bad([](GenSpec& g) { g.patients_per_class = 2; }).validate(), UsageError);
  EXPECT_THROW(bad([](GenSpec& g) { g.clip_duration_s = 8; }).validate(), UsageError);
  EXPECT_THROW(bad([](GenSpec& g) { g.separability = 1.5; }).validate(), UsageError);
  EXPECT_THROW(bad([](GenSpec& g) { g.classes.clear(); }).validate(), UsageError);
  EXPECT_THROW(bad([](GenSpec& g) { g.fs = 30; }).validate(), UsageError);  // class bands pass Nyquist
  EXPECT_THROW(bad([](GenSpec& g) { g.channel_groups = 9; }).validate(), UsageError);
  EXPECT_THROW(bad([](GenSpec& g) {
                 g.shared_patients = true;
                 g.patients_per_class = 3;
               }).validate(),
               UsageError);
}

TEST(GenSpec, JsonRoundTripAndUnknownKeys) {
  GenSpec g = small_spec();
  g.shared_patients = true;
  g.patients_per_class = 5;
  g.separability = 0.25;
  const auto doc = genspec_to_json(g);
  EXPECT_EQ(genspec_to_json(genspec_from_json(doc)), doc);
  auto broken = doc;
  broken["separabilty"] = 0.5;
  EXPECT_THROW(genspec_from_json(broken), UsageError);
}

TEST(DefaultSignatures, BandLayout) {
  const GenSpec g = small_spec();
  const auto sigs = default_signatures(g);
  ASSERT_EQ(sigs.size(), 7u);
  for (std::size_t i = 0; i < sigs.size(); ++i) {
    ASSERT_EQ(sigs[i].bands.size(), 1u);
    EXPECT_DOUBLE_EQ(sigs[i].bands[0].center_hz, 4.0 + 3.0 * static_cast<double>(i));
    ASSERT_EQ(sigs[i].group_gain.size(), 4u);
    for (std::size_t grp = 0; grp < 4; ++grp) {
      EXPECT_DOUBLE_EQ(sigs[i].group_gain[grp], ((i + 1) >> grp) & 1 ? 3.0 : 1.0);
    }
  }
}

TEST(RenderClip, NoiselessSpectrumPeaksAtClassBand) {
  GenSpec g = small_spec();
  g.background.clear();
  const auto sigs = default_signatures(g);
  const PatientProfile patient{"p", 1.0, std::vector<double>(8, 1.0)};
  for (std::size_t cls = 0; cls < sigs.size(); ++cls) {
    const Recording rec = render_clip(g, sigs[cls], patient, 5 + cls, false);
    ASSERT_EQ(rec.samples.rows(), 8u);
    ASSERT_EQ(rec.samples.cols(), static_cast<std::size_t>((16 + 2 * g.padding_s) * g.fs));
    const auto pad = static_cast<std::size_t>(g.padding_s * g.fs);
    for (std::size_t ch = 0; ch < 8; ++ch) {
      const auto row = rec.samples.row(ch);
      // Background only outside the event, and no background here.
      for (std::size_t t = 0; t < pad; ++t) ASSERT_EQ(row[t], 0.0);
      const auto seizure = row.subspan(pad, 16 * 100);
      const auto mags = oracle::dft_magnitudes(std::vector<double>(seizure.begin(), seizure.end()));
      const auto peak = static_cast<std::size_t>(std::max_element(mags.begin(), mags.end()) - mags.begin());
      const double peak_hz = static_cast<double>(peak) * g.fs / 1600.0;
      EXPECT_NEAR(peak_hz, sigs[cls].bands[0].center_hz, 1.0 + 1e-9) << "class " << cls << " channel " << ch;
    }
  }
}

TEST(RenderClip, SeparabilityZeroRemovesClassSignal) {
  GenSpec g = small_spec();
  g.separability = 0.0;
  g.background.clear();
  const auto sigs = default_signatures(g);
  const PatientProfile patient{"p", 1.0, std::vector<double>(8, 1.0)};
  const Recording rec = render_clip(g, sigs[3], patient, 1, false);
  for (double v : rec.samples.values()) ASSERT_EQ(v, 0.0);
}

TEST(GenerateCorpus, SizeStatsAndLayout) {
  const GenSpec g = small_spec();
  const fs::path dir = oracle::scratch_dir("synth_size");
  const Corpus c = generate_corpus(g, dir, 2);
  EXPECT_EQ(g.corpus_size(), 7u * 3 * 2);
  ASSERT_EQ(c.manifest.events.size(), g.corpus_size());
  EXPECT_TRUE(fs::exists(dir / "manifest.csv"));
  const Manifest reread = load_manifest(dir / "manifest.csv");
  EXPECT_EQ(reread.events, c.manifest.events);
  const auto stats = dataset_stats(reread);
  ASSERT_EQ(stats.size(), 7u);
  for (const auto& s : stats) {
    EXPECT_EQ(s.seizures, 6u);
    EXPECT_EQ(s.patients, 3u);
    EXPECT_DOUBLE_EQ(s.duration_s, 6 * 16.0);
  }
  for (const auto& e : reread.events) {
    EXPECT_DOUBLE_EQ(e.start_s, g.padding_s);
    EXPECT_DOUBLE_EQ(e.duration(), 16.0);
    const auto rec = read_channels(reread.resolve(e), c.montage, e.start_s, e.stop_s, g.fs);
    EXPECT_EQ(rec.samples.rows(), 8u);
    EXPECT_EQ(rec.samples.cols(), 1600u);
  }
}

TEST(GenerateCorpus, ByteIdenticalAcrossRunsAndWorkers) {
  GenSpec g = small_spec();
  g.classes = {SeizureType::FNSZ, SeizureType::ABSZ};
  const auto a = oracle::scratch_dir("synth_a");
  const auto b = oracle::scratch_dir("synth_b");
  generate_corpus(g, a, 1);
  generate_corpus(g, b, 3);
  const auto ta = tree(a), tb = tree(b);
  EXPECT_EQ(ta.size(), 2u * 3 * 2 + 1);
  EXPECT_TRUE(ta == tb);

  g.seed = 78;
  const auto c = oracle::scratch_dir("synth_c");
  generate_corpus(g, c, 1);
  EXPECT_FALSE(tree(c) == ta);
}

TEST(GenerateCorpus, SharedPatientsSpanAdjacentClasses) {
  GenSpec g = small_spec();
  g.shared_patients = true;
  g.patients_per_class = 4;
  g.seizures_per_patient = 1;
  const Corpus c = generate_corpus(g, oracle::scratch_dir("synth_shared"), 1);
  std::map<std::string, std::set<SeizureType>> types_of;
  for (const auto& e : c.manifest.events) types_of[e.patient_id].insert(e.type);
  std::size_t shared = 0;
  for (const auto& [p, t] : types_of) {
    EXPECT_LE(t.size(), 2u);
    if (t.size() == 2) ++shared;
  }
  EXPECT_EQ(shared, 6u);
  EXPECT_EQ(types_of.size(), 7u * 4 - 6);
  for (const auto& s : dataset_stats(c.manifest)) EXPECT_EQ(s.patients, 4u);
}
