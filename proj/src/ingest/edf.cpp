#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "szt/errors.hpp"
#include "szt/ingest.hpp"

namespace szt {
namespace {

constexpr std::size_t kMainHeaderBytes = 256;
constexpr std::size_t kSignalHeaderBytes = 256;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

class FieldReader {
 public:
  explicit FieldReader(std::span<const std::uint8_t> raw) : raw_(raw) {}

  std::string text(std::size_t width) {
    if (pos_ + width > raw_.size()) throw EdfError("EDF header truncated");
    std::string_view view(reinterpret_cast<const char*>(raw_.data() + pos_), width);
    pos_ += width;
    return trim(view);
  }

  template <typename T>
  T number(std::size_t width, const char* field) {
    const std::string s = text(width);
    T value{};
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    // from_chars does not accept a leading '+'.
    if (begin != end && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (s.empty() || ec != std::errc{} || ptr != end) {
      throw EdfError(std::string("EDF header: non-numeric field '") + field + "': \"" + s + "\"");
    }
    return value;
  }

  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> raw_;
  std::size_t pos_ = 0;
};

std::string normalize_label(std::string_view label) {
  std::string out = trim(label);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

}  // namespace

EdfHeaders parse_edf_header(std::span<const std::uint8_t> raw) {
  if (raw.size() < kMainHeaderBytes) throw EdfError("EDF header truncated: fewer than 256 bytes");
  FieldReader f(raw);
  EdfHeaders out;
  EdfHeader& h = out.header;
  h.version = f.text(8);
  h.patient_id = f.text(80);
  h.recording_id = f.text(80);
  h.start_date = f.text(8);
  h.start_time = f.text(8);
  h.header_bytes = f.number<std::int64_t>(8, "header bytes");
  const std::string reserved = f.text(44);
  h.record_count = f.number<std::int64_t>(8, "number of records");
  h.record_duration = f.number<double>(8, "record duration");
  h.signal_count = f.number<int>(4, "number of signals");

  if (reserved.rfind("EDF+D", 0) == 0) throw EdfError("EDF+D (discontinuous) files are not supported");
  if (h.signal_count <= 0) throw EdfError("EDF header: signal count must be > 0");
  if (!(h.record_duration > 0.0)) throw EdfError("EDF header: record duration must be > 0");
  if (h.record_count < -1) throw EdfError("EDF header: invalid record count");
  const auto expected = static_cast<std::int64_t>(kMainHeaderBytes + kSignalHeaderBytes * h.signal_count);
  if (h.header_bytes != expected) {
    throw EdfError("EDF header size mismatch: field says " + std::to_string(h.header_bytes) + ", expected " +
                   std::to_string(expected));
  }
  if (raw.size() < static_cast<std::size_t>(expected)) throw EdfError("EDF header truncated in signal headers");

  const auto ns = static_cast<std::size_t>(h.signal_count);
  out.signals.resize(ns);
  // Signal fields are stored column-wise: all labels, then all transducers, ...
  for (auto& s : out.signals) s.label = f.text(16);
  for (auto& s : out.signals) s.transducer = f.text(80);
  for (auto& s : out.signals) s.physical_dimension = f.text(8);
  for (auto& s : out.signals) s.physical_min = f.number<double>(8, "physical minimum");
  for (auto& s : out.signals) s.physical_max = f.number<double>(8, "physical maximum");
  for (auto& s : out.signals) s.digital_min = f.number<int>(8, "digital minimum");
  for (auto& s : out.signals) s.digital_max = f.number<int>(8, "digital maximum");
  for (auto& s : out.signals) s.prefiltering = f.text(80);
  for (auto& s : out.signals) s.samples_per_record = f.number<int>(8, "samples per record");
  for (std::size_t i = 0; i < ns; ++i) f.text(32);

  for (const auto& s : out.signals) {
    if (s.label == "EDF Annotations") throw EdfError("EDF+ annotation channels are not supported");
    if (s.digital_max <= s.digital_min) {
      throw EdfError("EDF signal '" + s.label + "': digital max must exceed digital min");
    }
    if (s.physical_max == s.physical_min) {
      throw EdfError("EDF signal '" + s.label + "': physical max equals physical min");
    }
    if (s.samples_per_record <= 0) throw EdfError("EDF signal '" + s.label + "': samples per record must be > 0");
  }
  return out;
}

namespace {

std::vector<std::uint8_t> read_prefix(std::ifstream& in, std::size_t bytes) {
  std::vector<std::uint8_t> buf(bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(bytes));
  buf.resize(static_cast<std::size_t>(in.gcount()));
  return buf;
}

EdfHeaders read_headers(std::ifstream& in, const std::filesystem::path& path) {
  auto main = read_prefix(in, kMainHeaderBytes);
  if (main.size() < kMainHeaderBytes) throw EdfError("EDF header truncated: " + path.string());
  int ns = 0;
  {
    const std::string field(reinterpret_cast<const char*>(main.data()) + 252, 4);
    try {
      ns = std::stoi(field);
    } catch (const std::exception&) {
      throw EdfError("EDF header: non-numeric field 'number of signals' in " + path.string());
    }
  }
  if (ns <= 0 || ns > 4096) throw EdfError("EDF header: bad signal count in " + path.string());
  auto rest = read_prefix(in, kSignalHeaderBytes * static_cast<std::size_t>(ns));
  main.insert(main.end(), rest.begin(), rest.end());
  return parse_edf_header(main);
}

}  // namespace

EdfHeaders read_edf_header(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open EDF file: " + path.string());
  return read_headers(in, path);
}

Recording read_channels(const std::filesystem::path& path, std::span<const std::string> montage, double t0,
                        double t1, double target_fs) {
  if (!(t1 > t0) || t0 < 0.0) throw DataError("read_channels: invalid time window");
  if (!(target_fs > 0.0)) throw UsageError("read_channels: target rate must be > 0");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open EDF file: " + path.string());
  const EdfHeaders hdr = read_headers(in, path);
  const EdfHeader& h = hdr.header;

  std::vector<std::size_t> offsets(hdr.signals.size());
  std::size_t record_samples = 0;
  for (std::size_t i = 0; i < hdr.signals.size(); ++i) {
    offsets[i] = record_samples;
    record_samples += static_cast<std::size_t>(hdr.signals[i].samples_per_record);
  }
  const std::size_t record_bytes = record_samples * 2;

  std::int64_t records = h.record_count;
  in.seekg(0, std::ios::end);
  const auto file_size = static_cast<std::int64_t>(in.tellg());
  const std::int64_t available = (file_size - h.header_bytes) / static_cast<std::int64_t>(record_bytes);
  if (records < 0 || records > available) records = available;
  const double total = static_cast<double>(records) * h.record_duration;
  if (t1 > total + 1e-9) {
    std::ostringstream msg;
    msg << "read_channels: window [" << t0 << ", " << t1 << ") exceeds recording duration " << total << " s in "
        << path.string();
    throw DataError(msg.str());
  }

  std::vector<std::size_t> picks;
  picks.reserve(montage.size());
  for (const auto& want : montage) {
    const std::string key = normalize_label(want);
    auto it = std::find_if(hdr.signals.begin(), hdr.signals.end(),
                           [&](const SignalHeader& s) { return normalize_label(s.label) == key; });
    if (it == hdr.signals.end()) throw MissingChannelError(want);
    picks.push_back(static_cast<std::size_t>(it - hdr.signals.begin()));
  }

  const auto first_record = static_cast<std::int64_t>(std::floor(t0 / h.record_duration));
  const auto last_record = std::min<std::int64_t>(
      records, static_cast<std::int64_t>(std::ceil(t1 / h.record_duration - 1e-9)));
  const std::int64_t n_records = last_record - first_record;

  std::vector<std::uint8_t> block(static_cast<std::size_t>(n_records) * record_bytes);
  in.clear();
  in.seekg(h.header_bytes + first_record * static_cast<std::int64_t>(record_bytes));
  in.read(reinterpret_cast<char*>(block.data()), static_cast<std::streamsize>(block.size()));
  if (static_cast<std::size_t>(in.gcount()) != block.size()) throw EdfError("EDF data truncated: " + path.string());

  const auto out_len = static_cast<std::size_t>(std::llround((t1 - t0) * target_fs));
  Recording rec;
  rec.fs = target_fs;
  rec.channel_labels.assign(montage.begin(), montage.end());
  rec.samples = RealMatrix(montage.size(), out_len);

  const double block_start = static_cast<double>(first_record) * h.record_duration;
  for (std::size_t c = 0; c < picks.size(); ++c) {
    const SignalHeader& sig = hdr.signals[picks[c]];
    const auto spr = static_cast<std::size_t>(sig.samples_per_record);
    const double fs = sig.sampling_rate(h.record_duration);
    const auto i0 = static_cast<std::size_t>(std::llround((t0 - block_start) * fs));
    auto i1 = static_cast<std::size_t>(std::llround((t1 - block_start) * fs));
    i1 = std::min(i1, spr * static_cast<std::size_t>(n_records));

    std::vector<double> native;
    native.reserve(i1 - i0);
    for (std::size_t i = i0; i < i1; ++i) {
      const std::size_t rec_idx = i / spr;
      const std::size_t within = i % spr;
      const std::size_t byte = rec_idx * record_bytes + (offsets[picks[c]] + within) * 2;
      const auto d = static_cast<std::int16_t>(static_cast<std::uint16_t>(block[byte]) |
                                               (static_cast<std::uint16_t>(block[byte + 1]) << 8));
      native.push_back(sig.to_physical(d));
    }
    if (native.empty()) throw DataError("read_channels: empty window for channel " + sig.label);
    std::vector<double> channel = resample_linear(native, fs, target_fs);
    channel.resize(out_len, channel.back());
    std::copy(channel.begin(), channel.end(), rec.samples.row(c).begin());
  }
  return rec;
}

}  // namespace szt
