#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "szt/errors.hpp"
#include "szt/featurize.hpp"

namespace szt {
namespace {

constexpr char kMagic[4] = {'S', 'Z', 'F', 'T'};

static_assert(std::endian::native == std::endian::little, "feature cache I/O assumes a little-endian host");

class Writer {
 public:
  explicit Writer(std::ostream& os) : os_(os) {}
  template <typename T>
  void put(T v) {
    os_.write(reinterpret_cast<const char*>(&v), sizeof(T));
  }
  void bytes(const void* p, std::size_t n) { os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n)); }

 private:
  std::ostream& os_;
};

class Reader {
 public:
  Reader(const std::vector<char>& buf, std::string path) : buf_(buf), path_(std::move(path)) {}
  template <typename T>
  T get() {
    T v{};
    need(sizeof(T));
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  void bytes(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::size_t remaining() const { return buf_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw CacheTruncatedError("feature cache truncated: " + path_);
  }
  const std::vector<char>& buf_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t montage_hash(std::span<const std::string> montage) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (std::size_t i = 0; i < montage.size(); ++i) {
    if (i > 0) feed(',');
    for (unsigned char c : montage[i]) feed(c);
  }
  return h;
}

CacheHeader make_cache_header(const FeatureSpec& feature, const WindowSpec& window,
                              std::span<const std::string> montage, const FeatureMatrix& m) {
  CacheHeader h;
  h.method = feature.method;
  h.fmax_hz = static_cast<std::uint16_t>(feature.fmax_hz);
  h.window_s = static_cast<float>(window.length_s);
  h.overlap_s = static_cast<float>(window.overlap_s);
  h.montage_hash = montage_hash(montage);
  h.dim = static_cast<std::uint32_t>(m.dim());
  h.rows = m.rows();
  return h;
}

void write_cache(const std::filesystem::path& path, const CacheHeader& header, const FeatureMatrix& m) {
  if (header.dim != m.dim() || header.rows != m.rows()) throw DimensionError("write_cache: header/matrix mismatch");
  std::ostringstream os(std::ios::binary);
  Writer w(os);
  w.bytes(kMagic, 4);
  w.put<std::uint16_t>(kCacheVersion);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(header.method));
  w.put<std::uint16_t>(header.fmax_hz);
  w.put<float>(header.window_s);
  w.put<float>(header.overlap_s);
  w.put<std::uint64_t>(header.montage_hash);
  w.put<std::uint32_t>(header.dim);
  w.put<std::uint64_t>(header.rows);

  // Patient ids are interned in first-appearance order.
  std::map<std::string, std::uint32_t> intern;
  std::vector<const std::string*> table;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto [it, inserted] = intern.emplace(m.patients[r], static_cast<std::uint32_t>(table.size()));
    if (inserted) table.push_back(&it->first);
    w.put<std::uint8_t>(m.labels[r]);
    w.put<std::uint32_t>(it->second);
    w.put<std::uint32_t>(m.seizure_ids[r]);
    w.put<double>(m.window_starts[r]);
    w.bytes(m.features.row(r).data(), m.dim() * sizeof(double));
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(table.size()));
  for (const std::string* s : table) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s->size()));
    w.bytes(s->data(), s->size());
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write feature cache: " + path.string());
  const std::string blob = os.str();
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!out) throw DataError("failed writing feature cache: " + path.string());
}

CacheContents read_cache(const std::filesystem::path& path, const std::optional<CacheHeader>& expect) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature cache: " + path.string());
  const std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(buf, path.string());

  char magic[4];
  r.bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw CacheVersionError("not a feature cache (bad magic): " + path.string());
  const auto version = r.get<std::uint16_t>();
  if (version != kCacheVersion) {
    throw CacheVersionError("unsupported feature cache version " + std::to_string(version) + ": " + path.string());
  }
  CacheContents out;
  CacheHeader& h = out.header;
  h.method = static_cast<FeatureMethod>(r.get<std::uint8_t>());
  h.fmax_hz = r.get<std::uint16_t>();
  h.window_s = r.get<float>();
  h.overlap_s = r.get<float>();
  h.montage_hash = r.get<std::uint64_t>();
  h.dim = r.get<std::uint32_t>();
  h.rows = r.get<std::uint64_t>();

  if (expect) {
    auto mismatch = [&](const std::string& field, const std::string& got, const std::string& want) {
      throw SpecMismatchError("feature cache " + path.string() + ": " + field + " is " + got + ", expected " + want);
    };
    if (h.method != expect->method) {
      mismatch("method", std::to_string(static_cast<int>(h.method)), std::to_string(static_cast<int>(expect->method)));
    }
    if (h.fmax_hz != expect->fmax_hz) mismatch("f_max", std::to_string(h.fmax_hz), std::to_string(expect->fmax_hz));
    if (h.window_s != expect->window_s) mismatch("W_l", std::to_string(h.window_s), std::to_string(expect->window_s));
    if (h.overlap_s != expect->overlap_s) {
      mismatch("O", std::to_string(h.overlap_s), std::to_string(expect->overlap_s));
    }
    if (h.montage_hash != expect->montage_hash) mismatch("montage hash", "different", "match");
  }

  const std::size_t row_bytes = 1 + 4 + 4 + 8 + static_cast<std::size_t>(h.dim) * 8;
  if (h.rows > r.remaining() / row_bytes) throw CacheTruncatedError("feature cache truncated: " + path.string());

  FeatureMatrix& m = out.matrix;
  const auto rows = static_cast<std::size_t>(h.rows);
  std::vector<double> values(rows * h.dim);
  std::vector<std::uint32_t> patient_idx(rows);
  m.labels.resize(rows);
  m.seizure_ids.resize(rows);
  m.window_starts.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    m.labels[i] = r.get<std::uint8_t>();
    if (m.labels[i] >= kNumClasses) throw DataError("feature cache: label out of range in " + path.string());
    patient_idx[i] = r.get<std::uint32_t>();
    m.seizure_ids[i] = r.get<std::uint32_t>();
    m.window_starts[i] = r.get<double>();
    r.bytes(values.data() + i * h.dim, h.dim * sizeof(double));
  }
  const auto n_patients = r.get<std::uint32_t>();
  std::vector<std::string> table(n_patients);
  for (auto& s : table) {
    const auto len = r.get<std::uint32_t>();
    if (len > r.remaining()) throw CacheTruncatedError("feature cache truncated: " + path.string());
    s.resize(len);
    r.bytes(s.data(), len);
  }
  m.patients.resize(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    if (patient_idx[i] >= table.size()) throw DataError("feature cache: bad patient index in " + path.string());
    m.patients[i] = table[patient_idx[i]];
  }
  m.features = RealMatrix(rows, h.dim, std::move(values));
  return out;
}

}  // namespace szt
