#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "szt/errors.hpp"
#include "szt/log.hpp"
#include "szt/synthgen.hpp"

namespace szt {
namespace {

constexpr int kDigitalMin = -32768;
constexpr int kDigitalMax = 32767;

std::string field(std::string_view text, std::size_t width) {
  std::string s(text.substr(0, width));
  s.resize(width, ' ');
  return s;
}

// Shortest %g rendering that fits the field.
std::string number_field(double v, std::size_t width) {
  for (int precision = 10; precision >= 1; --precision) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::string_view(buf).size() <= width) return field(buf, width);
  }
  throw EdfError("EDF writer: value does not fit a " + std::to_string(width) + "-char field");
}

}  // namespace

EdfWriteStats write_edf(const Recording& recording, const std::filesystem::path& path, double physical_range_uv,
                        const std::string& patient_id, const std::string& recording_id) {
  const std::size_t ns = recording.samples.rows();
  if (ns == 0) throw UsageError("write_edf: recording has no channels");
  if (!(physical_range_uv > 0.0)) throw UsageError("write_edf: physical range must be > 0");
  const double spr_real = recording.fs;
  if (spr_real != std::round(spr_real) || spr_real < 1.0) {
    throw UsageError("write_edf: sampling rate must be a whole number of samples per second");
  }
  const auto spr = static_cast<std::size_t>(spr_real);
  const std::size_t n = recording.samples.cols();
  const std::size_t records = (n + spr - 1) / spr;

  std::string header;
  header += field("0", 8);
  header += field(patient_id, 80);
  header += field(recording_id, 80);
  header += field("01.01.00", 8);
  header += field("00.00.00", 8);
  header += number_field(static_cast<double>(256 + 256 * ns), 8);
  header += field("", 44);
  header += number_field(static_cast<double>(records), 8);
  header += field("1", 8);
  header += number_field(static_cast<double>(ns), 4);
  const double pmin = -physical_range_uv;
  const double pmax = physical_range_uv;
  for (std::size_t c = 0; c < ns; ++c) header += field(recording.channel_labels.at(c), 16);
  for (std::size_t c = 0; c < ns; ++c) header += field("", 80);
  for (std::size_t c = 0; c < ns; ++c) header += field("uV", 8);
  for (std::size_t c = 0; c < ns; ++c) header += number_field(pmin, 8);
  for (std::size_t c = 0; c < ns; ++c) header += number_field(pmax, 8);
  for (std::size_t c = 0; c < ns; ++c) header += number_field(kDigitalMin, 8);
  for (std::size_t c = 0; c < ns; ++c) header += number_field(kDigitalMax, 8);
  for (std::size_t c = 0; c < ns; ++c) header += field("", 80);
  for (std::size_t c = 0; c < ns; ++c) header += number_field(static_cast<double>(spr), 8);
  for (std::size_t c = 0; c < ns; ++c) header += field("", 32);

  // The header stores the rounded text; quantise against what a reader will see.
  const double pmin_stored = std::stod(number_field(pmin, 8));
  const double pmax_stored = std::stod(number_field(pmax, 8));
  const double scale = static_cast<double>(kDigitalMax - kDigitalMin) / (pmax_stored - pmin_stored);

  EdfWriteStats stats;
  std::string data(records * spr * ns * 2, '\0');
  for (std::size_t r = 0; r < records; ++r) {
    for (std::size_t c = 0; c < ns; ++c) {
      for (std::size_t s = 0; s < spr; ++s) {
        const std::size_t t = r * spr + s;
        double v = t < n ? recording.samples(c, t) : 0.0;
        if (v < pmin_stored || v > pmax_stored) {
          ++stats.clipped;
          v = std::clamp(v, pmin_stored, pmax_stored);
        }
        long d = std::lround((v - pmin_stored) * scale + kDigitalMin);
        d = std::clamp<long>(d, kDigitalMin, kDigitalMax);
        const auto u = static_cast<std::uint16_t>(static_cast<std::int16_t>(d));
        const std::size_t byte = ((r * ns + c) * spr + s) * 2;
        data[byte] = static_cast<char>(u & 0xFF);
        data[byte + 1] = static_cast<char>(u >> 8);
      }
    }
  }
  if (stats.clipped > 0) log::warn("edf_samples_clipped", {{"file", path.string()}, {"count", stats.clipped}});

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write EDF file: " + path.string());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("failed writing EDF file: " + path.string());
  return stats;
}

}  // namespace szt
