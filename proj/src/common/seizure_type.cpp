#include "szt/seizure_type.hpp"

namespace szt {
namespace {

constexpr std::array<std::string_view, kNumClasses> kCodes = {"FNSZ", "GNSZ", "CPSZ", "ABSZ",
                                                               "TNSZ", "TCSZ", "SPSZ"};
constexpr std::array<std::string_view, kNumClasses> kNames = {
    "Focal Non-Specific (FNSZ)", "Generalized Non-Specific (GNSZ)", "Complex Partial (CPSZ)",
    "Absence (ABSZ)",            "Tonic (TNSZ)",                    "Tonic Clonic (TCSZ)",
    "Simple Partial (SPSZ)"};

}  // namespace

std::string_view to_code(SeizureType type) { return kCodes[static_cast<std::size_t>(type)]; }

std::string_view display_name(SeizureType type) { return kNames[static_cast<std::size_t>(type)]; }

std::optional<SeizureType> parse_type_code(std::string_view code) {
  for (std::size_t i = 0; i < kCodes.size(); ++i) {
    if (kCodes[i] == code) return static_cast<SeizureType>(i);
  }
  return std::nullopt;
}

}  // namespace szt
