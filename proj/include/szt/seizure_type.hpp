#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace szt {

// Enum order is the on-disk label order of the feature cache.
enum class SeizureType : std::uint8_t { FNSZ = 0, GNSZ, CPSZ, ABSZ, TNSZ, TCSZ, SPSZ };

inline constexpr int kNumClasses = 7;

inline constexpr std::array<SeizureType, kNumClasses> kAllSeizureTypes = {
    SeizureType::FNSZ, SeizureType::GNSZ, SeizureType::CPSZ, SeizureType::ABSZ,
    SeizureType::TNSZ, SeizureType::TCSZ, SeizureType::SPSZ};

std::string_view to_code(SeizureType type);
// Long name as printed in dataset statistics tables, e.g. "Focal Non-Specific (FNSZ)".
std::string_view display_name(SeizureType type);
std::optional<SeizureType> parse_type_code(std::string_view code);

inline constexpr int class_id(SeizureType type) { return static_cast<int>(type); }

}  // namespace szt
