#pragma once

namespace qwell {

inline constexpr const char* kVersion = "0.1.0";

// Pinned in every report so results can be tied to the generator that made them.
inline constexpr const char* kRngName = "splitmix64";
inline constexpr const char* kRngVersion = "1.0";

inline constexpr int kSchemaVersion = 1;

}  // namespace qwell
