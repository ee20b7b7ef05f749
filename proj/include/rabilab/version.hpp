#pragma once

namespace rabilab {

// Bumped whenever numerical output could change; part of every cache key.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace rabilab
