#pragma once

namespace bpm {

inline constexpr const char* version = "0.1.0";

}  // namespace bpm
