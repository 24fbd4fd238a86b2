#pragma once

namespace sdelab {

inline constexpr const char* kVersion = "0.1.0";

}
