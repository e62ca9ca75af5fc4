#pragma once

namespace hbias {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hbias
