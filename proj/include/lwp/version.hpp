#pragma once

namespace lwp {

inline constexpr const char* version = "1.0.0";

}  // namespace lwp
