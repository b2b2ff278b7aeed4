#pragma once

namespace chanfront {
inline constexpr const char* VERSION = "0.1.0";
}
