#pragma once

namespace deepcurves {
inline constexpr const char* kVersion = "0.1.0";
}
