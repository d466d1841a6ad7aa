#pragma once

#include <string>

namespace ibd {

/// Shortest round-trip decimal form; integral values keep a trailing ".0".
std::string format_double(double v);

}  // namespace ibd
