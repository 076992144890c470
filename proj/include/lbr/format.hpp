#pragma once

#include <string>

namespace lbr {

// Shortest decimal text that reads back to the same double; "-inf"/"inf"/"nan"
// for non-finite values.
std::string format_real(double x);

}  // namespace lbr
