#include "ibd/path.hpp"

#include <sstream>

#include "ibd/error.hpp"
#include "ibd/format.hpp"

namespace ibd {

std::string path_csv(const SamplePath& path) {
  if (path.times.size() != path.states.size()) {
    throw DimensionMismatch("path has mismatched time and state counts");
  }
  std::ostringstream out;
  out << "t";
  const auto dim = path.states.empty() ? 0 : path.states.front().size();
  for (Eigen::Index x = 0; x < dim; ++x) out << ",v" << x;
  out << "\n";
  for (std::size_t k = 0; k < path.times.size(); ++k) {
    out << format_double(path.times[k]);
    for (Eigen::Index x = 0; x < dim; ++x) out << "," << format_double(path.states[k](x));
    out << "\n";
  }
  return out.str();
}

}  // namespace ibd
