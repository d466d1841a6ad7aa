#pragma once

#include <string>
#include <vector>

#include "ibd/linalg.hpp"

namespace ibd {

/// Time grid with one state vector per point; times.front() == 0.
struct SamplePath {
  std::vector<double> times;
  std::vector<Vector> states;
};

/// "t,v0,…,v{d-1}".
std::string path_csv(const SamplePath& path);

}  // namespace ibd
