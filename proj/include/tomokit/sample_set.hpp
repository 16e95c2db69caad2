#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "tomokit/errors.hpp"
#include "tomokit/tomogram.hpp"

namespace tomokit {

// Draws of X at one frame, with enough metadata to reproduce them.
struct SampleSet {
  std::vector<double> values;
  FrameParams frame;
  std::string model;  // state descriptor
  std::uint64_t seed = 0;

  void check() const {
    if (values.empty()) throw DomainError("SampleSet: no samples");
    for (double v : values)
      if (!std::isfinite(v)) throw DomainError("SampleSet: non-finite sample");
  }
};

}  // namespace tomokit
