#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ab {

enum class SweepScale { linear, log };

/// name=start:stop:steps[:log]
struct SweepSpec {
  std::string parameter;
  double start = 0.0;
  double stop = 1.0;
  int steps = 2;
  SweepScale scale = SweepScale::linear;

  // Grid points; endpoints are exact.
  std::vector<double> values() const;
};

// Throws ab::Error on malformed text, steps < 2, start >= stop, or a log
// sweep with start <= 0.
SweepSpec parse_sweep(std::string_view text);

// 17 significant digits, '.' decimal point.
std::string format_double(double value);

}  // namespace ab
