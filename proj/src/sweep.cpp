#include "ab/sweep.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "ab/error.hpp"

namespace ab {

namespace {

double parse_real(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    throw Error("sweep: invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::vector<double> SweepSpec::values() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    if (i == steps - 1) {
      out.push_back(stop);
    } else if (scale == SweepScale::linear) {
      out.push_back(start + (stop - start) * i / (steps - 1));
    } else {
      const double lo = std::log(start);
      out.push_back(std::exp(lo + (std::log(stop) - lo) * i / (steps - 1)));
    }
  }
  return out;
}

SweepSpec parse_sweep(std::string_view text) {
  const std::size_t eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw Error("sweep: expected name=start:stop:steps[:log], got '" + std::string(text) + "'");
  }
  SweepSpec spec;
  spec.parameter = std::string(text.substr(0, eq));
  std::vector<std::string_view> parts;
  std::string_view rest = text.substr(eq + 1);
  while (true) {
    const std::size_t colon = rest.find(':');
    parts.push_back(rest.substr(0, colon));
    if (colon == std::string_view::npos) break;
    rest = rest.substr(colon + 1);
  }
  if (parts.size() != 3 && parts.size() != 4) {
    throw Error("sweep: expected start:stop:steps[:log] after '" + spec.parameter + "='");
  }
  spec.start = parse_real(parts[0], "start");
  spec.stop = parse_real(parts[1], "stop");
  int steps = 0;
  const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), steps);
  if (ec != std::errc() || ptr != parts[2].data() + parts[2].size()) {
    throw Error("sweep: invalid steps '" + std::string(parts[2]) + "'");
  }
  spec.steps = steps;
  if (parts.size() == 4) {
    if (parts[3] == "log") {
      spec.scale = SweepScale::log;
    } else if (parts[3] == "lin" || parts[3] == "linear") {
      spec.scale = SweepScale::linear;
    } else {
      throw Error("sweep: unknown scale '" + std::string(parts[3]) + "'");
    }
  }
  if (spec.steps < 2) throw Error("sweep: steps must be >= 2");
  if (!(spec.start < spec.stop)) throw Error("sweep: start must be below stop");
  if (spec.scale == SweepScale::log && !(spec.start > 0.0)) {
    throw Error("sweep: log scale needs start > 0");
  }
  return spec;
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace ab
