#pragma once

#include <stdexcept>
#include <string>

namespace mam {

struct NotPositiveDefinite : std::runtime_error {
  explicit NotPositiveDefinite(const std::string& what)
      : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
  explicit DimensionMismatch(const std::string& what)
      : std::invalid_argument(what) {}
};

struct BaseMismatch : std::invalid_argument {
  explicit BaseMismatch(const std::string& what)
      : std::invalid_argument(what) {}
};

struct EmptySample : std::invalid_argument {
  explicit EmptySample(const std::string& what)
      : std::invalid_argument(what) {}
};

struct BandwidthOutOfRange : std::invalid_argument {
  explicit BandwidthOutOfRange(const std::string& what)
      : std::invalid_argument(what) {}
};

struct DegenerateDensity : std::runtime_error {
  explicit DegenerateDensity(const std::string& what)
      : std::runtime_error(what) {}
};

struct NoConvergence : std::runtime_error {
  NoConvergence(const std::string& what, int sweeps, double last_change)
      : std::runtime_error(what), sweeps(sweeps), last_change(last_change) {}
  int sweeps;
  double last_change;
};

struct OutOfDomain : std::invalid_argument {
  explicit OutOfDomain(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace mam
