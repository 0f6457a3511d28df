#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mam/sbf.hpp"
#include "mam/sim.hpp"

namespace mam {

// Per-column affine map recorded when predictors were min-max rescaled to
// [0, 1] at fit time; applied again before prediction.
struct RescaleMap {
  std::vector<double> lo;
  std::vector<double> hi;

  double apply(int column, double x) const;
};

inline constexpr int kModelFormatVersion = 1;

nlohmann::json fit_to_json(const AdditiveFit& fit,
                           const std::optional<RescaleMap>& rescale);

struct LoadedModel {
  AdditiveFit fit;
  std::optional<RescaleMap> rescale;
};

LoadedModel fit_from_json(const nlohmann::json& doc);

// Deterministic report document: the wall clock is deliberately omitted so
// identical (flags, seed) produce byte-identical files.
nlohmann::json report_to_json(const SimReport& report);

// Writes to a temporary file in the target directory, then renames, so a
// failure never leaves a partial output file.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace mam
