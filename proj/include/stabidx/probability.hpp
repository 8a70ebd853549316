#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace stabidx {

enum class ProbabilitySource { raw, refined, exact };

inline std::string_view to_string(ProbabilitySource s) {
  switch (s) {
    case ProbabilitySource::raw: return "raw";
    case ProbabilitySource::refined: return "refined";
    case ProbabilitySource::exact: return "exact";
  }
  return "unknown";
}

/// Estimated distribution of the stability index over 0..n.
struct ProbabilityVector {
  std::vector<double> values;
  std::vector<double> std_error;
  ProbabilitySource source = ProbabilitySource::raw;
  /// Determinate samples behind a raw vector (0 if unknown). Carried through
  /// refinement so standard errors can use the multinomial covariance.
  std::uint64_t samples = 0;

  int n() const { return static_cast<int>(values.size()) - 1; }

  double sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }

  double mean_index() const {
    double e = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) e += static_cast<double>(k) * values[k];
    return e;
  }

  friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;
};

}  // namespace stabidx
