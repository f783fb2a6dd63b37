#pragma once

#include <cstddef>
#include <string_view>

namespace secnet {

enum class Method { Crude, IPS, IS, Splitting, Exact };

std::string_view to_string(Method method) noexcept;

/// Point estimate with its standard error. Probability-valued estimates are
/// never clamped here; clamp only for display.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  Method method = Method::Crude;
  std::size_t n_work = 0;      ///< trajectories / particles simulated
  std::size_t replicates = 0;  ///< independent replications behind the SE
};

}  // namespace secnet
