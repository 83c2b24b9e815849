#pragma once

#include <cstddef>
#include <cstdint>

#include "cirpeak/nn/spec.hpp"

namespace cirpeak::nn {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  // Coordinates whose +/- probes straddled a ReLU kink at every tried step
  // size; central differences are meaningless there.
  std::size_t skipped = 0;
};

/// Builds `spec` with `seed`, draws a random standard-normal window and
/// target, and compares every analytic parameter gradient of
/// 0.5 * (prediction - target)^2 with central differences (step 1e-5).
/// Dropout runs in infer mode, so repeated calls agree bit-exactly.
/// Relative error is |a - n| / max(|a|, |n|, 1e-6).
GradCheckResult grad_check(const ModelSpec& spec, std::uint64_t seed);

}  // namespace cirpeak::nn
