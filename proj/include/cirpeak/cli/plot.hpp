#pragma once

#include <span>
#include <string>

#include "cirpeak/detect/detect.hpp"

namespace cirpeak::cli {

/// `index,input_db,trend_db,residual_db,label`
std::string overlay_csv(std::span<const double> input, std::span<const double> trend,
                        const detect::AnomalyReport& report);

/// Two stacked panels: input and trend over delay, residual below, with
/// each detected cluster shaded across both.
std::string overlay_svg(std::span<const double> input, std::span<const double> trend,
                        const detect::AnomalyReport& report, const std::string& title);

}  // namespace cirpeak::cli
