#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cirpeak/core/synth.hpp"
#include "cirpeak/core/trace.hpp"
#include "cirpeak/detect/detect.hpp"
#include "cirpeak/eval/metrics.hpp"
#include "cirpeak/filters/trend.hpp"
#include "cirpeak/nn/spec.hpp"
#include "cirpeak/nn/train.hpp"

namespace cirpeak::eval {

struct TrendResult {
  std::vector<double> trend;  // dB, same length as the trace
  std::size_t warmup_len = 0;
  std::optional<double> train_seconds;
};

using TrendProducer = std::function<TrendResult(const core::CirTrace&)>;

struct Method {
  std::string name;
  TrendProducer produce;
};

struct ComparisonRow {
  std::string name;
  bool ok = false;
  std::string error;
  DetectionMetrics metrics;
  double seconds = 0.0;
  std::optional<double> train_seconds;
  TrendResult trend;
  detect::AnomalyReport report;
};

struct CompareOptions {
  detect::DetectConfig detect;
  int tol_samples = 10;
  bool include_warmup = false;  // score the warmup prefix instead of masking it
};

/// Runs every method independently: trend, residual, detection, matching.
/// A throwing method yields a row with ok = false; the others still run.
/// Rows follow the input method order.
std::vector<ComparisonRow> compare_methods(const core::CirTrace& trace, const core::GroundTruth& truth,
                                           const std::vector<Method>& methods, const CompareOptions& options);

/// `method,tp,fp,fn,precision,recall,f1,cluster_delta,peak_offset,seconds,train_seconds`
/// Failed rows keep the name and leave the metric fields empty.
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

Method filter_method(const std::string& name, const filters::FilterSpec& spec);
/// Trains `spec` on the trace being evaluated (the model is fitted per trace).
Method lstm_method(const std::string& name, const nn::ModelSpec& spec, const nn::TrainConfig& cfg);

}  // namespace cirpeak::eval
