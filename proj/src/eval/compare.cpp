#include "cirpeak/eval/compare.hpp"

#include <chrono>
#include <sstream>

#include "cirpeak/nn/predict.hpp"

namespace cirpeak::eval {

std::vector<ComparisonRow> compare_methods(const core::CirTrace& trace, const core::GroundTruth& truth,
                                           const std::vector<Method>& methods, const CompareOptions& options) {
  std::vector<ComparisonRow> rows;
  rows.reserve(methods.size());
  for (const Method& method : methods) {
    ComparisonRow row;
    row.name = method.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      row.trend = method.produce(trace);
      row.train_seconds = row.trend.train_seconds;
      const std::size_t warmup = options.include_warmup ? 0 : row.trend.warmup_len;
      const auto res = detect::residual(trace, row.trend.trend, warmup);
      row.report = detect::detect_anomalies(res, options.detect);
      row.metrics = match_clusters(row.report, truth, options.tol_samples);
      row.ok = true;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string comparison_csv(const std::vector<ComparisonRow>& rows) {
  std::ostringstream out;
  out.precision(17);
  out << "method,tp,fp,fn,precision,recall,f1,cluster_delta,peak_offset,seconds,train_seconds\n";
  for (const auto& r : rows) {
    out << r.name;
    if (!r.ok) {
      out << ",,,,,,,,,,\n";
      continue;
    }
    const auto& m = r.metrics;
    out << ',' << m.true_positives << ',' << m.false_positives << ',' << m.false_negatives << ',' << m.precision
        << ',' << m.recall << ',' << m.f1 << ',' << m.cluster_count_delta << ',' << m.mean_peak_offset_samples
        << ',' << r.seconds << ',';
    if (r.train_seconds) out << *r.train_seconds;
    out << '\n';
  }
  return out.str();
}

Method filter_method(const std::string& name, const filters::FilterSpec& spec) {
  return {name, [spec](const core::CirTrace& trace) {
            TrendResult r;
            r.trend = filters::filter_trend(spec, trace);
            return r;
          }};
}

Method lstm_method(const std::string& name, const nn::ModelSpec& spec, const nn::TrainConfig& cfg) {
  return {name, [spec, cfg](const core::CirTrace& trace) {
            const auto t0 = std::chrono::steady_clock::now();
            const nn::TrainResult fit = nn::fit_trace(spec, trace, cfg);
            const double train_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const nn::PredictedSeries pred = nn::predict_series(fit.model, trace);
            TrendResult r;
            r.trend = pred.values;
            r.warmup_len = pred.warmup_len;
            r.train_seconds = train_s;
            return r;
          }};
}

}  // namespace cirpeak::eval
