#include "cirpeak/cli/run.hpp"

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cirpeak/cli/plot.hpp"
#include "cirpeak/core/atomic_file.hpp"
#include "cirpeak/core/synth.hpp"
#include "cirpeak/core/trace_io.hpp"
#include "cirpeak/detect/report_io.hpp"
#include "cirpeak/errors.hpp"
#include "cirpeak/eval/compare.hpp"
#include "cirpeak/filters/iir.hpp"
#include "cirpeak/filters/trend.hpp"
#include "cirpeak/nn/gradcheck.hpp"
#include "cirpeak/nn/model_io.hpp"
#include "cirpeak/nn/predict.hpp"
#include "cirpeak/nn/train.hpp"

namespace cirpeak::cli {
namespace fs = std::filesystem;
namespace {

constexpr double kGradTolerance = 1e-4;

fs::path sibling(const fs::path& path, const std::string& suffix) {
  fs::path p = path;
  p.replace_extension();
  p += suffix;
  return p;
}

struct SynthFlags {
  std::string preset = "demo";
  std::uint64_t seed = 7;
  std::string output;
  std::optional<int> n_samples, n_clusters, taps_min, taps_max;
  std::optional<double> floor_db, sigma_db, decay_db, snr_min, snr_max;
};

struct ModelFlags {
  std::string preset = "table4";
  double scale = 1.0;
  int window_k = 100;
};

struct TrainFlags {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
};

struct DetectFlags {
  detect::DetectConfig cfg;
  bool include_warmup = false;
  bool svg = false;
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
  app->add_option("--preset", f.preset, "Model preset: table1 (FCNN), table2, table3, table4")->capture_default_str();
  app->add_option("--scale", f.scale, "Width scale")->check(CLI::IsMember({1.0, 0.5, 0.25, 0.125}))->capture_default_str();
  app->add_option("--window-k", f.window_k, "Input window length")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_train_flags(CLI::App* app, TrainFlags& f) {
  app->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--batch-size", f.batch_size, "Mini-batch size")->check(CLI::PositiveNumber)->capture_default_str();
  app->add_option("--learning-rate", f.learning_rate, "Adam step size")->capture_default_str();
  app->add_option("--seed", f.seed, "Seed for initialization, shuffling and dropout")->capture_default_str();
}

void add_detect_flags(CLI::App* app, DetectFlags& f) {
  app->add_option("--eps-value", f.cfg.eps_value, "Stage-1 DBSCAN radius (standardized residual)")->capture_default_str();
  app->add_option("--eps-index", f.cfg.eps_index, "Stage-2 DBSCAN radius (samples)")->capture_default_str();
  app->add_option("--min-samples", f.cfg.min_samples, "DBSCAN min_samples")->capture_default_str();
  app->add_flag("--include-warmup", f.include_warmup, "Do not mask the first k residuals");
  app->add_flag("--allow-negative", [&f](std::int64_t) { f.cfg.positive_only = false; },
                "Keep negative-residual anomalies");
}

nn::TrainConfig train_config(const TrainFlags& f) {
  nn::TrainConfig cfg;
  cfg.epochs = f.epochs;
  cfg.batch_size = f.batch_size;
  cfg.learning_rate = f.learning_rate;
  cfg.seed = f.seed;
  return cfg;
}

core::SynthConfig synth_config(const SynthFlags& f) {
  core::SynthConfig c = core::synth_preset(f.preset);
  c.seed = f.seed;
  if (f.n_samples) c.n_samples = *f.n_samples;
  if (f.n_clusters) c.n_clusters = *f.n_clusters;
  if (f.taps_min) c.taps_per_cluster.min = *f.taps_min;
  if (f.taps_max) c.taps_per_cluster.max = *f.taps_max;
  if (f.floor_db) c.noise_floor_db = *f.floor_db;
  if (f.sigma_db) c.noise_sigma_db = *f.sigma_db;
  if (f.decay_db) c.cluster_decay_db_per_tap = *f.decay_db;
  if (f.snr_min) c.peak_snr_db.min = *f.snr_min;
  if (f.snr_max) c.peak_snr_db.max = *f.snr_max;
  return c;
}

void stage_report(core::StagedWrites& writes, const fs::path& report_path, const core::CirTrace& trace,
                  std::span<const double> trend, const detect::AnomalyReport& report, bool svg) {
  writes.add(report_path, detect::report_to_json(report));
  writes.add(sibling(report_path, ".plot.csv"), overlay_csv(trace.samples(), trend, report));
  if (svg) writes.add(sibling(report_path, ".svg"), overlay_svg(trace.samples(), trend, report, trace.label()));
}

void print_clusters(std::ostream& out, const detect::AnomalyReport& report) {
  if (!report.diagnostic.empty()) out << "note: " << report.diagnostic << '\n';
  out << report.clusters.size() << " peak cluster(s)\n";
  for (const auto& c : report.clusters) {
    out << "  #" << c.id << "  [" << c.start_index << ", " << c.end_index << "]  peak " << c.peak_index << "  "
        << std::fixed << std::setprecision(2) << c.peak_residual_db << " dB  size " << c.size << '\n';
    out.unsetf(std::ios::fixed);
  }
}

int run_generate(const SynthFlags& f, std::ostream& out) {
  const auto [trace, truth] = core::generate_synthetic_trace(synth_config(f));
  const fs::path csv = f.output;
  core::StagedWrites writes;
  writes.add(csv, core::trace_to_csv(trace));
  writes.add(core::metadata_path(csv), core::trace_metadata_json(trace));
  writes.add(core::truth_path(csv), core::truth_to_json(truth));
  writes.commit();
  out << "wrote " << csv.string() << " (" << trace.size() << " samples, " << truth.clusters.size()
      << " clusters)\n";
  return kExitOk;
}

int run_train(const std::string& trace_path, const ModelFlags& mf, const TrainFlags& tf, const std::string& output,
              std::string history, std::ostream& out) {
  const auto trace = core::load_trace(trace_path);
  const auto spec = nn::preset_spec(mf.preset, mf.window_k, mf.scale);
  const auto result = nn::fit_trace(spec, trace, train_config(tf));
  if (history.empty()) history = sibling(output, ".history.csv").string();

  core::StagedWrites writes;
  writes.add(output, nn::model_to_json(result.model));
  writes.add(history, result.history.to_csv());
  writes.commit();
  out << "trained " << mf.preset << " (scale " << mf.scale << ", k=" << mf.window_k << ") for "
      << result.history.epochs.size() << " epochs in " << std::setprecision(3) << result.history.total_seconds()
      << " s; final loss " << std::setprecision(6) << result.history.final_loss() << '\n';
  return kExitOk;
}

int run_detect(const std::string& trace_path, const std::string& model_path, const DetectFlags& df,
               const std::string& output, std::ostream& out) {
  const auto trace = core::load_trace(trace_path);
  const auto model = nn::load_model(model_path);
  const auto pred = nn::predict_series(model, trace);
  const auto res = detect::residual(trace, pred.values, df.include_warmup ? 0 : pred.warmup_len);
  const auto report = detect::detect_anomalies(res, df.cfg);

  core::StagedWrites writes;
  stage_report(writes, output, trace, pred.values, report, df.svg);
  writes.commit();
  print_clusters(out, report);
  return kExitOk;
}

int run_filter(const std::string& trace_path, const std::string& preset, const std::string& spec_path, bool causal,
               const std::string& coeffs_csv, const DetectFlags& df, const std::string& output, std::ostream& out) {
  const auto trace = core::load_trace(trace_path);
  filters::FilterSpec spec = spec_path.empty()
                                 ? filters::filter_preset(preset)
                                 : filters::filter_spec_from_json(nlohmann::json::parse(core::read_text_file(spec_path)));
  if (causal) spec.zero_phase = false;
  const auto trend = filters::filter_trend(spec, trace);
  const auto res = detect::residual(trace, trend, 0);
  const auto report = detect::detect_anomalies(res, df.cfg);

  core::StagedWrites writes;
  stage_report(writes, output, trace, trend, report, df.svg);
  if (!coeffs_csv.empty()) {
    if (spec.kind != filters::FilterKind::butterworth && spec.kind != filters::FilterKind::bessel) {
      throw ValidationError("--coeffs-csv applies to IIR filters only");
    }
    const auto c = spec.kind == filters::FilterKind::butterworth
                       ? filters::design_butterworth(spec.order, spec.cutoff_fraction_fs)
                       : filters::design_bessel(spec.order, spec.cutoff_fraction_fs);
    writes.add(coeffs_csv, filters::coefficients_csv(c));
  }
  writes.commit();
  print_clusters(out, report);
  return kExitOk;
}

int run_compare(const std::string& trace_path, std::string truth_file, const std::vector<std::string>& names,
                const ModelFlags& mf, const TrainFlags& tf, const DetectFlags& df, int tol,
                const std::string& output, std::ostream& out, std::ostream& err) {
  const auto trace = core::load_trace(trace_path);
  if (truth_file.empty()) truth_file = core::truth_path(trace_path).string();
  const auto truth = core::load_truth(truth_file);

  std::vector<eval::Method> methods;
  for (const auto& name : names) {
    if (filters::is_filter_preset(name)) {
      methods.push_back(eval::filter_method(name, filters::filter_preset(name)));
    } else if (name == "lstm") {
      methods.push_back(eval::lstm_method(name, nn::preset_spec(mf.preset, mf.window_k, mf.scale), train_config(tf)));
    } else {
      // Any model preset name (table1..table4, fcnn) trains that architecture.
      methods.push_back(eval::lstm_method(name, nn::preset_spec(name, mf.window_k, mf.scale), train_config(tf)));
    }
  }

  eval::CompareOptions options;
  options.detect = df.cfg;
  options.tol_samples = tol;
  options.include_warmup = df.include_warmup;
  const auto rows = eval::compare_methods(trace, truth, methods, options);

  core::write_file_atomic(output, eval::comparison_csv(rows));
  for (const auto& r : rows) {
    if (!r.ok) {
      err << r.name << ": failed: " << r.error << '\n';
      continue;
    }
    out << std::left << std::setw(16) << r.name << " P=" << std::fixed << std::setprecision(2) << r.metrics.precision
        << " R=" << r.metrics.recall << " F1=" << r.metrics.f1 << " delta=" << r.metrics.cluster_count_delta
        << " t=" << r.seconds << "s";
    if (r.train_seconds) out << " (training " << *r.train_seconds << "s)";
    out << '\n';
    out.unsetf(std::ios::fixed);
  }
  return kExitOk;
}

int run_gradcheck(const ModelFlags& mf, std::uint64_t seed, std::ostream& out) {
  const auto result = nn::grad_check(nn::preset_spec(mf.preset, mf.window_k, mf.scale), seed);
  out << std::scientific << std::setprecision(3) << result.max_relative_error << '\n';
  out.unsetf(std::ios::scientific);
  if (result.skipped > 0) out << "(" << result.skipped << " coordinate(s) at a ReLU kink skipped)\n";
  return result.max_relative_error < kGradTolerance ? kExitOk : kExitNumerical;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Peak-cluster detection in channel impulse response traces"};
  app.require_subcommand(1);

  SynthFlags synth;
  auto* gen = app.add_subcommand("generate", "Write a synthetic trace with ground truth");
  gen->add_option("--preset", synth.preset, "demo or noise")->capture_default_str();
  gen->add_option("--seed", synth.seed)->capture_default_str();
  gen->add_option("-o,--output", synth.output, "Trace CSV path")->required();
  gen->add_option("--n-samples", synth.n_samples);
  gen->add_option("--n-clusters", synth.n_clusters);
  gen->add_option("--taps-min", synth.taps_min);
  gen->add_option("--taps-max", synth.taps_max);
  gen->add_option("--noise-floor-db", synth.floor_db);
  gen->add_option("--noise-sigma-db", synth.sigma_db);
  gen->add_option("--decay-db", synth.decay_db);
  gen->add_option("--snr-min", synth.snr_min);
  gen->add_option("--snr-max", synth.snr_max);

  std::string trace_path, model_path, output, history, filter_preset, filter_spec, coeffs_csv, truth_file;
  std::vector<std::string> method_names;
  ModelFlags model_flags;
  TrainFlags train_flags;
  DetectFlags detect_flags;
  bool causal = false;
  int tol = 10;

  auto* train = app.add_subcommand("train", "Train a predictor on a trace");
  train->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);
  add_model_flags(train, model_flags);
  add_train_flags(train, train_flags);
  train->add_option("-o,--output", output, "Model JSON path")->required();
  train->add_option("--history", history, "History CSV path (default <model>.history.csv)");

  auto* det = app.add_subcommand("detect", "Detect peak clusters with a trained model");
  det->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);
  det->add_option("--model", model_path)->required()->check(CLI::ExistingFile);
  add_detect_flags(det, detect_flags);
  det->add_flag("--svg", detect_flags.svg, "Also write <report>.svg");
  det->add_option("-o,--output", output, "Anomaly report JSON path")->required();

  auto* filt = app.add_subcommand("filter", "Detect peak clusters against a classical filter trend");
  filt->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);
  auto* preset_opt = filt->add_option("--preset", filter_preset, "butter-table5, bessel-table5, savgol-table5, median-table5");
  auto* spec_opt = filt->add_option("--spec", filter_spec, "Filter spec JSON")->check(CLI::ExistingFile);
  preset_opt->excludes(spec_opt);
  filt->add_flag("--causal", causal, "Single forward pass for IIR kinds");
  filt->add_option("--coeffs-csv", coeffs_csv, "Dump IIR sections");
  add_detect_flags(filt, detect_flags);
  filt->add_flag("--svg", detect_flags.svg, "Also write <report>.svg");
  filt->add_option("-o,--output", output, "Anomaly report JSON path")->required();

  auto* cmp = app.add_subcommand("compare", "Score several trend extractors against ground truth");
  cmp->add_option("--trace", trace_path)->required()->check(CLI::ExistingFile);
  cmp->add_option("--truth", truth_file, "Ground truth JSON (default <trace>.truth.json)")->check(CLI::ExistingFile);
  cmp->add_option("--methods", method_names, "Comma-separated: lstm, table1..table4, filter presets")
      ->delimiter(',')
      ->required();
  cmp->add_option("--tol", tol, "Matching tolerance in samples")->check(CLI::NonNegativeNumber)->capture_default_str();
  add_model_flags(cmp, model_flags);
  add_train_flags(cmp, train_flags);
  add_detect_flags(cmp, detect_flags);
  cmp->add_option("-o,--output", output, "Comparison CSV path")->required();

  std::uint64_t grad_seed = 1;
  auto* grad = app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  add_model_flags(grad, model_flags);
  grad->add_option("--seed", grad_seed)->capture_default_str();

  std::vector<std::string> argv_store;
  argv_store.reserve(args.size() + 1);
  argv_store.emplace_back("cirpeak");
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  }

  try {
    if (gen->parsed()) return run_generate(synth, out);
    if (train->parsed()) return run_train(trace_path, model_flags, train_flags, output, history, out);
    if (det->parsed()) return run_detect(trace_path, model_path, detect_flags, output, out);
    if (filt->parsed()) {
      if (filter_preset.empty() && filter_spec.empty()) throw ValidationError("filter needs --preset or --spec");
      return run_filter(trace_path, filter_preset, filter_spec, causal, coeffs_csv, detect_flags, output, out);
    }
    if (cmp->parsed()) {
      return run_compare(trace_path, truth_file, method_names, model_flags, train_flags, detect_flags, tol, output, out,
                         err);
    }
    if (grad->parsed()) return run_gradcheck(model_flags, grad_seed, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace cirpeak::cli
