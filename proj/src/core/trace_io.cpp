#include "cirpeak/core/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cirpeak/core/atomic_file.hpp"
#include "cirpeak/errors.hpp"

namespace cirpeak::core {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kHeader = "index,power_db";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  text = trim(text);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

fs::path with_suffix(const fs::path& csv_path, const char* suffix) {
  fs::path p = csv_path;
  if (p.extension() == ".csv") p.replace_extension();
  p += suffix;
  return p;
}

}  // namespace

fs::path metadata_path(const fs::path& csv_path) { return with_suffix(csv_path, ".meta.json"); }
fs::path truth_path(const fs::path& csv_path) { return with_suffix(csv_path, ".truth.json"); }

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trace_to_csv(const CirTrace& trace) {
  std::string out(kHeader);
  out += '\n';
  char buf[64];
  const auto samples = trace.samples();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    // Shortest representation that round-trips (at most 17 significant digits).
    const auto res = std::to_chars(buf, buf + sizeof(buf), samples[i]);
    out.append(buf, res.ptr);
    out += '\n';
  }
  return out;
}

std::vector<double> parse_trace_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty file", 0);
  if (trim(line) != kHeader) throw ParseError("expected header '" + std::string(kHeader) + "'", 0);

  std::vector<double> samples;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::string_view view = trim(line);
    if (view.empty()) {
      // Tolerate trailing blank lines only.
      std::string rest;
      while (std::getline(in, rest)) {
        if (!trim(rest).empty()) throw ParseError("blank row inside data", row);
      }
      break;
    }
    const auto comma = view.find(',');
    if (comma == std::string_view::npos || view.find(',', comma + 1) != std::string_view::npos) {
      throw ParseError("expected two comma-separated fields", row);
    }
    long long index = 0;
    if (!parse_number(view.substr(0, comma), index)) throw ParseError("malformed index", row);
    if (index != static_cast<long long>(samples.size())) {
      throw ParseError("index " + std::to_string(index) + " out of sequence", row);
    }
    double value = 0.0;
    if (!parse_number(view.substr(comma + 1), value)) throw ParseError("malformed power value", row);
    if (!std::isfinite(value)) throw ParseError("non-finite power value", row);
    samples.push_back(value);
  }
  if (samples.empty()) throw ParseError("no samples", 0);
  return samples;
}

std::string trace_metadata_json(const CirTrace& trace) {
  json j = {{"label", trace.label()},
            {"sample_rate", trace.sample_rate()},
            {"source", std::string(to_string(trace.source()))}};
  return j.dump(2) + "\n";
}

std::string truth_to_json(const GroundTruth& truth) {
  json clusters = json::array();
  for (const auto& c : truth.clusters) {
    clusters.push_back(
        {{"start", c.start_index}, {"end", c.end_index}, {"taps", c.tap_indices}, {"peak_power_db", c.peak_power_db}});
  }
  return json{{"clusters", clusters}}.dump(2) + "\n";
}

GroundTruth parse_truth_json(const std::string& text) {
  GroundTruth truth;
  try {
    const json j = json::parse(text);
    for (const auto& c : j.at("clusters")) {
      TruthCluster tc;
      tc.start_index = c.at("start").get<int>();
      tc.end_index = c.at("end").get<int>();
      tc.tap_indices = c.at("taps").get<std::vector<int>>();
      tc.peak_power_db = c.at("peak_power_db").get<double>();
      truth.clusters.push_back(std::move(tc));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("ground truth: ") + e.what(), 0);
  }
  int prev_end = -1;
  for (const auto& c : truth.clusters) {
    if (c.start_index <= prev_end || c.end_index < c.start_index) {
      throw ParseError("ground truth clusters must be disjoint and sorted", 0);
    }
    for (int t : c.tap_indices) {
      if (t < c.start_index || t > c.end_index) throw ParseError("tap outside its cluster extent", 0);
    }
    prev_end = c.end_index;
  }
  return truth;
}

CirTrace load_trace(const fs::path& path) {
  std::vector<double> samples = parse_trace_csv(read_text_file(path));
  std::string label = path.stem().string();
  double sample_rate = 1.0;
  TraceSource source = TraceSource::measured;
  const fs::path meta = metadata_path(path);
  if (fs::exists(meta)) {
    try {
      const json j = json::parse(read_text_file(meta));
      label = j.value("label", label);
      sample_rate = j.value("sample_rate", sample_rate);
      source = trace_source_from(j.value("source", std::string("measured")));
    } catch (const json::exception& e) {
      throw ParseError("metadata '" + meta.string() + "': " + e.what(), 0);
    }
  }
  return CirTrace(std::move(samples), sample_rate, std::move(label), source);
}

void save_trace(const CirTrace& trace, const fs::path& path) {
  StagedWrites out;
  out.add(path, trace_to_csv(trace));
  out.add(metadata_path(path), trace_metadata_json(trace));
  out.commit();
}

GroundTruth load_truth(const fs::path& path) { return parse_truth_json(read_text_file(path)); }

void save_truth(const GroundTruth& truth, const fs::path& path) { write_file_atomic(path, truth_to_json(truth)); }

}  // namespace cirpeak::core
