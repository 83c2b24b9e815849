#include "cirpeak/nn/model_io.hpp"

#include <cmath>

#include "cirpeak/core/atomic_file.hpp"
#include "cirpeak/core/trace_io.hpp"
#include "cirpeak/errors.hpp"

namespace cirpeak::nn {
using nlohmann::json;

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

void matrix_from_json(const json& j, Eigen::MatrixXd& m, const char* name) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != m.rows()) {
    throw ParseError(std::string("matrix ") + name + ": wrong row count", 0);
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != m.cols()) {
      throw ParseError(std::string("matrix ") + name + ": wrong column count", 0);
    }
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = row[static_cast<std::size_t>(c)].get<double>();
      if (!std::isfinite(v)) throw ParseError(std::string("matrix ") + name + ": non-finite value", 0);
      m(r, c) = v;
    }
  }
}

}  // namespace

json spec_to_json(const ModelSpec& spec) {
  json layers = json::array();
  for (const auto& l : spec.layers) {
    json jl = {{"kind", std::string(to_string(l.kind))}};
    switch (l.kind) {
      case LayerKind::dense:
      case LayerKind::time_distributed_dense:
        jl["width"] = l.width;
        jl["activation"] = std::string(to_string(l.activation));
        break;
      case LayerKind::lstm:
        jl["width"] = l.width;
        jl["activation"] = std::string(to_string(l.activation));
        jl["returns_sequence"] = l.returns_sequence;
        break;
      case LayerKind::dropout:
        jl["rate"] = l.rate;
        break;
      case LayerKind::repeat_vector:
        jl["repeat"] = l.repeat;
        break;
      case LayerKind::flatten:
        break;
    }
    layers.push_back(std::move(jl));
  }
  return {{"layers", layers}, {"input_window", spec.input_window}, {"scale", spec.scale}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec spec;
  spec.input_window = j.at("input_window").get<int>();
  spec.scale = j.value("scale", 1.0);
  for (const auto& jl : j.at("layers")) {
    LayerSpec l;
    l.kind = layer_kind_from(jl.at("kind").get<std::string>());
    l.width = jl.value("width", 0);
    l.rate = jl.value("rate", 0.0);
    l.repeat = jl.value("repeat", 0);
    l.activation = activation_from(jl.value("activation", std::string("linear")));
    l.returns_sequence = jl.value("returns_sequence", false);
    spec.layers.push_back(l);
  }
  return spec;
}

std::string model_to_json(const Model& model) {
  json layers = json::array();
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    if (!model.layers[i].has_parameters()) continue;
    const LayerParams& p = model.params[i];
    json jl = {{"kind", std::string(to_string(model.layers[i].kind))}, {"W", matrix_to_json(p.W)}};
    if (model.layers[i].kind == LayerKind::lstm) jl["U"] = matrix_to_json(p.U);
    jl["b"] = std::vector<double>(p.b.data(), p.b.data() + p.b.size());
    layers.push_back(std::move(jl));
  }
  const json j = {{"spec", spec_to_json(model.spec)},
                  {"scaler", {{"mean", model.scaler.mean}, {"std", model.scaler.std}}},
                  {"layers", layers}};
  return j.dump() + "\n";
}

Model model_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Model model = build_model(spec_from_json(j.at("spec")), 0);
    model.scaler.mean = j.at("scaler").at("mean").get<double>();
    model.scaler.std = j.at("scaler").at("std").get<double>();
    if (!(model.scaler.std > 0.0)) throw ParseError("scaler std must be positive", 0);

    const json& layers = j.at("layers");
    std::size_t next = 0;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
      if (!model.layers[i].has_parameters()) continue;
      if (next >= layers.size()) throw ParseError("fewer parameter layers than the spec requires", 0);
      const json& jl = layers[next++];
      if (jl.at("kind").get<std::string>() != to_string(model.layers[i].kind)) {
        throw ParseError("layer kind disagrees with the spec", 0);
      }
      LayerParams& p = model.params[i];
      matrix_from_json(jl.at("W"), p.W, "W");
      if (model.layers[i].kind == LayerKind::lstm) matrix_from_json(jl.at("U"), p.U, "U");
      const auto b = jl.at("b").get<std::vector<double>>();
      if (static_cast<Eigen::Index>(b.size()) != p.b.size()) throw ParseError("bias length mismatch", 0);
      for (std::size_t r = 0; r < b.size(); ++r) p.b(static_cast<Eigen::Index>(r)) = b[r];
    }
    if (next != layers.size()) throw ParseError("more parameter layers than the spec defines", 0);
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("model: ") + e.what(), 0);
  } catch (const ValidationError& e) {
    throw ParseError(std::string("model spec: ") + e.what(), 0);
  }
}

void save_model(const Model& model, const std::filesystem::path& path) {
  core::write_file_atomic(path, model_to_json(model));
}

Model load_model(const std::filesystem::path& path) { return model_from_json(core::read_text_file(path)); }

}  // namespace cirpeak::nn
