#include "qhist/io.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "qhist/errors.hpp"

namespace qhist {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_document(const std::string& document) {
  try {
    return json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed document: ") + e.what());
  }
}

const json& require_field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + " must be an object");
  auto it = j.find(key);
  if (it == j.end()) throw ParseError(where + " is missing field '" + key + "'");
  return *it;
}

double as_real(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + " must be a number");
  return j.get<double>();
}

Complex as_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw ParseError(where + " must be a two-element [re, im] array");
  }
  return {as_real(j[0], where + "[0]"), as_real(j[1], where + "[1]")};
}

Vector as_vector(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ParseError(where + " must be a nonempty array of [re, im] pairs");
  }
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[i] = as_complex(j[i], where + "[" + std::to_string(i) + "]");
  }
  return v;
}

Matrix as_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ParseError(where + " must be a nonempty array of rows");
  }
  const std::size_t rows = j.size();
  if (!j[0].is_array() || j[0].empty()) {
    throw ParseError(where + "[0] must be a nonempty row array");
  }
  const std::size_t cols = j[0].size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const json& row = j[r];
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != cols) {
      throw ParseError(row_where + " must be a row of length " + std::to_string(cols));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = as_complex(row[c], row_where + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

}  // namespace

Pipeline load_pipeline(const std::string& document, double tolerance) {
  const json doc = parse_document(document);

  const json& dim_field = require_field(doc, "dim", "document");
  if (!dim_field.is_number_integer() || dim_field.get<long long>() <= 0) {
    throw ParseError("'dim' must be a positive integer");
  }
  const std::size_t dim = dim_field.get<std::size_t>();

  const json& initial_field = require_field(doc, "initial", "document");
  if (!initial_field.is_object()) throw ParseError("'initial' must be an object");
  const bool has_pure = initial_field.contains("pure");
  const bool has_mixed = initial_field.contains("mixed");
  if (has_pure == has_mixed) {
    throw ParseError("'initial' must contain exactly one of 'pure' or 'mixed'");
  }
  InitialState initial =
      has_pure ? InitialState(as_vector(initial_field["pure"], "initial.pure"))
               : InitialState(as_matrix(initial_field["mixed"], "initial.mixed"));

  const json& steps_field = require_field(doc, "steps", "document");
  if (!steps_field.is_array() || steps_field.empty()) {
    throw ParseError("'steps' must be a nonempty array");
  }
  std::vector<Step> steps;
  steps.reserve(steps_field.size());
  for (std::size_t i = 0; i < steps_field.size(); ++i) {
    const std::string where = "steps[" + std::to_string(i) + "]";
    const json& step = steps_field[i];
    Step out;
    out.gate = as_matrix(require_field(step, "gate", where), where + ".gate");
    const json& pvm = require_field(step, "pvm", where);
    if (!pvm.is_array() || pvm.empty()) {
      throw ParseError(where + ".pvm must be a nonempty array");
    }
    for (std::size_t k = 0; k < pvm.size(); ++k) {
      const std::string outcome_where = where + ".pvm[" + std::to_string(k) + "]";
      const json& label = require_field(pvm[k], "label", outcome_where);
      if (!label.is_string()) throw ParseError(outcome_where + ".label must be a string");
      out.measurement.labels.push_back(label.get<std::string>());
      out.measurement.projectors.push_back(
          as_matrix(require_field(pvm[k], "projector", outcome_where),
                    outcome_where + ".projector"));
    }
    steps.push_back(std::move(out));
  }

  return Pipeline(dim, std::move(initial), std::move(steps), tolerance);
}

Pipeline load_pipeline_file(const std::string& path, double tolerance) {
  return load_pipeline(read_file(path), tolerance);
}

FunctionTable load_function_table(const Pipeline& pipeline,
                                  const std::string& document) {
  const json doc = parse_document(document);
  const json& values = require_field(doc, "values", "document");
  if (!values.is_object()) throw ParseError("'values' must be an object");

  const std::vector<Path> paths = enumerate_paths(pipeline);
  FunctionTable table;
  table.values.assign(paths.size(), 0.0);

  std::set<std::string> expected;
  for (const Path& p : paths) expected.insert(path_label(pipeline, p));

  std::vector<std::string> extra;
  std::set<std::string> seen;
  for (auto it = values.begin(); it != values.end(); ++it) {
    if (!expected.count(it.key())) {
      extra.push_back(it.key());
      continue;
    }
    seen.insert(it.key());
    const double v = as_real(it.value(), "values['" + it.key() + "']");
    if (!std::isfinite(v)) {
      throw ValidationError("values['" + it.key() + "'] is not finite");
    }
    table.values[parse_path_label(pipeline, it.key())] = v;
  }

  std::vector<std::string> missing;
  for (const std::string& label : expected) {
    if (!seen.count(label)) missing.push_back(label);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "function table does not cover the path space exactly;";
    if (!missing.empty()) {
      msg += " missing:";
      for (const std::string& s : missing) msg += " '" + s + "'";
      msg += ";";
    }
    if (!extra.empty()) {
      msg += " extra:";
      for (const std::string& s : extra) msg += " '" + s + "'";
    }
    throw ValidationError(msg);
  }
  return table;
}

FunctionTable load_function_table_file(const Pipeline& pipeline,
                                       const std::string& path) {
  return load_function_table(pipeline, read_file(path));
}

std::size_t parse_path_label(const Pipeline& pipeline, const std::string& label) {
  const auto& steps = pipeline.steps();
  std::vector<std::string> parts;
  std::string current;
  for (char ch : label) {
    if (ch == ',') {
      parts.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  parts.push_back(current);

  if (parts.size() != steps.size()) {
    throw ValidationError("path '" + label + "' has " + std::to_string(parts.size()) +
                          " labels, pipeline has " + std::to_string(steps.size()) +
                          " steps");
  }
  Path path;
  path.outcomes.reserve(parts.size());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto idx = steps[i].measurement.index_of(parts[i]);
    if (!idx) {
      throw ValidationError("unknown outcome label '" + parts[i] + "' at step " +
                            std::to_string(i + 1));
    }
    path.outcomes.push_back(*idx);
  }
  return path_id(pipeline, path);
}

EventSpec load_event_spec(const Pipeline& pipeline, const std::string& document) {
  const json doc = parse_document(document);
  if (!doc.is_object()) throw ParseError("event specification must be an object");
  const bool has_paths = doc.contains("paths");
  const bool has_homogeneous = doc.contains("homogeneous");
  if (has_paths == has_homogeneous) {
    throw ParseError(
        "event specification must contain exactly one of 'paths' or 'homogeneous'");
  }

  if (has_paths) {
    const json& list = doc["paths"];
    if (!list.is_array()) throw ParseError("'paths' must be an array of path labels");
    std::vector<std::size_t> ids;
    std::set<std::string> seen;
    for (const json& entry : list) {
      if (!entry.is_string()) throw ParseError("'paths' entries must be strings");
      const std::string label = entry.get<std::string>();
      if (!seen.insert(label).second) {
        throw ValidationError("duplicate path '" + label + "' in event");
      }
      ids.push_back(parse_path_label(pipeline, label));
    }
    return Event::from_ids(std::move(ids));
  }

  const json& factors_field = doc["homogeneous"];
  if (!factors_field.is_array()) {
    throw ParseError("'homogeneous' must be an array of per-step label arrays");
  }
  const auto& steps = pipeline.steps();
  if (factors_field.size() != steps.size()) {
    throw ValidationError("homogeneous event has " +
                          std::to_string(factors_field.size()) +
                          " factors, pipeline has " + std::to_string(steps.size()) +
                          " steps");
  }
  HomogeneousEvent h;
  for (std::size_t i = 0; i < factors_field.size(); ++i) {
    const json& factor = factors_field[i];
    if (!factor.is_array()) {
      throw ParseError("'homogeneous'[" + std::to_string(i) + "] must be a label array");
    }
    std::vector<std::size_t> indices;
    for (const json& entry : factor) {
      if (!entry.is_string()) {
        throw ParseError("'homogeneous'[" + std::to_string(i) +
                         "] entries must be strings");
      }
      const std::string label = entry.get<std::string>();
      const auto idx = steps[i].measurement.index_of(label);
      if (!idx) {
        throw ValidationError("unknown outcome label '" + label + "' at step " +
                              std::to_string(i + 1));
      }
      indices.push_back(*idx);
    }
    h.factors.push_back(std::move(indices));
  }
  validate_homogeneous(pipeline, h);
  return h;
}

EventSpec load_event_spec_file(const Pipeline& pipeline, const std::string& path) {
  return load_event_spec(pipeline, read_file(path));
}

std::string pipeline_to_document(const Pipeline& pipeline) {
  ordered_json doc;
  doc["dim"] = pipeline.dim();
  if (pipeline.has_pure_initial()) {
    doc["initial"] = {{"pure", vector_to_json(pipeline.pure_initial())}};
  } else {
    doc["initial"] = {{"mixed", matrix_to_json(pipeline.mixed_initial())}};
  }
  doc["steps"] = json::array();
  for (const Step& step : pipeline.steps()) {
    ordered_json s;
    s["gate"] = matrix_to_json(step.gate);
    s["pvm"] = json::array();
    for (std::size_t k = 0; k < step.measurement.outcome_count(); ++k) {
      ordered_json outcome;
      outcome["label"] = step.measurement.labels[k];
      outcome["projector"] = matrix_to_json(step.measurement.projectors[k]);
      s["pvm"].push_back(outcome);
    }
    doc["steps"].push_back(s);
  }
  return doc.dump(2);
}

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace qhist
