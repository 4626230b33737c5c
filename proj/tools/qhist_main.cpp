// qhist: command-line surface over the measurement-pipeline library.
// Subcommands: paths, measure, decoherence, integrate, verify, demo.
// Exit codes: 0 success, 1 property or consistency failure, 2 usage or
// validation error, 3 resource cap.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qhist/decoherence.hpp"
#include "qhist/errors.hpp"
#include "qhist/integral.hpp"
#include "qhist/io.hpp"
#include "qhist/qmeasure.hpp"
#include "qhist/verify.hpp"

namespace {

using nlohmann::ordered_json;
using namespace qhist;

constexpr double kDemoTolerance = 1e-12;
constexpr std::size_t kFullMatrixWarnThreshold = std::size_t{1} << 10;

struct GlobalOptions {
  std::string format = "text";
  double tolerance = kDefaultTolerance;

  bool structured() const { return format == "structured"; }
};

/// Serializes with every float rendered at 17 significant digits, so
/// re-parsing and re-emitting a document reproduces it byte for byte.
/// Non-finite floats have no document form and come out as null.
void dump_structured(const ordered_json& j, std::string& out, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  const std::string pad_in(static_cast<std::size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::detail::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in + ordered_json(key).dump() + ": ";
        dump_structured(value, out, depth + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case nlohmann::detail::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& value : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        dump_structured(value, out, depth + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case nlohmann::detail::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_real(v) : "null";
      return;
    }
    default:
      out += j.dump();
      return;
  }
}

void emit_structured(const ordered_json& doc) {
  std::string out;
  dump_structured(doc, out, 0);
  std::cout << out << "\n";
}

void warn_full_matrix(std::uint64_t paths) {
  if (paths > kFullMatrixWarnThreshold) {
    std::cerr << "warning: " << paths << " paths; the full pairing table has "
              << paths * paths << " entries\n";
  }
}

std::string event_label(const Pipeline& pipeline, const Event& event) {
  std::string out = "{";
  bool first = true;
  for (std::size_t id : event.ids()) {
    if (!first) out += " ";
    first = false;
    out += path_label(pipeline, path_from_id(pipeline, id));
  }
  return out + "}";
}

// ---- paths ----------------------------------------------------------------

int cmd_paths(const GlobalOptions& g, const std::string& pipeline_file) {
  const Pipeline pipeline = load_pipeline_file(pipeline_file, g.tolerance);
  const std::vector<Path> paths = enumerate_paths(pipeline);
  const std::vector<double> measures = path_measures(pipeline);
  double total = 0.0;
  for (double m : measures) total += m;
  const double unit_residual = std::abs(total - 1.0);

  if (g.structured()) {
    ordered_json doc;
    doc["command"] = "paths";
    doc["dim"] = pipeline.dim();
    doc["steps"] = pipeline.step_count();
    doc["path_count"] = paths.size();
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < paths.size(); ++i) {
      ordered_json row;
      row["id"] = i;
      row["path"] = path_label(pipeline, paths[i]);
      row["measure"] = measures[i];
      rows.push_back(std::move(row));
    }
    doc["paths"] = std::move(rows);
    doc["total"] = total;
    doc["unit_residual"] = unit_residual;
    emit_structured(doc);
    return 0;
  }

  std::size_t width = 4;
  for (const Path& p : paths) width = std::max(width, path_label(pipeline, p).size());
  std::cout << "path space: " << paths.size() << " paths, dimension "
            << pipeline.dim() << ", " << pipeline.step_count() << " steps\n";
  std::cout << std::left << std::setw(6) << "id" << std::setw(static_cast<int>(width) + 2)
            << "path" << "measure\n";
  for (std::size_t i = 0; i < paths.size(); ++i) {
    std::cout << std::left << std::setw(6) << i << std::setw(static_cast<int>(width) + 2)
              << path_label(pipeline, paths[i]) << format_real(measures[i]) << "\n";
  }
  std::cout << "total " << format_real(total) << "  (unit residual "
            << format_real(unit_residual) << ")\n";
  return 0;
}

// ---- measure --------------------------------------------------------------

int cmd_measure(const GlobalOptions& g, const std::string& pipeline_file,
                const std::string& event_file) {
  const Pipeline pipeline = load_pipeline_file(pipeline_file, g.tolerance);
  const EventSpec spec = load_event_spec_file(pipeline, event_file);
  warn_full_matrix(pipeline.path_count());
  const QMeasureContext ctx(pipeline, g.tolerance);

  const bool homogeneous = std::holds_alternative<HomogeneousEvent>(spec);
  const Event event = homogeneous
                          ? expand_homogeneous(pipeline, std::get<HomogeneousEvent>(spec))
                          : std::get<Event>(spec);
  const MeasureDecomposition dec = decompose_measure(ctx, event);
  const double fast = homogeneous
                          ? measure_homogeneous(ctx, std::get<HomogeneousEvent>(spec))
                          : dec.total;
  const double split_residual = std::abs(dec.total - dec.diagonal - dec.interference);

  if (g.structured()) {
    ordered_json doc;
    doc["command"] = "measure";
    doc["event_kind"] = homogeneous ? "homogeneous" : "paths";
    ordered_json ids = ordered_json::array();
    for (std::size_t id : event.ids()) {
      ids.push_back(path_label(pipeline, path_from_id(pipeline, id)));
    }
    doc["event"] = std::move(ids);
    doc["size"] = event.size();
    doc["measure"] = dec.total;
    doc["diagonal"] = dec.diagonal;
    doc["interference"] = dec.interference;
    doc["split_residual"] = split_residual;
    if (homogeneous) {
      doc["chain_value"] = fast;
      doc["chain_residual"] = std::abs(fast - dec.total);
    }
    emit_structured(doc);
    return 0;
  }

  std::cout << "event " << event_label(pipeline, event) << " (" << event.size()
            << " paths)\n";
  std::cout << "measure       " << format_real(dec.total) << "\n";
  std::cout << "  diagonal    " << format_real(dec.diagonal) << "\n";
  std::cout << "  interference " << format_real(dec.interference) << "\n";
  std::cout << "split residual " << format_real(split_residual) << "\n";
  if (homogeneous) {
    std::cout << "chain value   " << format_real(fast) << "  (residual "
              << format_real(std::abs(fast - dec.total)) << ")\n";
  }
  return 0;
}

// ---- decoherence ----------------------------------------------------------

int cmd_decoherence(const GlobalOptions& g, const std::string& pipeline_file,
                    const std::vector<std::string>& pair) {
  const Pipeline pipeline = load_pipeline_file(pipeline_file, g.tolerance);

  if (!pair.empty()) {
    const Path w1 = path_from_id(pipeline, parse_path_label(pipeline, pair[0]));
    const Path w2 = path_from_id(pipeline, parse_path_label(pipeline, pair[1]));
    const Complex value = decoherence_pair(pipeline, w1, w2);
    if (g.structured()) {
      ordered_json doc;
      doc["command"] = "decoherence";
      doc["row"] = pair[0];
      doc["col"] = pair[1];
      doc["re"] = value.real();
      doc["im"] = value.imag();
      emit_structured(doc);
    } else {
      std::cout << "D(" << pair[0] << " ; " << pair[1] << ") = "
                << format_real(value.real()) << " + " << format_real(value.imag())
                << "i\n";
    }
    return 0;
  }

  warn_full_matrix(pipeline.path_count());
  const DecoherenceMatrix matrix = decoherence_matrix(pipeline);
  const std::vector<Path> paths = enumerate_paths(pipeline);
  double hermiticity = 0.0;
  Complex total = 0.0;
  for (std::size_t j = 0; j < matrix.order; ++j) {
    for (std::size_t k = 0; k < matrix.order; ++k) {
      hermiticity = std::max(hermiticity,
                             std::abs(matrix(j, k) - std::conj(matrix(k, j))));
      total += matrix(j, k);
    }
  }
  const double unit_residual = std::abs(total - Complex(1.0));

  if (g.structured()) {
    ordered_json doc;
    doc["command"] = "decoherence";
    doc["order"] = matrix.order;
    ordered_json rows = ordered_json::array();
    for (std::size_t j = 0; j < matrix.order; ++j) {
      for (std::size_t k = 0; k < matrix.order; ++k) {
        ordered_json row;
        row["row"] = path_label(pipeline, paths[j]);
        row["col"] = path_label(pipeline, paths[k]);
        row["re"] = matrix(j, k).real();
        row["im"] = matrix(j, k).imag();
        rows.push_back(std::move(row));
      }
    }
    doc["entries"] = std::move(rows);
    doc["hermiticity_residual"] = hermiticity;
    doc["total_re"] = total.real();
    doc["total_im"] = total.imag();
    doc["unit_residual"] = unit_residual;
    emit_structured(doc);
    return 0;
  }

  std::size_t width = 4;
  for (const Path& p : paths) width = std::max(width, path_label(pipeline, p).size());
  std::cout << "pairing table: " << matrix.order << " x " << matrix.order << "\n";
  for (std::size_t j = 0; j < matrix.order; ++j) {
    for (std::size_t k = 0; k < matrix.order; ++k) {
      std::cout << std::left << std::setw(static_cast<int>(width) + 2)
                << path_label(pipeline, paths[j])
                << std::setw(static_cast<int>(width) + 2)
                << path_label(pipeline, paths[k]) << format_real(matrix(j, k).real())
                << " + " << format_real(matrix(j, k).imag()) << "i\n";
    }
  }
  std::cout << "hermiticity residual " << format_real(hermiticity) << "\n";
  std::cout << "total " << format_real(total.real()) << " + "
            << format_real(total.imag()) << "i  (unit residual "
            << format_real(unit_residual) << ")\n";
  return 0;
}

// ---- integrate ------------------------------------------------------------

int cmd_integrate(const GlobalOptions& g, const std::string& pipeline_file,
                  const std::string& function_file) {
  const Pipeline pipeline = load_pipeline_file(pipeline_file, g.tolerance);
  const FunctionTable f = load_function_table_file(pipeline, function_file);
  warn_full_matrix(pipeline.path_count());
  const QMeasureContext ctx(pipeline, g.tolerance);
  const IntegralResult result = integrate(ctx, f);

  double diagonal_term = 0.0;
  for (std::size_t j = 0; j < ctx.matrix().order; ++j) {
    diagonal_term += f.values[j] * ctx.matrix()(j, j).real();
  }
  const double interference_term = result.by_pairwise - diagonal_term;

  if (g.structured()) {
    ordered_json doc;
    doc["command"] = "integrate";
    doc["value"] = result.value;
    doc["by_level_set"] = result.by_level_set;
    doc["by_pairwise"] = result.by_pairwise;
    doc["agreement_residual"] = result.agreement_residual;
    doc["diagonal_term"] = diagonal_term;
    doc["interference_term"] = interference_term;
    emit_structured(doc);
    return 0;
  }

  std::cout << "integral          " << format_real(result.value) << "\n";
  std::cout << "  by level set    " << format_real(result.by_level_set) << "\n";
  std::cout << "  by pairwise sum " << format_real(result.by_pairwise) << "\n";
  std::cout << "  agreement residual " << format_real(result.agreement_residual)
            << "\n";
  std::cout << "  diagonal term     " << format_real(diagonal_term) << "\n";
  std::cout << "  interference term " << format_real(interference_term) << "\n";
  return 0;
}

// ---- verify ---------------------------------------------------------------

ordered_json report_to_json(const SuiteReport& report) {
  ordered_json doc;
  doc["command"] = "verify";
  doc["trials"] = report.trials;
  doc["pass"] = report.pass;
  doc["max_residual"] = report.max_residual;
  ordered_json props = ordered_json::array();
  for (const PropertyResult& p : report.properties) {
    ordered_json row;
    row["name"] = p.name;
    row["trials"] = p.trials;
    row["max_residual"] = p.max_residual;
    row["pass"] = p.pass();
    row["failures"] = p.failures;
    props.push_back(std::move(row));
  }
  doc["properties"] = std::move(props);
  return doc;
}

int cmd_verify(const GlobalOptions& g, const GeneratorConfig& cfg) {
  cfg.validate();
  const SuiteReport report = run_suite(cfg);

  if (g.structured()) {
    emit_structured(report_to_json(report));
  } else {
    std::size_t width = 8;
    for (const PropertyResult& p : report.properties) {
      width = std::max(width, p.name.size());
    }
    std::cout << "suite: " << report.trials << " trials, seed " << cfg.seed << "\n";
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << "property"
              << std::setw(8) << "trials" << std::setw(16) << "max residual"
              << "status\n";
    for (const PropertyResult& p : report.properties) {
      std::ostringstream residual;
      residual << std::scientific << std::setprecision(3) << p.max_residual;
      std::cout << std::left << std::setw(static_cast<int>(width) + 2) << p.name
                << std::setw(8) << p.trials << std::setw(16) << residual.str()
                << (p.pass() ? "pass" : "FAIL") << "\n";
      for (const std::string& token : p.failures) {
        std::cout << "    failing trial: " << token << "\n";
      }
    }
    std::ostringstream residual;
    residual << std::scientific << std::setprecision(3) << report.max_residual;
    std::cout << "result: " << (report.pass ? "PASS" : "FAIL") << " (max residual "
              << residual.str() << ")\n";
  }
  return report.pass ? 0 : 1;
}

// ---- demo -----------------------------------------------------------------

struct DemoRow {
  std::string quantity;
  double value = 0.0;
  double expected = 0.0;

  double residual() const { return std::abs(value - expected); }
};

std::string compact_label(const Pipeline& pipeline, std::size_t id) {
  std::string label = path_label(pipeline, path_from_id(pipeline, id));
  label.erase(std::remove(label.begin(), label.end(), ','), label.end());
  return label;
}

int cmd_demo(const GlobalOptions& g, const std::string& name, const std::string& state) {
  if (name != "two-slit") {
    throw ValidationError("unknown demo '" + name + "'; available: two-slit");
  }
  const bool zero = state == "zero";
  const Pipeline pipeline =
      two_slit_pipeline(zero ? TwoSlitState::kZero : TwoSlitState::kUniform);
  const QMeasureContext ctx(pipeline);
  const double root2 = std::sqrt(2.0);

  // Path order 00, 01, 10, 11; pair order (00,01) (00,10) (00,11) (01,10)
  // (01,11) (10,11); doubletons in the same pair order; tripletons by
  // excluded path. Expected values for the uniform state are the worked
  // two-slit numbers; the zero state is interference-free, so every event
  // expectation is the plain sum of its path measures.
  const std::vector<double> mu_expected =
      zero ? std::vector<double>{0.5, 0.5, 0.0, 0.0}
           : std::vector<double>{0.25, 0.25, 0.25, 0.25};
  const std::vector<double> interference_expected =
      zero ? std::vector<double>{0, 0, 0, 0, 0, 0}
           : std::vector<double>{0, 0.5, 0, 0, -0.5, 0};
  const std::vector<double> doubleton_expected =
      zero ? std::vector<double>{1.0, 0.5, 0.5, 0.5, 0.5, 0.0}
           : std::vector<double>{0.5, 1.0, 0.5, 0.5, 0.0, 0.5};
  const std::vector<double> tripleton_expected =
      zero ? std::vector<double>{0.5, 0.5, 1.0, 1.0}
           : std::vector<double>{0.25, 1.25, 0.25, 1.25};
  const double integral_f_expected = zero ? (1.0 + root2) / 2.0 : (2.0 + 2.0 * root2) / 4.0;
  const double integral_g_expected = 0.5;

  std::vector<DemoRow> rows;
  for (std::size_t i = 0; i < 4; ++i) {
    rows.push_back({"mu(" + compact_label(pipeline, i) + ")", measure_path(ctx, i),
                    mu_expected[i]});
  }
  std::size_t pair_index = 0;
  double max_interference = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j, ++pair_index) {
      const double value = interference_pair(ctx, i, j);
      max_interference = std::max(max_interference, std::abs(value));
      rows.push_back({"I(" + compact_label(pipeline, i) + ";" +
                          compact_label(pipeline, j) + ")",
                      value, interference_expected[pair_index]});
    }
  }
  pair_index = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j, ++pair_index) {
      rows.push_back({"mu({" + compact_label(pipeline, i) + "," +
                          compact_label(pipeline, j) + "})",
                      measure(ctx, Event::from_ids({i, j})),
                      doubleton_expected[pair_index]});
    }
  }
  for (std::size_t excluded = 0; excluded < 4; ++excluded) {
    std::vector<std::size_t> ids;
    std::string label;
    for (std::size_t i = 0; i < 4; ++i) {
      if (i == excluded) continue;
      ids.push_back(i);
      if (!label.empty()) label += ",";
      label += compact_label(pipeline, i);
    }
    rows.push_back({"mu({" + label + "})", measure(ctx, Event::from_ids(ids)),
                    tripleton_expected[excluded]});
  }
  FunctionTable path_length;
  path_length.values = {1.0, root2, root2, 1.0};
  FunctionTable nonclassical;
  nonclassical.values = {0.0, 1.0, 1.0, 2.0};
  rows.push_back({"integral(path length)", integrate(ctx, path_length).value,
                  integral_f_expected});
  rows.push_back({"integral(staircase)", integrate(ctx, nonclassical).value,
                  integral_g_expected});

  const bool classical = max_interference <= kDemoTolerance;
  double max_residual = 0.0;
  for (const DemoRow& row : rows) max_residual = std::max(max_residual, row.residual());
  const bool pass = max_residual <= kDemoTolerance;

  if (g.structured()) {
    ordered_json doc;
    doc["command"] = "demo";
    doc["name"] = name;
    doc["state"] = state;
    doc["classical"] = classical;
    ordered_json out_rows = ordered_json::array();
    for (const DemoRow& row : rows) {
      ordered_json r;
      r["quantity"] = row.quantity;
      r["value"] = row.value;
      r["expected"] = row.expected;
      r["residual"] = row.residual();
      out_rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(out_rows);
    doc["max_residual"] = max_residual;
    doc["pass"] = pass;
    emit_structured(doc);
  } else {
    std::size_t width = 8;
    for (const DemoRow& row : rows) width = std::max(width, row.quantity.size());
    std::cout << "demo two-slit (" << state << " state)\n";
    std::cout << std::left << std::setw(static_cast<int>(width) + 2) << "quantity"
              << std::setw(22) << "value" << std::setw(22) << "expected"
              << "residual\n";
    for (const DemoRow& row : rows) {
      std::cout << std::left << std::setw(static_cast<int>(width) + 2) << row.quantity
                << std::setw(22) << format_real(row.value) << std::setw(22)
                << format_real(row.expected) << format_real(row.residual()) << "\n";
    }
    std::cout << "classical measure: " << (classical ? "yes" : "no")
              << "  (max interference " << format_real(max_interference) << ")\n";
    std::cout << "result: " << (pass ? "PASS" : "FAIL") << " (max residual "
              << format_real(max_residual) << ", tolerance "
              << format_real(kDemoTolerance) << ")\n";
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite measurement pipelines: path measures, interference and quantum integrals"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--format", global.format, "Output format")
      ->check(CLI::IsMember({"text", "structured"}))
      ->capture_default_str();
  app.add_option("--tolerance", global.tolerance, "Validation and check tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::string pipeline_file;
  std::string event_file;
  std::string function_file;
  std::vector<std::string> pair;
  std::string demo_name;
  std::string demo_state = "uniform";
  GeneratorConfig cfg;

  CLI::App* paths = app.add_subcommand("paths", "List every path with its measure");
  paths->fallthrough();
  paths->add_option("pipeline", pipeline_file, "Pipeline file")->required();

  CLI::App* measure = app.add_subcommand("measure", "Measure of one event");
  measure->fallthrough();
  measure->add_option("pipeline", pipeline_file, "Pipeline file")->required();
  measure->add_option("event", event_file, "Event file")->required();

  CLI::App* decoherence =
      app.add_subcommand("decoherence", "Full pairing table or one pair");
  decoherence->fallthrough();
  decoherence->add_option("pipeline", pipeline_file, "Pipeline file")->required();
  decoherence->add_option("--pair", pair, "Two path labels")->expected(2);

  CLI::App* integrate =
      app.add_subcommand("integrate", "Quantum integral of a path function");
  integrate->fallthrough();
  integrate->add_option("pipeline", pipeline_file, "Pipeline file")->required();
  integrate->add_option("function", function_file, "Function file")->required();

  CLI::App* verify = app.add_subcommand("verify", "Run the property suite");
  verify->fallthrough();
  verify->add_option("--trials", cfg.trials, "Random pipelines to sample")
      ->capture_default_str();
  verify->add_option("--seed", cfg.seed, "Suite seed")->capture_default_str();
  verify->add_option("--dim-max", cfg.dim_max, "Largest sampled dimension")
      ->capture_default_str();
  verify->add_option("--steps-max", cfg.steps_max, "Largest sampled step count")
      ->capture_default_str();
  verify->add_option("--mixed-fraction", cfg.mixed_state_fraction,
                     "Fraction of mixed initial states")
      ->capture_default_str();

  CLI::App* demo = app.add_subcommand("demo", "Run a built-in worked example");
  demo->fallthrough();
  demo->add_option("name", demo_name, "Demo name")->required();
  demo->add_option("--state", demo_state, "Initial state")
      ->check(CLI::IsMember({"zero", "uniform"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*paths) return cmd_paths(global, pipeline_file);
    if (*measure) return cmd_measure(global, pipeline_file, event_file);
    if (*decoherence) return cmd_decoherence(global, pipeline_file, pair);
    if (*integrate) return cmd_integrate(global, pipeline_file, function_file);
    if (*verify) return cmd_verify(global, cfg);
    if (*demo) return cmd_demo(global, demo_name, demo_state);
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConsistencyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
