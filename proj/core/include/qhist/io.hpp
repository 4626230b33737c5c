#pragma once

#include <string>
#include <variant>

#include "qhist/pipeline.hpp"

namespace qhist {

/// Event specifications name paths either explicitly or as a per-step
/// outcome product.
using EventSpec = std::variant<Event, HomogeneousEvent>;

/// Parses a pipeline document. Malformed documents (bad syntax, missing or
/// mistyped fields) raise ParseError; documents that parse but violate a
/// pipeline invariant raise ValidationError naming the invariant.
Pipeline load_pipeline(const std::string& document,
                       double tolerance = kDefaultTolerance);
Pipeline load_pipeline_file(const std::string& path,
                            double tolerance = kDefaultTolerance);

/// Parses a function table {"values": {"<comma-joined labels>": real}}.
/// Every path of the pipeline must appear exactly once; missing and extra
/// keys are listed in the ValidationError message.
FunctionTable load_function_table(const Pipeline& pipeline,
                                  const std::string& document);
FunctionTable load_function_table_file(const Pipeline& pipeline,
                                       const std::string& path);

/// Parses {"paths": ["a1,b1", ...]} or {"homogeneous": [["a1"],["b1","b2"]]}.
/// Unknown labels raise ValidationError naming the label and step.
EventSpec load_event_spec(const Pipeline& pipeline, const std::string& document);
EventSpec load_event_spec_file(const Pipeline& pipeline, const std::string& path);

/// Resolves a single comma-joined path label to its canonical path id.
std::size_t parse_path_label(const Pipeline& pipeline, const std::string& label);

/// Serializes a pipeline back to the document format; load_pipeline of the
/// result reproduces the pipeline bit for bit.
std::string pipeline_to_document(const Pipeline& pipeline);

/// Formats a real with 17 significant digits (enough to round-trip a double).
std::string format_real(double value);

}  // namespace qhist
