#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "umlforge/uml.hpp"

namespace umlforge {

/// A relationship reduced to what matching looks at: normalized endpoints and kind.
struct Triple {
  std::string source;
  std::string target;
  RelationshipKind kind = RelationshipKind::Association;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// "customer -association-> order"
std::string to_string(const Triple& triple);

/// Normalized triples of a diagram, with multiplicity of occurrence.
std::map<Triple, std::size_t> relationship_multiset(const UmlDiagram& diagram);

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;

  friend bool operator==(const Prf&, const Prf&) = default;
};

/// P = matched/gen, R = matched/gold, F1 = harmonic mean (0 when P+R = 0).
/// An empty denominator scores 1 when both sets are empty and 0 otherwise.
Prf compute_prf(std::size_t gold_count, std::size_t gen_count, std::size_t matched_count);

/// Variant for soft matching, where the gold-side and generated-side numerators differ.
Prf compute_prf(std::size_t gold_count, std::size_t gen_count, std::size_t matched_gold, std::size_t matched_gen);

using AttributeRef = std::pair<std::string, std::string>;  // (class, attribute), both normalized

struct MatchResult {
  std::set<std::string> matched_classes;
  std::set<AttributeRef> matched_attributes;
  std::set<Triple> matched_relationships_hard;
  std::set<Triple> matched_relationships_soft;
};

enum class MatchMode { Hard, Soft };

std::set<std::string> match_classes(const UmlDiagram& gold, const UmlDiagram& gen);

/// Attribute pairs present in both diagrams, restricted to `matched_classes`.
std::set<AttributeRef> match_attributes(const UmlDiagram& gold, const UmlDiagram& gen,
                                        const std::set<std::string>& matched_classes);

/// Hard: gold triples also generated with the same source, target and kind.
/// Soft: gold triples whose two classes are connected in `gen` in either direction by any kind.
std::set<Triple> match_relationships(const UmlDiagram& gold, const UmlDiagram& gen, MatchMode mode);

MatchResult match(const UmlDiagram& gold, const UmlDiagram& gen);

enum class Dimension { Class, Attribute, Relationship };
enum class ErrorType { Missing, Extra, Misrepresented, Wrong, Duplicate, Misclassified };

std::string_view to_string(Dimension dimension) noexcept;
std::string_view to_string(ErrorType type) noexcept;

/// True for the ten cells of the error taxonomy:
/// Class {Missing, Extra, Misrepresented}, Attribute {Missing, Extra, Wrong},
/// Relationship {Missing, Extra, Duplicate, Misclassified}.
bool is_taxonomy_cell(Dimension dimension, ErrorType type) noexcept;

struct ErrorRecord {
  Dimension dimension;
  ErrorType error_type;
  std::string subject;
  std::string detail;

  /// Throws std::invalid_argument when (dimension, error_type) is not a taxonomy cell.
  ErrorRecord(Dimension dimension, ErrorType error_type, std::string subject, std::string detail = {});

  friend bool operator==(const ErrorRecord&, const ErrorRecord&) = default;
};

/// Automatable categories only. Class Misrepresented and Attribute Wrong need human judgement
/// and come exclusively from an annotation overlay.
std::vector<ErrorRecord> classify_errors(const UmlDiagram& gold, const UmlDiagram& gen, const MatchResult& matches);

/// Overlay records: a JSON array (or {"annotations": [...]}) of
/// {"dimension", "error_type", "subject", "note"}. Throws FormatError on bad input.
std::vector<ErrorRecord> parse_annotations(const nlohmann::json& document);
std::vector<ErrorRecord> load_annotations(const std::filesystem::path& path);

struct EvalReport {
  Prf classes;
  Prf attributes;
  Prf relationships_strict;
  Prf relationships_relaxed;
  double average = 0;
  std::vector<ErrorRecord> errors;

  /// Count of errors per (dimension, error type) over all ten cells.
  std::map<std::pair<Dimension, ErrorType>, std::size_t> error_counts() const;
  nlohmann::json to_json() const;
};

EvalReport evaluate(const UmlDiagram& gold, const UmlDiagram& gen,
                    const std::vector<ErrorRecord>& annotations = {});

/// Unweighted mean over use cases of every precision, recall and F1; errors are concatenated.
EvalReport macro_average(const std::vector<EvalReport>& reports);

/// Plain-text table with one row per (label, report): Classes, Attributes,
/// Relationships (S), Relationships (R), Average as F1 values with four decimals.
std::string render_table(const std::vector<std::pair<std::string, EvalReport>>& rows);

/// Error counts grouped by dimension.
std::string render_taxonomy(const EvalReport& report);

}  // namespace umlforge
