#pragma once

#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "umlforge/uml.hpp"

namespace umlforge {

enum class RequirementKind { Functional, NonFunctional };

struct Requirement {
  std::string id;  // "{prefix}-{F|N}{counter:03}"
  RequirementKind kind = RequirementKind::Functional;
  std::string text;
  /// Diagram elements this requirement covers, see `trace_ref`.
  std::vector<std::string> trace;

  friend bool operator==(const Requirement&, const Requirement&) = default;
};

enum class MultiplicityStyle {
  Literal,   // "1..1", "0..*"
  Readable,  // "exactly one", "zero or more"
};

/// Sentence templates. Placeholders are substituted verbatim.
struct RequirementTemplates {
  // {class}, {attributes}
  std::string record = "The system shall record {class} information including {attributes}.";
  // {class}
  std::string record_bare = "The system shall record {class} information.";
  // {class}, {attributes}
  std::string audit = "The system shall record audit information for {class}, namely {attributes}.";
  // {class}, {multiplicity}, {other}
  std::string association = "The system shall associate each instance of {class} with {multiplicity} instances of {other}.";
  // {class}, {subclasses}
  std::string classification = "The system shall maintain instances of {class} classified as either {subclasses}.";
  // {class}, {values}
  std::string catalogue = "The system shall maintain a catalogue of {class} values comprising {values}.";
  // {class}, {other}
  std::string referential_integrity =
      "The system shall enforce referential integrity between {class} and {other} records.";
  // {classes}
  std::string naming = "The system shall apply consistent naming conventions to {classes}.";
};

struct ReqGenConfig {
  std::string domain_prefix = "REQ";
  std::set<std::string> audit_attribute_names = {"created_by", "created_at", "modified_by", "modified_at"};
  bool include_nonfunctional = false;
  MultiplicityStyle multiplicity_style = MultiplicityStyle::Literal;
  RequirementTemplates templates;

  /// Reads keys domain_prefix, audit_attributes, include_nonfunctional,
  /// multiplicity_style ("literal" | "readable") and templates.{name}.
  static ReqGenConfig from_json(const nlohmann::json& document);
};

/// Trace reference strings: "class:Name" and "relationship:Source->Target:kind".
std::string trace_ref(const UmlClass& cls);
std::string trace_ref(const Relationship& rel);

/// Requirements in document order. Throws ValidationError for invalid diagrams
/// and std::invalid_argument for an empty domain prefix.
std::vector<Requirement> generate_requirements(const UmlDiagram& diagram, const ReqGenConfig& cfg);

/// "ID: text" lines sorted by id. Throws std::invalid_argument on duplicate ids.
std::string render_document(const std::vector<Requirement>& requirements);

/// {"ID": ["class:...", ...], ...}
nlohmann::json trace_sidecar(const std::vector<Requirement>& requirements);

/// Rendered multiplicity, shared with the association template.
std::string render_multiplicity(const Multiplicity& m, MultiplicityStyle style);

}  // namespace umlforge
