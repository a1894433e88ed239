#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "umlforge/uml.hpp"

namespace umlforge {

/// Validator for the JSON Schema subset used by the shipped schemas:
/// type, enum, required, properties, additionalProperties (boolean),
/// items, anyOf, minLength, minItems.
class JsonSchema {
 public:
  explicit JsonSchema(nlohmann::json schema);

  /// One message per violation, each prefixed with a JSON pointer. Empty when valid.
  std::vector<std::string> validate(const nlohmann::json& instance) const;

  const nlohmann::json& document() const noexcept { return schema_; }

 private:
  void check(const nlohmann::json& schema, const nlohmann::json& value, const std::string& path,
             std::vector<std::string>& errors) const;

  nlohmann::json schema_;
};

/// The JSON object model produced by the model-integration stage.
/// Top-level keys: "classes" and "relationships".
struct IntermediateModel {
  nlohmann::json document;

  friend bool operator==(const IntermediateModel&, const IntermediateModel&) = default;
};

/// Text of the shipped `intermediate_model.schema.json`.
std::string_view intermediate_model_schema_text();
const JsonSchema& intermediate_model_schema();

/// Schema violations plus semantic checks (multiplicity syntax, diagram validity).
std::vector<std::string> check_intermediate_model(const nlohmann::json& document);

/// Throws SchemaError when `check_intermediate_model` reports anything.
UmlDiagram to_diagram(const IntermediateModel& model);

/// Canonical model for a diagram. Operations are not carried.
IntermediateModel from_diagram(const UmlDiagram& diagram);

/// Diagram loader keyed on file extension: `.json` models or PlantUML otherwise.
/// Throws Error with the collected diagnostics if the file cannot be read or parsed.
UmlDiagram load_diagram_file(const std::string& path);

}  // namespace umlforge
