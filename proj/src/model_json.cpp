#include "umlforge/model_json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "umlforge/errors.hpp"
#include "umlforge/plantuml.hpp"

namespace umlforge {

using nlohmann::json;

namespace {

bool matches_type(const json& value, std::string_view type) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "integer") return value.is_number_integer();
  if (type == "number") return value.is_number();
  if (type == "null") return value.is_null();
  return false;
}

std::string escape_pointer(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("file not found: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

JsonSchema::JsonSchema(json schema) : schema_(std::move(schema)) {}

std::vector<std::string> JsonSchema::validate(const json& instance) const {
  std::vector<std::string> errors;
  check(schema_, instance, "", errors);
  return errors;
}

void JsonSchema::check(const json& schema, const json& value, const std::string& path,
                       std::vector<std::string>& errors) const {
  const std::string where = path.empty() ? "/" : path;

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = matches_type(value, it->get<std::string>());
    } else if (it->is_array()) {
      for (const auto& t : *it) ok = ok || matches_type(value, t.get<std::string>());
    }
    if (!ok) {
      errors.push_back(where + ": expected type " + it->dump() + ", got " + value.type_name());
      return;
    }
  }

  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& candidate : *it) found = found || candidate == value;
    if (!found) errors.push_back(where + ": value " + value.dump() + " not in " + it->dump());
  }

  if (auto it = schema.find("anyOf"); it != schema.end()) {
    bool any = false;
    for (const auto& branch : *it) {
      std::vector<std::string> branch_errors;
      check(branch, value, path, branch_errors);
      if (branch_errors.empty()) {
        any = true;
        break;
      }
    }
    if (!any) errors.push_back(where + ": value matches none of the allowed alternatives");
  }

  if (value.is_string()) {
    if (auto it = schema.find("minLength"); it != schema.end()) {
      if (value.get_ref<const std::string&>().size() < it->get<std::size_t>()) {
        errors.push_back(where + ": string shorter than " + it->dump());
      }
    }
  }

  if (value.is_array()) {
    if (auto it = schema.find("minItems"); it != schema.end()) {
      if (value.size() < it->get<std::size_t>()) {
        errors.push_back(where + ": fewer than " + it->dump() + " items");
      }
    }
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        check(*it, value[i], path + "/" + std::to_string(i), errors);
      }
    }
  }

  if (value.is_object()) {
    const auto props = schema.find("properties");
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        if (!value.contains(key.get<std::string>())) {
          errors.push_back(where + ": missing required property \"" + key.get<std::string>() + "\"");
        }
      }
    }
    for (const auto& [key, member] : value.items()) {
      const auto member_path = path + "/" + escape_pointer(key);
      if (props != schema.end() && props->contains(key)) {
        check((*props)[key], member, member_path, errors);
      } else if (auto extra = schema.find("additionalProperties");
                 extra != schema.end() && extra->is_boolean() && !extra->get<bool>()) {
        errors.push_back(where + ": unexpected property \"" + key + "\"");
      }
    }
  }
}

const JsonSchema& intermediate_model_schema() {
  static const JsonSchema schema(json::parse(intermediate_model_schema_text()));
  return schema;
}

namespace {

// Assumes `document` already passed the schema.
UmlDiagram convert(const json& document) {
  UmlDiagram diagram;
  if (auto it = document.find("title"); it != document.end()) diagram.title = it->get<std::string>();
  for (const auto& c : document.at("classes")) {
    UmlClass cls;
    cls.name = c.at("name").get<std::string>();
    cls.is_enumeration = c.value("enumeration", false);
    cls.is_abstract = c.value("abstract", false);
    if (c.contains("stereotype")) cls.stereotype = c.at("stereotype").get<std::string>();
    for (const auto& a : c.at("attributes")) {
      UmlAttribute attr;
      if (a.is_string()) {
        attr.name = a.get<std::string>();
      } else {
        attr.name = a.at("name").get<std::string>();
        if (a.contains("type")) attr.declared_type = a.at("type").get<std::string>();
      }
      cls.attributes.push_back(std::move(attr));
    }
    diagram.classes.push_back(std::move(cls));
  }
  for (const auto& r : document.at("relationships")) {
    Relationship rel;
    rel.source = r.at("source").get<std::string>();
    rel.target = r.at("target").get<std::string>();
    rel.kind = *parse_relationship_kind(r.at("type").get<std::string>());
    auto multiplicity = [&](const char* key) -> std::optional<Multiplicity> {
      auto it = r.find(key);
      if (it == r.end() || it->is_null()) return std::nullopt;
      auto m = Multiplicity::parse(it->get<std::string>());
      if (!m) throw SchemaError(std::string(key) + " \"" + it->get<std::string>() + "\" is not a multiplicity");
      return m;
    };
    rel.source_multiplicity = multiplicity("sourceMultiplicity");
    rel.target_multiplicity = multiplicity("targetMultiplicity");
    if (r.contains("label")) rel.label = r.at("label").get<std::string>();
    diagram.relationships.push_back(std::move(rel));
  }
  return diagram;
}

}  // namespace

std::vector<std::string> check_intermediate_model(const json& document) {
  auto errors = intermediate_model_schema().validate(document);
  if (!errors.empty()) return errors;
  try {
    auto diagram = convert(document);
    for (const auto& v : validate(diagram)) errors.push_back(v.message);
  } catch (const SchemaError& e) {
    errors.emplace_back(e.what());
  }
  return errors;
}

UmlDiagram to_diagram(const IntermediateModel& model) {
  auto errors = check_intermediate_model(model.document);
  if (!errors.empty()) {
    std::string message = "intermediate model violates the schema";
    for (const auto& e : errors) message += "; " + e;
    throw SchemaError(message);
  }
  return convert(model.document);
}

IntermediateModel from_diagram(const UmlDiagram& diagram) {
  json classes = json::array();
  for (const auto& cls : diagram.classes) {
    json attributes = json::array();
    for (const auto& a : cls.attributes) {
      if (a.declared_type) {
        attributes.push_back({{"name", a.name}, {"type", *a.declared_type}});
      } else {
        attributes.push_back(a.name);
      }
    }
    json c = {{"name", cls.name}, {"attributes", std::move(attributes)}, {"enumeration", cls.is_enumeration}};
    if (cls.is_abstract) c["abstract"] = true;
    if (cls.stereotype) c["stereotype"] = *cls.stereotype;
    classes.push_back(std::move(c));
  }
  json relationships = json::array();
  for (const auto& r : diagram.relationships) {
    json rel = {{"source", r.source},
                {"target", r.target},
                {"type", std::string(to_string(r.kind))},
                {"sourceMultiplicity", r.source_multiplicity ? json(r.source_multiplicity->to_string()) : json()},
                {"targetMultiplicity", r.target_multiplicity ? json(r.target_multiplicity->to_string()) : json()}};
    if (r.label) rel["label"] = *r.label;
    relationships.push_back(std::move(rel));
  }
  json document = {{"classes", std::move(classes)}, {"relationships", std::move(relationships)}};
  if (diagram.title) document["title"] = *diagram.title;
  return {std::move(document)};
}

UmlDiagram load_diagram_file(const std::string& path) {
  const auto text = read_file(path);
  if (std::filesystem::path(path).extension() == ".json") {
    json document;
    try {
      document = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(path + ": invalid JSON: " + e.what());
    }
    return to_diagram({std::move(document)});
  }
  auto parsed = parse_plantuml(text);
  if (parsed.has_errors()) {
    std::string message = path + ": PlantUML parse failed";
    for (const auto& d : parsed.diagnostics) {
      if (d.severity == Severity::Error) message += "; line " + std::to_string(d.line) + ": " + d.message;
    }
    throw Error(message);
  }
  return parsed.diagram;
}

}  // namespace umlforge
