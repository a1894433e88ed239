#include "umlforge/pipeline.hpp"

#include <functional>
#include <set>
#include <stdexcept>

#include "umlforge/errors.hpp"
#include "umlforge/plantuml.hpp"

namespace umlforge {

using nlohmann::json;

namespace {

bool is_blank(std::string_view text) {
  return text.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::optional<json> try_parse(std::string_view text) {
  auto value = json::parse(text.begin(), text.end(), nullptr, false);
  if (value.is_discarded()) return std::nullopt;
  return value;
}

// Contents of every ``` fenced block, in order.
std::vector<std::string_view> fenced_blocks(std::string_view text) {
  std::vector<std::string_view> blocks;
  std::size_t pos = 0;
  while (true) {
    const auto open = text.find("```", pos);
    if (open == std::string_view::npos) break;
    const auto body = text.find('\n', open);
    if (body == std::string_view::npos) break;
    const auto close = text.find("```", body);
    if (close == std::string_view::npos) break;
    blocks.push_back(text.substr(body + 1, close - body - 1));
    pos = close + 3;
  }
  return blocks;
}

std::optional<json> scan_for_json(std::string_view text) {
  if (auto whole = try_parse(trim(text))) return whole;
  // Whichever bracket opens first is the outermost value.
  const bool array_first = text.find('[') < text.find('{');
  for (char opener : array_first ? std::string_view("[{") : std::string_view("{[")) {
    const char closer = opener == '[' ? ']' : '}';
    const auto first = text.find(opener);
    const auto last = text.rfind(closer);
    if (first == std::string_view::npos || last == std::string_view::npos || last < first) continue;
    if (auto value = try_parse(text.substr(first, last - first + 1))) return value;
  }
  return std::nullopt;
}

// One stage's view of the backend: builds requests from the stage template and
// records every exchange in the stage's transcript entry.
class StageCall {
 public:
  StageCall(std::string_view stage, LlmBackend& backend, StageContext& ctx)
      : stage_(stage), backend_(backend), ctx_(ctx), template_(ctx.prompts.at(stage)), index_(ctx.transcript.size()) {
    ctx_.transcript.push_back({std::string(stage), {}, {}});
  }

  TranscriptEntry& entry() { return ctx_.transcript[index_]; }
  void note(std::string message) { entry().notes.push_back(std::move(message)); }

  std::string ask(const std::map<std::string, std::string>& values) {
    return send(render_prompt(template_.user, values), values);
  }

  /// Asks once; if `accept` throws FormatError or SchemaError, re-prompts once
  /// with the repair section and lets a second failure propagate.
  template <typename T>
  T ask_with_repair(const std::map<std::string, std::string>& values, const std::function<T(const std::string&)>& accept) {
    const auto user = render_prompt(template_.user, values);
    auto reply = send(user, values);
    try {
      return accept(reply);
    } catch (const FormatError& e) {
      note(std::string("repair prompt issued: ") + e.what());
      return accept(repair(user, values, e.what(), reply));
    } catch (const SchemaError& e) {
      note(std::string("repair prompt issued: ") + e.what());
      return accept(repair(user, values, e.what(), reply));
    }
  }

 private:
  std::string send(const std::string& user, const std::map<std::string, std::string>& values) {
    LlmRequest request{std::string(stage_), render_prompt(template_.system, values), user,
                       ctx_.options.temperature, ctx_.options.max_tokens};
    request.check();
    auto response = backend_.complete(request);
    entry().exchanges.push_back({std::move(request), response});
    return response;
  }

  std::string repair(const std::string& user, std::map<std::string, std::string> values, const std::string& error,
                     const std::string& previous) {
    values["error"] = error;
    values["previous"] = previous;
    const auto reminder = template_.repair.empty() ? "Your previous reply could not be used: " + error
                                                   : render_prompt(template_.repair, values);
    return send(user + "\n\n" + reminder, values);
  }

  std::string_view stage_;
  LlmBackend& backend_;
  StageContext& ctx_;
  const PromptTemplate& template_;
  std::size_t index_;
};

const json& unwrap_list(const json& value, std::initializer_list<const char*> keys) {
  if (value.is_array()) return value;
  if (value.is_object()) {
    for (const char* key : keys) {
      if (auto it = value.find(key); it != value.end() && it->is_array()) return *it;
    }
  }
  throw FormatError("expected a JSON array");
}

std::string string_field(const json& object, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    if (auto it = object.find(key); it != object.end() && it->is_string()) return it->get<std::string>();
  }
  return {};
}

ConceptSet parse_concepts(const std::string& reply) {
  const auto document = extract_json(reply);
  const auto& items = unwrap_list(document, {"entities", "classes", "concepts"});
  ConceptSet concepts;
  std::map<std::string, std::size_t> by_name;
  for (const auto& item : items) {
    Entity entity;
    if (item.is_string()) {
      entity.name = item.get<std::string>();
    } else if (item.is_object()) {
      entity.name = string_field(item, {"name", "class", "entity"});
      if (auto it = item.find("attributes"); it != item.end()) {
        if (!it->is_array()) throw FormatError("attributes of \"" + entity.name + "\" must be an array");
        for (const auto& a : *it) {
          std::string name = a.is_string() ? a.get<std::string>() : a.is_object() ? string_field(a, {"name"}) : "";
          if (is_blank(name)) throw FormatError("attribute of \"" + entity.name + "\" has no name");
          entity.attributes.push_back(std::string(trim(name)));
        }
      }
    } else {
      throw FormatError("entity entries must be objects");
    }
    entity.name = std::string(trim(entity.name));
    if (entity.name.empty()) throw FormatError("entity without a name");

    const auto key = normalize_name(entity.name);
    if (auto found = by_name.find(key); found != by_name.end()) {
      auto& existing = concepts.entities[found->second];
      std::set<std::string> known;
      for (const auto& a : existing.attributes) known.insert(normalize_name(a));
      for (auto& a : entity.attributes) {
        if (known.insert(normalize_name(a)).second) existing.attributes.push_back(std::move(a));
      }
      continue;
    }
    // Drop repeated attributes within one entity.
    std::set<std::string> seen;
    std::vector<std::string> unique;
    for (auto& a : entity.attributes) {
      if (seen.insert(normalize_name(a)).second) unique.push_back(std::move(a));
    }
    entity.attributes = std::move(unique);
    by_name.emplace(key, concepts.entities.size());
    concepts.entities.push_back(std::move(entity));
  }
  if (concepts.entities.empty()) throw FormatError("no entities in reply");
  return concepts;
}

std::optional<Multiplicity> multiplicity_field(const json& object, const char* key) {
  auto it = object.find(key);
  if (it == object.end() || it->is_null()) return std::nullopt;
  std::string text;
  if (it->is_string()) {
    text = it->get<std::string>();
  } else if (it->is_number_unsigned() || it->is_number_integer()) {
    text = it->dump();
  } else {
    throw FormatError(std::string(key) + " must be a string or null");
  }
  if (is_blank(text)) return std::nullopt;
  auto m = Multiplicity::parse(trim(text));
  if (!m) throw FormatError(std::string(key) + " \"" + text + "\" is not a multiplicity");
  return m;
}

struct ParsedRelations {
  RelationshipSet relations;
  std::vector<std::string> notes;
};

ParsedRelations parse_relations(const std::string& reply, const ConceptSet& concepts) {
  const auto document = extract_json(reply);
  const auto& items = unwrap_list(document, {"relationships", "relations"});
  std::map<std::string, std::string> spelling;
  for (const auto& e : concepts.entities) spelling.emplace(normalize_name(e.name), e.name);

  ParsedRelations out;
  for (const auto& item : items) {
    if (!item.is_object()) throw FormatError("relationship entries must be objects");
    RelationSpec spec;
    spec.source = string_field(item, {"source", "from"});
    spec.target = string_field(item, {"target", "to"});
    if (is_blank(spec.source) || is_blank(spec.target)) throw FormatError("relationship without source or target");
    const auto type = string_field(item, {"type", "kind"});
    if (type.empty()) {
      spec.kind = RelationshipKind::Association;
    } else if (auto kind = parse_relationship_kind(type)) {
      spec.kind = *kind;
    } else {
      throw FormatError("unknown relationship type \"" + type + "\"");
    }
    spec.source_multiplicity = multiplicity_field(item, "sourceMultiplicity");
    spec.target_multiplicity = multiplicity_field(item, "targetMultiplicity");

    auto source = spelling.find(normalize_name(spec.source));
    auto target = spelling.find(normalize_name(spec.target));
    if (source == spelling.end() || target == spelling.end()) {
      const auto& unknown = source == spelling.end() ? spec.source : spec.target;
      out.notes.push_back("dropped relationship " + spec.source + " -> " + spec.target + ": unknown entity \"" +
                          unknown + "\"");
      continue;
    }
    spec.source = source->second;
    spec.target = target->second;
    if (spec.kind == RelationshipKind::Generalization && (spec.source_multiplicity || spec.target_multiplicity)) {
      out.notes.push_back("ignored multiplicities on generalization " + spec.source + " -> " + spec.target);
      spec.source_multiplicity.reset();
      spec.target_multiplicity.reset();
    }
    out.relations.relations.push_back(std::move(spec));
  }
  return out;
}

IntermediateModel parse_model(const std::string& reply) {
  auto document = extract_json(reply);
  if (!document.is_object()) throw FormatError("expected a JSON object");
  const auto errors = check_intermediate_model(document);
  if (!errors.empty()) {
    std::string message;
    for (const auto& e : errors) message += (message.empty() ? "" : "\n") + e;
    throw SchemaError(message);
  }
  return {std::move(document)};
}

// Accepts a reply only if it is a structurally valid diagram with content.
std::optional<std::string> usable_plantuml(const std::string& reply, std::string& why) {
  auto text = extract_plantuml(reply);
  auto parsed = parse_plantuml(text);
  if (parsed.has_errors()) {
    for (const auto& d : parsed.diagnostics) {
      if (d.severity == Severity::Error) {
        why = "line " + std::to_string(d.line) + ": " + d.message;
        break;
      }
    }
    return std::nullopt;
  }
  if (auto violations = validate(parsed.diagram); !violations.empty()) {
    why = violations.front().message;
    return std::nullopt;
  }
  if (parsed.diagram.classes.empty()) {
    why = "no classes";
    return std::nullopt;
  }
  if (text.empty() || text.back() != '\n') text += '\n';
  return text;
}

json request_json(const LlmRequest& r) {
  return {{"stage", r.stage},
          {"system_prompt", r.system_prompt},
          {"user_prompt", r.user_prompt},
          {"temperature", r.temperature},
          {"max_tokens", r.max_tokens}};
}

}  // namespace

json extract_json(std::string_view reply) {
  for (auto block : fenced_blocks(reply)) {
    if (auto value = scan_for_json(block)) return *value;
  }
  if (auto value = scan_for_json(reply)) return *value;
  throw FormatError("reply contains no JSON value");
}

json ConceptSet::to_json() const {
  json out = json::array();
  for (const auto& e : entities) out.push_back({{"name", e.name}, {"attributes", e.attributes}});
  return out;
}

json RelationshipSet::to_json() const {
  json out = json::array();
  for (const auto& r : relations) {
    out.push_back({{"source", r.source},
                   {"target", r.target},
                   {"type", std::string(to_string(r.kind))},
                   {"sourceMultiplicity", r.source_multiplicity ? json(r.source_multiplicity->to_string()) : json()},
                   {"targetMultiplicity", r.target_multiplicity ? json(r.target_multiplicity->to_string()) : json()}});
  }
  return out;
}

ConceptSet extract_concepts(std::string_view requirements, LlmBackend& backend, StageContext& ctx) {
  if (is_blank(requirements)) throw std::invalid_argument("requirements text is empty");
  StageCall call(kConceptExtractor, backend, ctx);
  return call.ask_with_repair<ConceptSet>({{"requirements", std::string(requirements)}}, parse_concepts);
}

RelationshipSet comprehend_relationships(const ConceptSet& concepts, std::string_view requirements,
                                         LlmBackend& backend, StageContext& ctx) {
  if (concepts.entities.empty()) throw std::invalid_argument("concept set is empty");
  StageCall call(kRelationshipComprehender, backend, ctx);
  auto parsed = call.ask_with_repair<ParsedRelations>(
      {{"requirements", std::string(requirements)}, {"concepts", concepts.to_json().dump(2)}},
      [&](const std::string& reply) { return parse_relations(reply, concepts); });
  for (auto& n : parsed.notes) call.note(std::move(n));
  return std::move(parsed.relations);
}

IntermediateModel integrate_model(const ConceptSet& concepts, const RelationshipSet& relationships,
                                  LlmBackend& backend, StageContext& ctx) {
  if (concepts.entities.empty()) throw std::invalid_argument("concept set is empty");
  StageCall call(kModelIntegrator, backend, ctx);
  return call.ask_with_repair<IntermediateModel>({{"concepts", concepts.to_json().dump(2)},
                                                  {"relationships", relationships.to_json().dump(2)},
                                                  {"schema", std::string(intermediate_model_schema_text())}},
                                                 parse_model);
}

std::string articulate_code(const IntermediateModel& model, LlmBackend& backend, StageContext& ctx) {
  const auto diagram = to_diagram(model);
  StageCall call(kCodeArticulator, backend, ctx);
  const auto reply = call.ask({{"model", model.document.dump(2)}});
  std::string why;
  if (auto text = usable_plantuml(reply, why)) return *text;
  call.note("articulator output rejected (" + why + "); using deterministic emitter");
  return emit_plantuml(diagram);
}

std::string verify(std::string_view plantuml, std::string_view requirements, LlmBackend& backend,
                   StageContext& ctx) {
  if (parse_plantuml(plantuml).has_errors()) throw std::invalid_argument("diagram to verify does not parse");
  StageCall call(kValidator, backend, ctx);
  const auto reply = call.ask({{"requirements", std::string(requirements)}, {"plantuml", std::string(plantuml)}});
  std::string why;
  if (auto text = usable_plantuml(reply, why)) return *text;
  call.note("validator output rejected (" + why + "); keeping the input diagram");
  return std::string(plantuml);
}

UmlDiagram PipelineResult::final_diagram() const { return parse_plantuml(final_plantuml()).diagram; }

json PipelineResult::transcript_json() const {
  json out = json::array();
  for (const auto& entry : transcript) {
    json exchanges = json::array();
    for (const auto& x : entry.exchanges) {
      exchanges.push_back({{"request", request_json(x.request)}, {"response", x.response}});
    }
    out.push_back({{"stage", entry.stage}, {"exchanges", std::move(exchanges)}, {"notes", entry.notes}});
  }
  return out;
}

json PipelineResult::to_json() const {
  return {{"concepts", concepts.to_json()},
          {"relationships", relationships.to_json()},
          {"model", model.document},
          {"plantuml", plantuml},
          {"verified_plantuml", verified_plantuml ? json(*verified_plantuml) : json()},
          {"transcript", transcript_json()}};
}

PipelineResult run_pipeline(std::string_view requirements, LlmBackend& backend, bool verify_enabled,
                            const PipelineOptions& options) {
  if (is_blank(requirements)) throw std::invalid_argument("requirements text is empty");
  const PromptSet defaults = options.prompts ? PromptSet{} : PromptSet::defaults();
  const PromptSet& prompts = options.prompts ? *options.prompts : defaults;

  PipelineResult result;
  StageContext ctx{prompts, options.generation, result.transcript};
  auto run = [](std::string_view stage, auto&& body) {
    try {
      return body();
    } catch (const std::exception& e) {
      throw StageError(std::string(stage), e.what());
    }
  };

  result.concepts = run(kConceptExtractor, [&] { return extract_concepts(requirements, backend, ctx); });
  result.relationships = run(kRelationshipComprehender,
                             [&] { return comprehend_relationships(result.concepts, requirements, backend, ctx); });
  result.model =
      run(kModelIntegrator, [&] { return integrate_model(result.concepts, result.relationships, backend, ctx); });
  result.plantuml = run(kCodeArticulator, [&] { return articulate_code(result.model, backend, ctx); });
  if (verify_enabled) {
    result.verified_plantuml = run(kValidator, [&] { return verify(result.plantuml, requirements, backend, ctx); });
  }
  return result;
}

}  // namespace umlforge
