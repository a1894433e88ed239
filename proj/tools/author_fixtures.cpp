// Regenerates the mock-backend fixtures shipped under data/.
//
// The replies are scripted to look like chat-model output (fences, short
// preambles, surrogate keys left out, whole/part links flattened to plain
// associations) and are recorded through RecordingBackend, so the fixture
// names always match the prompts compiled into the library.
//
//   umlforge_author_fixtures <repo-root>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "umlforge/evaluator.hpp"
#include "umlforge/llm.hpp"
#include "umlforge/model_json.hpp"
#include "umlforge/pipeline.hpp"
#include "umlforge/plantuml.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace umlforge;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void reset_dir(const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".txt") fs::remove(e.path());
  }
}

std::string fenced(std::string_view lang, std::string_view body) {
  std::string out = "```" + std::string(lang) + "\n" + std::string(body);
  if (out.back() != '\n') out += '\n';
  return out + "```\n";
}

bool ends_with_id(const std::string& name) {
  return name.size() > 2 && name.compare(name.size() - 2, 2, "ID") == 0;
}

// What the scripted model "understood" from the Northwind requirements.
UmlDiagram northwind_reading(const UmlDiagram& gold) {
  UmlDiagram d;
  for (const auto& c : gold.classes) {
    UmlClass cls{.name = c.name};
    for (const auto& a : c.attributes) {
      if (!ends_with_id(a.name)) cls.attributes.push_back({.name = a.name});
    }
    d.classes.push_back(std::move(cls));
  }
  for (auto r : gold.relationships) {
    if (r.kind == RelationshipKind::Aggregation) r.kind = RelationshipKind::Association;
    r.label.reset();
    d.relationships.push_back(std::move(r));
  }
  return d;
}

std::string concept_reply(const UmlDiagram& d) {
  json entities = json::array();
  for (const auto& c : d.classes) {
    json attrs = json::array();
    for (const auto& a : c.attributes) attrs.push_back(a.name);
    entities.push_back({{"name", c.name}, {"attributes", attrs}});
  }
  return "Here are the domain classes identified in the requirements:\n\n" + fenced("json", entities.dump(2));
}

std::string relationship_reply(const UmlDiagram& d) {
  json rels = json::array();
  for (const auto& r : d.relationships) {
    rels.push_back({{"source", r.source},
                    {"target", r.target},
                    {"type", std::string(to_string(r.kind))},
                    {"sourceMultiplicity", r.source_multiplicity ? json(r.source_multiplicity->to_string()) : json()},
                    {"targetMultiplicity", r.target_multiplicity ? json(r.target_multiplicity->to_string()) : json()}});
  }
  return fenced("json", rels.dump(2));
}

std::string model_reply(const UmlDiagram& d) { return fenced("json", from_diagram(d).document.dump(2)); }

std::string plantuml_reply(const UmlDiagram& d) { return fenced("plantuml", emit_plantuml(d)); }

// Replies keyed by stage; the validator reply may look at the request.
ScriptedBackend scripted(std::string concepts, std::string relationships, std::string model, std::string plantuml,
                         std::function<std::string(const LlmRequest&)> validator) {
  return ScriptedBackend([=](const LlmRequest& r) -> std::string {
    if (r.stage == kConceptExtractor) return concepts;
    if (r.stage == kRelationshipComprehender) return relationships;
    if (r.stage == kModelIntegrator) return model;
    if (r.stage == kCodeArticulator) return plantuml;
    if (r.stage == kValidator) return validator(r);
    throw std::runtime_error("unexpected stage " + r.stage);
  });
}

// The diagram text the validator was asked to review.
std::string reviewed_diagram(const LlmRequest& r) { return extract_plantuml(r.user_prompt.substr(r.user_prompt.find("Diagram:"))); }

PipelineResult record(LlmBackend& scripted_backend, const fs::path& dir, const std::string& requirements) {
  reset_dir(dir);
  RecordingBackend recorder(scripted_backend, dir);
  return run_pipeline(requirements, recorder, true);
}

void author_northwind(const fs::path& root) {
  const auto base = root / "data" / "northwind";
  const auto gold = parse_plantuml(slurp(base / "gold.puml")).diagram;
  const auto requirements = slurp(base / "requirements.txt");
  const auto reading = northwind_reading(gold);

  auto backend = scripted(concept_reply(reading), relationship_reply(reading), model_reply(reading),
                          plantuml_reply(reading),
                          [](const LlmRequest& r) { return fenced("plantuml", reviewed_diagram(r)); });
  const auto result = record(backend, base / "mock", requirements);
  std::cout << "northwind: " << result.final_diagram().classes.size() << " classes\n";
}

void author_customer_order(const fs::path& root) {
  const auto base = root / "data" / "customer_order";
  const auto requirements = slurp(base / "requirements.txt");

  const std::string concepts = R"([
  {"name": "Customer", "attributes": ["name", "city"]},
  {"name": "Order", "attributes": ["orderDate"]}
])";
  const std::string relationships =
      R"(Relationships found:
[{"source": "Customer", "target": "Order", "type": "association", "sourceMultiplicity": "1", "targetMultiplicity": "0..*"}])";
  const std::string model = R"({
  "classes": [
    {"name": "Customer", "attributes": ["name", "city"], "enumeration": false},
    {"name": "Order", "attributes": ["orderDate"], "enumeration": false}
  ],
  "relationships": [
    {"source": "Customer", "target": "Order", "type": "association", "sourceMultiplicity": "1", "targetMultiplicity": "0..*"}
  ]
})";
  const std::string plantuml = R"(```plantuml
@startuml
class Customer {
  name
  city
}
class Order {
  orderDate
}
Customer "1" -- "0..*" Order
@enduml
```
)";

  auto verbatim = scripted(concepts, relationships, model, plantuml,
                           [](const LlmRequest& r) { return reviewed_diagram(r); });
  record(verbatim, base / "mock_verbatim", requirements);

  auto inject = scripted(concepts, relationships, model, plantuml, [](const LlmRequest& r) {
    auto text = reviewed_diagram(r);
    const auto at = text.find("  city\n");
    return "The requirements also mention a phone number for customers.\n\n" +
           fenced("plantuml", text.insert(at + 7, "  phone\n"));
  });
  record(inject, base / "mock_inject", requirements);
  std::cout << "customer_order: fixtures written\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: umlforge_author_fixtures <repo-root>\n";
    return 2;
  }
  try {
    author_northwind(argv[1]);
    author_customer_order(argv[1]);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
