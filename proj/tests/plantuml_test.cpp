#include <gtest/gtest.h>

#include <filesystem>

#include "support/generators.hpp"
#include "umlforge/errors.hpp"
#include "umlforge/model_json.hpp"
#include "umlforge/plantuml.hpp"

using namespace umlforge;
using namespace umlforge::testing;

namespace {

bool has_warning(const PlantUmlParse& p, std::string_view needle) {
  for (const auto& d : p.diagnostics) {
    if (d.severity == Severity::Warning && d.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

const Relationship& only_relationship(const PlantUmlParse& p) {
  EXPECT_EQ(p.diagram.relationships.size(), 1u);
  return p.diagram.relationships.front();
}

}  // namespace

TEST(ParsePlantUml, EmptyInputWarnsAboutFences) {
  const auto p = parse_plantuml("");
  EXPECT_TRUE(p.diagram.classes.empty());
  EXPECT_TRUE(p.diagram.relationships.empty());
  EXPECT_FALSE(p.has_errors());
  EXPECT_TRUE(has_warning(p, "@startuml"));
}

TEST(ParsePlantUml, GeneralizationExample) {
  const auto p = parse_plantuml("class A\nclass B\nA --|> B");
  ASSERT_EQ(p.diagram.classes.size(), 2u);
  const auto& r = only_relationship(p);
  EXPECT_EQ(r.kind, RelationshipKind::Generalization);
  EXPECT_EQ(r.source, "A");
  EXPECT_EQ(r.target, "B");
}

TEST(ParsePlantUml, AssociationWithMultiplicitiesExample) {
  const auto p = parse_plantuml("class Order { +orderDate }\nCustomer \"1\" -- \"0..*\" Order");
  EXPECT_FALSE(p.has_errors());
  const auto* order = p.diagram.find_class("Order");
  ASSERT_NE(order, nullptr);
  ASSERT_EQ(order->attributes.size(), 1u);
  EXPECT_EQ(order->attributes[0].name, "orderDate");
  EXPECT_EQ(order->attributes[0].visibility, '+');
  const auto& r = only_relationship(p);
  EXPECT_EQ(r.kind, RelationshipKind::Association);
  EXPECT_EQ(r.source, "Customer");
  EXPECT_EQ(r.source_multiplicity, Multiplicity::exactly(1));
  EXPECT_EQ(r.target_multiplicity, Multiplicity::at_least(0));
  // Customer only appears in the relationship.
  EXPECT_NE(p.diagram.find_class("Customer"), nullptr);
  EXPECT_TRUE(validate(p.diagram).empty());
}

TEST(ParsePlantUml, ArrowTable) {
  struct Case {
    const char* arrow;
    RelationshipKind kind;
    const char* source;
  };
  const Case cases[] = {
      {"--|>", RelationshipKind::Generalization, "A"}, {"<|--", RelationshipKind::Generalization, "B"},
      {"*--", RelationshipKind::Composition, "A"},     {"--*", RelationshipKind::Composition, "B"},
      {"o--", RelationshipKind::Aggregation, "A"},     {"--o", RelationshipKind::Aggregation, "B"},
      {"--", RelationshipKind::Association, "A"},      {"-->", RelationshipKind::Association, "A"},
      {"<--", RelationshipKind::Association, "B"},     {"..|>", RelationshipKind::Generalization, "A"},
  };
  for (const auto& c : cases) {
    const auto p = parse_plantuml(std::string("@startuml\nclass A\nclass B\nA ") + c.arrow + " B\n@enduml\n");
    SCOPED_TRACE(c.arrow);
    ASSERT_EQ(p.diagram.relationships.size(), 1u);
    const auto& r = p.diagram.relationships[0];
    EXPECT_EQ(r.kind, c.kind);
    EXPECT_EQ(r.source, c.source);
    EXPECT_EQ(r.target, std::string(c.source) == "A" ? "B" : "A");
  }
}

TEST(ParsePlantUml, LabelsAndStereotypes) {
  const auto p = parse_plantuml(
      "@startuml\n"
      "title Shop\n"
      "abstract class Party <<entity>> {\n"
      "  -name : String\n"
      "  +rename(to : String) : void\n"
      "}\n"
      "enum Status {\n  OPEN\n  CLOSED\n}\n"
      "Party \"1\" -- \"*\" Status : has >\n"
      "@enduml\n");
  EXPECT_FALSE(p.has_errors());
  EXPECT_EQ(p.diagram.title, "Shop");
  const auto* party = p.diagram.find_class("party");
  ASSERT_NE(party, nullptr);
  EXPECT_TRUE(party->is_abstract);
  EXPECT_EQ(party->stereotype, "entity");
  ASSERT_EQ(party->attributes.size(), 1u);
  EXPECT_EQ(party->attributes[0].declared_type, "String");
  EXPECT_EQ(party->attributes[0].visibility, '-');
  ASSERT_EQ(party->operations.size(), 1u);
  const auto* status = p.diagram.find_class("Status");
  ASSERT_NE(status, nullptr);
  EXPECT_TRUE(status->is_enumeration);
  EXPECT_EQ(status->attributes.size(), 2u);
  const auto& r = only_relationship(p);
  EXPECT_EQ(r.target_multiplicity, Multiplicity::at_least(0));
  ASSERT_TRUE(r.label);
  EXPECT_NE(r.label->find("has"), std::string::npos);
}

TEST(ParsePlantUml, TypesWithParenthesesAreAttributes) {
  const auto p = parse_plantuml(
      "class Company {\n  CompanyName : VARCHAR(50)\n  Price : DECIMAL(19, 4)\n  total()\n  compute(x) : int\n}\n");
  const auto* c = p.diagram.find_class("Company");
  ASSERT_NE(c, nullptr);
  ASSERT_EQ(c->attributes.size(), 2u);
  EXPECT_EQ(c->attributes[0].declared_type, "VARCHAR(50)");
  EXPECT_EQ(c->operations.size(), 2u);
}

TEST(ParsePlantUml, UnknownLinesWarnButDoNotAbort) {
  const auto p = parse_plantuml("@startuml\nskinparam monochrome true\nthis is not uml\nclass A\n@enduml\n");
  EXPECT_FALSE(p.has_errors());
  EXPECT_EQ(p.diagram.classes.size(), 1u);
  EXPECT_FALSE(p.diagnostics.empty());
}

TEST(ParsePlantUml, UnbalancedBracesAreErrors) {
  EXPECT_TRUE(parse_plantuml("@startuml\nclass A {\n  x\n@enduml\n").has_errors());
  EXPECT_TRUE(parse_plantuml("@startuml\nclass A\n}\n@enduml\n").has_errors());
  EXPECT_FALSE(parse_plantuml("@startuml\nclass A {\n}\n@enduml\n").has_errors());
}

TEST(ParsePlantUml, GeneralizationMultiplicityDropped) {
  const auto p = parse_plantuml("class A\nclass B\nA \"1\" --|> \"*\" B\n");
  const auto& r = only_relationship(p);
  EXPECT_FALSE(r.source_multiplicity);
  EXPECT_FALSE(r.target_multiplicity);
  EXPECT_TRUE(validate(p.diagram).empty());
}

TEST(ParsePlantUml, CrLfLineEndings) {
  const auto a = parse_plantuml("@startuml\r\nclass A {\r\n  x\r\n}\r\nA -- B\r\n@enduml\r\n");
  const auto b = parse_plantuml("@startuml\nclass A {\n  x\n}\nA -- B\n@enduml\n");
  EXPECT_EQ(a.diagram, b.diagram);
}

TEST(EmitPlantUml, EmptyDiagram) { EXPECT_EQ(emit_plantuml(UmlDiagram{}), "@startuml\n@enduml\n"); }

TEST(EmitPlantUml, SingleClass) {
  UmlDiagram d;
  d.classes = {{.name = "A"}};
  EXPECT_EQ(emit_plantuml(d), "@startuml\nclass A {\n}\n@enduml\n");
}

TEST(EmitPlantUml, CanonicalOrder) {
  UmlDiagram d;
  d.classes = {{.name = "Order", .attributes = {{.name = "date"}}}, {.name = "Customer"}};
  d.relationships = {{.source = "Customer",
                      .target = "Order",
                      .source_multiplicity = Multiplicity::exactly(1),
                      .target_multiplicity = Multiplicity::at_least(0)}};
  EXPECT_EQ(emit_plantuml(d),
            "@startuml\n"
            "class Customer {\n}\n"
            "class Order {\n  date\n}\n"
            "Customer \"1..1\" -- \"0..*\" Order\n"
            "@enduml\n");
}

TEST(EmitPlantUml, RejectsInvalidDiagrams) {
  UmlDiagram d;
  d.relationships = {{.source = "A", .target = "B"}};
  EXPECT_THROW(emit_plantuml(d), ValidationError);
}

TEST(EmitPlantUml, ThreeClassRoundTrip) {
  UmlDiagram d;
  d.classes = {{.name = "Customer", .attributes = {{.name = "name"}, {.name = "city"}}},
               {.name = "Order", .attributes = {{.name = "orderDate", .declared_type = "Date"}}},
               {.name = "Line Item", .attributes = {{.name = "unit price", .visibility = '+'}}}};
  d.relationships = {
      {.source = "Customer", .target = "Order", .source_multiplicity = Multiplicity::exactly(1),
       .target_multiplicity = Multiplicity::at_least(0), .label = "places"},
      {.source = "Order", .target = "Line Item", .kind = RelationshipKind::Composition},
  };
  const auto p = parse_plantuml(emit_plantuml(d));
  EXPECT_TRUE(p.diagnostics.empty());
  EXPECT_TRUE(equivalent(p.diagram, d));
}

TEST(EmitPlantUml, RoundTripProperty) {
  Rng rng(101);
  for (int i = 0; i < 3000; ++i) {
    const auto d = random_diagram(rng, {.spelling_variants = coin(rng)});
    if (!validate(d).empty()) continue;  // spelling variants can collide
    const auto text = emit_plantuml(d);
    const auto p = parse_plantuml(text);
    ASSERT_FALSE(p.has_errors()) << text;
    ASSERT_TRUE(equivalent(p.diagram, d)) << text << "\nreparsed:\n" << from_diagram(p.diagram).document.dump() << "\noriginal:\n" << from_diagram(d).document.dump();
    // Emission is a fixpoint after one round.
    ASSERT_EQ(emit_plantuml(p.diagram), text);
  }
}

TEST(EmitPlantUml, Deterministic) {
  Rng rng(102);
  for (int i = 0; i < 200; ++i) {
    auto d = random_diagram(rng);
    const auto first = emit_plantuml(d);
    std::shuffle(d.classes.begin(), d.classes.end(), rng);
    std::shuffle(d.relationships.begin(), d.relationships.end(), rng);
    ASSERT_EQ(emit_plantuml(d), first);
  }
}

TEST(ParsePlantUml, FuzzNeverThrows) {
  Rng rng(103);
  for (int i = 0; i < 10000; ++i) {
    const auto text = random_plantuml_text(rng);
    PlantUmlParse p;
    ASSERT_NO_THROW(p = parse_plantuml(text)) << text;
    for (const auto& d : p.diagnostics) ASSERT_GE(d.line, 1);
  }
}

TEST(ParsePlantUml, ShippedFixturesRoundTrip) {
  const std::filesystem::path data = std::filesystem::path(UMLFORGE_SOURCE_DIR) / "data";
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(data)) {
    if (entry.path().extension() != ".puml") continue;
    ++seen;
    const auto d = load_diagram_file(entry.path().string());
    ASSERT_TRUE(validate(d).empty()) << entry.path();
    ASSERT_TRUE(equivalent(parse_plantuml(emit_plantuml(d)).diagram, d)) << entry.path();
  }
  EXPECT_GE(seen, 2u);
}

TEST(ExtractPlantUml, FencesAndSpans) {
  EXPECT_EQ(extract_plantuml("Here:\n```plantuml\n@startuml\nclass A\n@enduml\n```\nDone."),
            "@startuml\nclass A\n@enduml\n");
  EXPECT_EQ(extract_plantuml("Sure! @startuml\nclass A\n@enduml\nThanks"), "@startuml\nclass A\n@enduml\n");
  EXPECT_EQ(extract_plantuml("class A"), "class A");
  EXPECT_EQ(extract_plantuml("```\nclass A\n"), "class A\n");
}
