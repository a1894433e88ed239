#include <gtest/gtest.h>

#include <algorithm>
#include <cctype>

#include "support/generators.hpp"
#include "umlforge/errors.hpp"
#include "umlforge/uml.hpp"

using namespace umlforge;
using namespace umlforge::testing;

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

// Independent word list: plural -> singular as any English dictionary gives it.
const std::vector<std::pair<std::string, std::string>>& dictionary_pairs() {
  static const std::vector<std::pair<std::string, std::string>> pairs = {
      {"customers", "customer"}, {"orders", "order"},       {"categories", "category"}, {"companies", "company"},
      {"addresses", "address"},  {"boxes", "box"},          {"branches", "branch"},     {"dishes", "dish"},
      {"buzzes", "buzz"},        {"employees", "employee"}, {"children", "child"},      {"people", "person"},
      {"statuses", "status"},    {"analyses", "analysis"},  {"indices", "index"},       {"shelves", "shelf"},
      {"movies", "movie"},       {"privileges", "privilege"}, {"invoices", "invoice"}, {"classes", "class"},
      {"products", "product"},   {"details", "detail"},     {"settings", "setting"},   {"titles", "title"},
      {"states", "state"},       {"vendors", "vendor"},     {"takes", "take"},         {"types", "type"},
  };
  return pairs;
}

UmlDiagram two_classes() {
  UmlDiagram d;
  d.classes = {{.name = "Customer", .attributes = {{.name = "name"}, {.name = "city"}}}, {.name = "Order"}};
  d.relationships = {{.source = "Customer",
                      .target = "Order",
                      .kind = RelationshipKind::Association,
                      .source_multiplicity = Multiplicity::exactly(1),
                      .target_multiplicity = Multiplicity::at_least(0)}};
  return d;
}

}  // namespace

TEST(NormalizeName, SpecExamples) {
  EXPECT_EQ(normalize_name("customer"), "customer");
  EXPECT_EQ(normalize_name("Order_Details"), "order detail");
  EXPECT_EQ(normalize_name("Categories"), "category");
}

TEST(NormalizeName, TotalOnEdgeInputs) {
  EXPECT_EQ(normalize_name(""), "");
  EXPECT_EQ(normalize_name("   "), "");
  EXPECT_EQ(normalize_name("__--__"), "");
  EXPECT_EQ(normalize_name("  Purchase   Order-Lines "), "purchase order line");
  EXPECT_EQ(normalize_name("ORDER\tDETAILS"), "order detail");
  EXPECT_EQ(normalize_name("s"), "s");
  EXPECT_EQ(normalize_name("is"), "is");
}

TEST(NormalizeName, OnlyLastWordIsSingularized) {
  EXPECT_EQ(normalize_name("sales orders"), "sales order");
  EXPECT_EQ(normalize_name("news items"), "news item");
}

TEST(NormalizeName, AgreesWithDictionary) {
  for (const auto& [plural, singular] : dictionary_pairs()) {
    EXPECT_EQ(normalize_name(plural), singular) << plural;
    EXPECT_EQ(normalize_name(singular), singular) << singular;
  }
}

TEST(Singularize, RuleTable) {
  EXPECT_EQ(singularize("cities"), "city");
  EXPECT_EQ(singularize("ies"), "ie");  // too short for the -ies rule, plain -s applies
  EXPECT_EQ(singularize("glasses"), "glass");
  EXPECT_EQ(singularize("taxes"), "tax");
  EXPECT_EQ(singularize("class"), "class");
  EXPECT_EQ(singularize("bus"), "bus");
  EXPECT_EQ(singularize("basis"), "basis");
  EXPECT_EQ(singularize("series"), "series");
  EXPECT_EQ(singularize("cars"), "car");
  EXPECT_EQ(singularize("as"), "as");
}

TEST(NormalizeName, IdempotentOnRandomStrings) {
  Rng rng(11);
  const std::string alphabet = "abcdeisuxyzhA_- \t";
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    const auto n = pick(rng, 14);
    for (std::size_t k = 0; k < n; ++k) s.push_back(alphabet[pick(rng, alphabet.size())]);
    const auto once = normalize_name(s);
    ASSERT_EQ(normalize_name(once), once) << "input: '" << s << "'";
  }
}

TEST(NormalizeName, CaseInsensitiveOnRandomStrings) {
  Rng rng(12);
  const std::string alphabet = "abcdeHIJsuxyz_- ";
  for (int i = 0; i < 20000; ++i) {
    std::string s;
    const auto n = pick(rng, 14);
    for (std::size_t k = 0; k < n; ++k) s.push_back(alphabet[pick(rng, alphabet.size())]);
    ASSERT_EQ(normalize_name(s), normalize_name(upper(s))) << "input: '" << s << "'";
  }
}

TEST(NormalizeName, IdempotentOnDictionaryWords) {
  for (const auto& [plural, singular] : dictionary_pairs()) {
    for (const auto& w : {plural, singular, upper(plural)}) {
      EXPECT_EQ(normalize_name(normalize_name(w)), normalize_name(w));
    }
  }
}

TEST(Multiplicity, ParseAndPrint) {
  EXPECT_EQ(Multiplicity::parse("1"), Multiplicity::exactly(1));
  EXPECT_EQ(Multiplicity::parse("*"), Multiplicity::at_least(0));
  EXPECT_EQ(Multiplicity::parse("many"), Multiplicity::at_least(0));
  EXPECT_EQ(Multiplicity::parse("0..1"), Multiplicity::range(0, 1));
  EXPECT_EQ(Multiplicity::parse("1..*"), Multiplicity::at_least(1));
  EXPECT_EQ(Multiplicity::parse(" 2..5 "), Multiplicity::range(2, 5));
  EXPECT_FALSE(Multiplicity::parse(""));
  EXPECT_FALSE(Multiplicity::parse("1.."));
  EXPECT_FALSE(Multiplicity::parse("x"));
  EXPECT_EQ(Multiplicity::exactly(1).to_string(), "1..1");
  EXPECT_EQ(Multiplicity::at_least(0).to_string(), "0..*");
  EXPECT_FALSE(Multiplicity::range(3, 1).is_valid());
  EXPECT_TRUE(Multiplicity::at_least(0).is_many());
  EXPECT_FALSE(Multiplicity::range(0, 1).is_many());
}

TEST(RelationshipKind, NamesRoundTrip) {
  for (auto k : {RelationshipKind::Association, RelationshipKind::Aggregation, RelationshipKind::Composition,
                 RelationshipKind::Generalization}) {
    EXPECT_EQ(parse_relationship_kind(to_string(k)), k);
  }
  EXPECT_EQ(parse_relationship_kind("Inheritance"), RelationshipKind::Generalization);
  EXPECT_FALSE(parse_relationship_kind("dependency"));
}

TEST(Validate, EmptyDiagramIsValid) { EXPECT_TRUE(validate(UmlDiagram{}).empty()); }

TEST(Validate, DanglingEndpoint) {
  UmlDiagram d;
  d.classes = {{.name = "A"}};
  d.relationships = {{.source = "A", .target = "B"}};
  const auto v = validate(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::DanglingEndpoint);
  EXPECT_EQ(v[0].subject, "B");
}

TEST(Validate, DuplicateClassAfterNormalization) {
  UmlDiagram d;
  d.classes = {{.name = "Orders"}, {.name = "Order"}};
  const auto v = validate(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::DuplicateClass);
  EXPECT_EQ(v[0].subject, "order");
}

TEST(Validate, OtherInvariants) {
  UmlDiagram d;
  d.classes = {{.name = " "},
               {.name = "A", .attributes = {{.name = "Names"}, {.name = "name"}, {.name = ""}}},
               {.name = "B"}};
  d.relationships = {{.source = "A",
                      .target = "B",
                      .kind = RelationshipKind::Generalization,
                      .source_multiplicity = Multiplicity::exactly(1)},
                     {.source = "A", .target = "B", .target_multiplicity = Multiplicity::range(4, 2)}};
  std::set<ViolationKind> kinds;
  for (const auto& v : validate(d)) kinds.insert(v.kind);
  EXPECT_EQ(kinds, (std::set<ViolationKind>{ViolationKind::EmptyClassName, ViolationKind::DuplicateAttribute,
                                             ViolationKind::EmptyAttributeName,
                                             ViolationKind::GeneralizationMultiplicity,
                                             ViolationKind::InvalidMultiplicity}));
  EXPECT_THROW(require_valid(d, "test"), ValidationError);
}

TEST(Validate, ValidImpliesResolvableEndpoints) {
  Rng rng(21);
  for (int i = 0; i < 2000; ++i) {
    auto d = random_diagram(rng, {.spelling_variants = true});
    // Sometimes break an endpoint.
    if (!d.relationships.empty() && coin(rng, 0.3)) d.relationships.front().target = "Ghost";
    if (!validate(d).empty()) continue;
    for (const auto& r : d.relationships) {
      for (const auto& end : {r.source, r.target}) {
        const auto matches = std::count_if(d.classes.begin(), d.classes.end(),
                                           [&](const UmlClass& c) { return normalize_name(c.name) == normalize_name(end); });
        ASSERT_EQ(matches, 1) << end;
      }
    }
  }
}

TEST(Diagram, FindClassAndElementCount) {
  const auto d = two_classes();
  ASSERT_NE(d.find_class("CUSTOMERS"), nullptr);
  EXPECT_EQ(d.find_class("customers")->name, "Customer");
  EXPECT_EQ(d.find_class("Invoice"), nullptr);
  EXPECT_EQ(d.element_count(), 2u + 2u + 1u);
}

TEST(Equivalence, IgnoresSpellingAndOrder) {
  auto a = two_classes();
  UmlDiagram b;
  b.classes = {{.name = "orders"}, {.name = "CUSTOMERS", .attributes = {{.name = "City"}, {.name = "Name"}}}};
  b.relationships = {{.source = "customer",
                      .target = "order",
                      .source_multiplicity = Multiplicity::exactly(1),
                      .target_multiplicity = Multiplicity::at_least(0)}};
  EXPECT_TRUE(equivalent(a, b));
  b.relationships.front().kind = RelationshipKind::Aggregation;
  EXPECT_FALSE(equivalent(a, b));
}

TEST(Equivalence, IsAnEquivalenceRelation) {
  Rng rng(31);
  std::vector<UmlDiagram> pool;
  for (int i = 0; i < 60; ++i) {
    auto d = random_diagram(rng, {.max_classes = 3, .max_attributes = 1, .max_relationships = 2});
    pool.push_back(d);
    // Respelled copy of the same diagram.
    UmlDiagram copy = d;
    for (auto& c : copy.classes) c.name = upper(c.name) + "S";
    for (auto& r : copy.relationships) {
      r.source = upper(r.source) + "S";
      r.target = upper(r.target) + "S";
    }
    std::reverse(copy.classes.begin(), copy.classes.end());
    pool.push_back(copy);
  }
  for (const auto& a : pool) {
    ASSERT_TRUE(equivalent(a, a));
    for (const auto& b : pool) {
      ASSERT_EQ(equivalent(a, b), equivalent(b, a));
      if (!equivalent(a, b)) continue;
      for (const auto& c : pool) {
        if (equivalent(b, c)) ASSERT_TRUE(equivalent(a, c));
      }
    }
  }
}
