#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace umlforge {

/// Instance-count range on one end of a relationship. `upper == nullopt` means unbounded (`*`).
struct Multiplicity {
  std::uint32_t lower = 0;
  std::optional<std::uint32_t> upper;

  static Multiplicity exactly(std::uint32_t n) { return {n, n}; }
  static Multiplicity range(std::uint32_t lo, std::uint32_t hi) { return {lo, hi}; }
  static Multiplicity at_least(std::uint32_t lo) { return {lo, std::nullopt}; }

  /// Accepts "1", "*", "n", "many", "0..1", "1..*", "0..n", "2..5". Returns nullopt otherwise.
  static std::optional<Multiplicity> parse(std::string_view text);

  /// Canonical "lower..upper" form, `*` for unbounded ("1..1", "0..*").
  std::string to_string() const;

  bool is_valid() const noexcept { return !upper || lower <= *upper; }
  /// True when more than one instance may participate.
  bool is_many() const noexcept { return !upper || *upper > 1; }

  friend auto operator<=>(const Multiplicity&, const Multiplicity&) = default;
};

enum class RelationshipKind { Association, Aggregation, Composition, Generalization };

std::string_view to_string(RelationshipKind kind) noexcept;
std::optional<RelationshipKind> parse_relationship_kind(std::string_view text);

struct UmlAttribute {
  std::string name;
  std::optional<std::string> declared_type;
  std::optional<char> visibility;  // one of + - # ~

  friend bool operator==(const UmlAttribute&, const UmlAttribute&) = default;
};

struct UmlClass {
  std::string name;
  std::vector<UmlAttribute> attributes;
  // Kept verbatim for round-trips; never matched.
  std::vector<std::string> operations;
  bool is_enumeration = false;
  bool is_abstract = false;
  std::optional<std::string> stereotype;

  friend bool operator==(const UmlClass&, const UmlClass&) = default;
};

struct Relationship {
  std::string source;
  std::string target;
  RelationshipKind kind = RelationshipKind::Association;
  std::optional<Multiplicity> source_multiplicity;
  std::optional<Multiplicity> target_multiplicity;
  std::optional<std::string> label;

  friend bool operator==(const Relationship&, const Relationship&) = default;
};

struct UmlDiagram {
  std::vector<UmlClass> classes;
  std::vector<Relationship> relationships;
  std::optional<std::string> title;

  /// Lookup by normalized name; nullptr when absent.
  const UmlClass* find_class(std::string_view name) const;

  /// Number of classes + attributes + relationships.
  std::size_t element_count() const;

  friend bool operator==(const UmlDiagram&, const UmlDiagram&) = default;
};

/// Canonical name used for every comparison: lowercase, trimmed, separators
/// (whitespace, `_`, `-`) collapsed to one space, last word singularized.
std::string normalize_name(std::string_view raw);

/// Singular form of one lowercase word using the fixed rule table.
std::string singularize(std::string_view word);

enum class ViolationKind {
  EmptyClassName,
  EmptyAttributeName,
  DuplicateClass,
  DuplicateAttribute,
  DanglingEndpoint,
  GeneralizationMultiplicity,
  InvalidMultiplicity,
};

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
  ViolationKind kind;
  std::string subject;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

/// Every invariant breach of `diagram`; empty means structurally valid.
std::vector<Violation> validate(const UmlDiagram& diagram);

/// Throws ValidationError listing the violations, if any.
void require_valid(const UmlDiagram& diagram, std::string_view context);

/// Order- and spelling-insensitive view of a diagram.
struct CanonicalDiagram {
  struct ClassView {
    bool is_enumeration = false;
    std::set<std::string> attributes;
    friend bool operator==(const ClassView&, const ClassView&) = default;
  };
  using RelationshipKey =
      std::tuple<std::string, std::string, RelationshipKind, std::optional<Multiplicity>,
                 std::optional<Multiplicity>>;

  std::map<std::string, ClassView> classes;
  std::multiset<RelationshipKey> relationships;

  friend bool operator==(const CanonicalDiagram&, const CanonicalDiagram&) = default;
};

CanonicalDiagram canonicalize(const UmlDiagram& diagram);

/// Equality under normalization: same classes, attributes, and relationships up to naming and order.
bool equivalent(const UmlDiagram& a, const UmlDiagram& b);

}  // namespace umlforge
