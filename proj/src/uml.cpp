#include "umlforge/uml.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

#include "umlforge/errors.hpp"

namespace umlforge {
namespace {

bool is_separator(char c) {
  switch (c) {
    case ' ': case '\t': case '\n': case '\r': case '\v': case '\f': case '_': case '-':
      return true;
    default:
      return false;
  }
}

char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n\v\f";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

const std::unordered_map<std::string_view, std::string_view>& irregular_plurals() {
  static const std::unordered_map<std::string_view, std::string_view> table = {
      {"children", "child"},   {"people", "person"},     {"men", "man"},
      {"women", "woman"},      {"mice", "mouse"},        {"geese", "goose"},
      {"feet", "foot"},        {"teeth", "tooth"},       {"oxen", "ox"},
      {"criteria", "criterion"}, {"phenomena", "phenomenon"}, {"indices", "index"},
      {"matrices", "matrix"},  {"vertices", "vertex"},   {"analyses", "analysis"},
      {"statuses", "status"},  {"buses", "bus"},         {"viruses", "virus"},
      {"campuses", "campus"},  {"movies", "movie"},      {"cookies", "cookie"},
      {"ties", "tie"},         {"pies", "pie"},          {"lies", "lie"},
      {"shelves", "shelf"},    {"leaves", "leaf"},       {"knives", "knife"},
      {"wives", "wife"},       {"lives", "life"},        {"halves", "half"},
      {"thieves", "thief"},    {"wolves", "wolf"},
  };
  return table;
}

const std::unordered_set<std::string_view>& invariant_nouns() {
  static const std::unordered_set<std::string_view> words = {
      "news", "series", "species", "means", "gas", "lens", "canvas", "alias", "atlas",
      "bias", "chassis", "physics", "mathematics", "economics", "ethics", "logistics",
  };
  return words;
}

// One rewrite step; returns the word unchanged when no rule applies.
std::string singularize_step(std::string_view w) {
  if (auto it = irregular_plurals().find(w); it != irregular_plurals().end()) {
    return std::string(it->second);
  }
  if (invariant_nouns().contains(w)) return std::string(w);
  const auto n = w.size();
  if (n > 3 && ends_with(w, "ies")) return std::string(w.substr(0, n - 3)) + "y";
  if (n > 4 && ends_with(w, "sses")) return std::string(w.substr(0, n - 2));
  if (n > 3 && (ends_with(w, "xes") || ends_with(w, "ches") || ends_with(w, "shes") ||
                ends_with(w, "zzes"))) {
    return std::string(w.substr(0, n - 2));
  }
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return std::string(w);
  if (n >= 3 && w.back() == 's') return std::string(w.substr(0, n - 1));
  return std::string(w);
}

}  // namespace

std::optional<Multiplicity> Multiplicity::parse(std::string_view text) {
  text = trim(text);
  auto parse_bound = [](std::string_view t) -> std::optional<std::optional<std::uint32_t>> {
    t = trim(t);
    if (t == "*" || t == "n" || t == "N" || t == "m" || t == "M" || t == "many") {
      return std::optional<std::uint32_t>{};
    }
    std::uint32_t value = 0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (t.empty() || ec != std::errc{} || ptr != last) return std::nullopt;
    return std::optional<std::uint32_t>{value};
  };

  const auto dots = text.find("..");
  if (dots == std::string_view::npos) {
    auto bound = parse_bound(text);
    if (!bound) return std::nullopt;
    if (!*bound) return Multiplicity::at_least(0);
    return Multiplicity::exactly(**bound);
  }
  auto lo = parse_bound(text.substr(0, dots));
  auto hi = parse_bound(text.substr(dots + 2));
  if (!lo || !hi || !*lo) return std::nullopt;
  Multiplicity m{**lo, *hi};
  if (!m.is_valid()) return std::nullopt;
  return m;
}

std::string Multiplicity::to_string() const {
  return std::to_string(lower) + ".." + (upper ? std::to_string(*upper) : std::string("*"));
}

std::string_view to_string(RelationshipKind kind) noexcept {
  switch (kind) {
    case RelationshipKind::Association: return "association";
    case RelationshipKind::Aggregation: return "aggregation";
    case RelationshipKind::Composition: return "composition";
    case RelationshipKind::Generalization: return "generalization";
  }
  return "association";
}

std::optional<RelationshipKind> parse_relationship_kind(std::string_view text) {
  std::string lower;
  for (char c : trim(text)) lower.push_back(ascii_lower(c));
  if (lower == "association") return RelationshipKind::Association;
  if (lower == "aggregation") return RelationshipKind::Aggregation;
  if (lower == "composition") return RelationshipKind::Composition;
  if (lower == "generalization" || lower == "generalisation" || lower == "inheritance") {
    return RelationshipKind::Generalization;
  }
  return std::nullopt;
}

std::string singularize(std::string_view word) {
  std::string current(word);
  // The rule table shortens words (or maps irregulars onto fixed points), so this settles quickly.
  for (int i = 0; i < 8; ++i) {
    auto next = singularize_step(current);
    if (next == current) break;
    current = std::move(next);
  }
  return current;
}

std::string normalize_name(std::string_view raw) {
  std::string collapsed;
  collapsed.reserve(raw.size());
  bool pending_space = false;
  for (char c : raw) {
    if (is_separator(c)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) {
      collapsed.push_back(' ');
      pending_space = false;
    }
    collapsed.push_back(ascii_lower(c));
  }
  const auto last_space = collapsed.rfind(' ');
  const auto word_start = last_space == std::string::npos ? 0 : last_space + 1;
  auto singular = singularize(std::string_view(collapsed).substr(word_start));
  collapsed.resize(word_start);
  collapsed += singular;
  return collapsed;
}

const UmlClass* UmlDiagram::find_class(std::string_view name) const {
  const auto key = normalize_name(name);
  for (const auto& cls : classes) {
    if (normalize_name(cls.name) == key) return &cls;
  }
  return nullptr;
}

std::size_t UmlDiagram::element_count() const {
  std::size_t n = classes.size() + relationships.size();
  for (const auto& cls : classes) n += cls.attributes.size();
  return n;
}

std::string_view to_string(ViolationKind kind) noexcept {
  switch (kind) {
    case ViolationKind::EmptyClassName: return "EmptyClassName";
    case ViolationKind::EmptyAttributeName: return "EmptyAttributeName";
    case ViolationKind::DuplicateClass: return "DuplicateClass";
    case ViolationKind::DuplicateAttribute: return "DuplicateAttribute";
    case ViolationKind::DanglingEndpoint: return "DanglingEndpoint";
    case ViolationKind::GeneralizationMultiplicity: return "GeneralizationMultiplicity";
    case ViolationKind::InvalidMultiplicity: return "InvalidMultiplicity";
  }
  return "Unknown";
}

std::vector<Violation> validate(const UmlDiagram& diagram) {
  std::vector<Violation> out;
  std::set<std::string> class_keys;
  std::set<std::string> reported_duplicates;

  for (std::size_t i = 0; i < diagram.classes.size(); ++i) {
    const auto& cls = diagram.classes[i];
    if (trim(cls.name).empty()) {
      out.push_back({ViolationKind::EmptyClassName, "#" + std::to_string(i),
                     "class #" + std::to_string(i) + " has an empty name"});
    } else {
      auto key = normalize_name(cls.name);
      if (!class_keys.insert(key).second && reported_duplicates.insert(key).second) {
        out.push_back({ViolationKind::DuplicateClass, key,
                       "more than one class normalizes to '" + key + "'"});
      }
    }

    std::set<std::string> attribute_keys;
    std::set<std::string> reported_attributes;
    for (const auto& attr : cls.attributes) {
      if (trim(attr.name).empty()) {
        out.push_back({ViolationKind::EmptyAttributeName, cls.name,
                       "class '" + cls.name + "' has an attribute with an empty name"});
        continue;
      }
      auto key = normalize_name(attr.name);
      if (!attribute_keys.insert(key).second && reported_attributes.insert(key).second) {
        out.push_back({ViolationKind::DuplicateAttribute, cls.name + "." + key,
                       "class '" + cls.name + "' repeats attribute '" + key + "'"});
      }
    }
  }

  for (const auto& rel : diagram.relationships) {
    for (const auto* endpoint : {&rel.source, &rel.target}) {
      if (!class_keys.contains(normalize_name(*endpoint))) {
        out.push_back({ViolationKind::DanglingEndpoint, *endpoint,
                       "relationship endpoint '" + *endpoint + "' is not a class in the diagram"});
      }
    }
    if (rel.kind == RelationshipKind::Generalization &&
        (rel.source_multiplicity || rel.target_multiplicity)) {
      out.push_back({ViolationKind::GeneralizationMultiplicity, rel.source + "->" + rel.target,
                     "generalization " + rel.source + " -> " + rel.target +
                         " carries a multiplicity"});
    }
    for (const auto* m : {&rel.source_multiplicity, &rel.target_multiplicity}) {
      if (*m && !(*m)->is_valid()) {
        out.push_back({ViolationKind::InvalidMultiplicity, rel.source + "->" + rel.target,
                       "multiplicity lower bound exceeds upper bound"});
      }
    }
  }
  return out;
}

void require_valid(const UmlDiagram& diagram, std::string_view context) {
  auto violations = validate(diagram);
  if (violations.empty()) return;
  std::string message(context);
  message += ": invalid diagram";
  for (const auto& v : violations) message += "; " + v.message;
  throw ValidationError(message);
}

CanonicalDiagram canonicalize(const UmlDiagram& diagram) {
  CanonicalDiagram out;
  for (const auto& cls : diagram.classes) {
    auto& view = out.classes[normalize_name(cls.name)];
    view.is_enumeration = view.is_enumeration || cls.is_enumeration;
    for (const auto& attr : cls.attributes) view.attributes.insert(normalize_name(attr.name));
  }
  for (const auto& rel : diagram.relationships) {
    out.relationships.emplace(normalize_name(rel.source), normalize_name(rel.target), rel.kind,
                              rel.source_multiplicity, rel.target_multiplicity);
  }
  return out;
}

bool equivalent(const UmlDiagram& a, const UmlDiagram& b) {
  return canonicalize(a) == canonicalize(b);
}

}  // namespace umlforge
