#include "umlforge/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "umlforge/errors.hpp"

namespace umlforge {

using nlohmann::json;

namespace {

using PairKey = std::pair<std::string, std::string>;

PairKey unordered(const std::string& a, const std::string& b) { return a < b ? PairKey{a, b} : PairKey{b, a}; }

std::set<PairKey> connected_pairs(const std::map<Triple, std::size_t>& triples) {
  std::set<PairKey> pairs;
  for (const auto& [t, count] : triples) pairs.insert(unordered(t.source, t.target));
  return pairs;
}

// Normalized class name -> original spelling (first occurrence).
std::map<std::string, std::string> class_names(const UmlDiagram& d) {
  std::map<std::string, std::string> out;
  for (const auto& c : d.classes) out.emplace(normalize_name(c.name), c.name);
  return out;
}

// Normalized attribute name -> original spelling, per normalized class.
std::map<std::string, std::map<std::string, std::string>> class_attributes(const UmlDiagram& d) {
  std::map<std::string, std::map<std::string, std::string>> out;
  for (const auto& c : d.classes) {
    auto& attrs = out[normalize_name(c.name)];
    for (const auto& a : c.attributes) attrs.emplace(normalize_name(a.name), a.name);
  }
  return out;
}

std::size_t total(const std::map<Triple, std::size_t>& m) {
  std::size_t n = 0;
  for (const auto& [t, count] : m) n += count;
  return n;
}

std::size_t count_of(const std::map<Triple, std::size_t>& m, const Triple& t) {
  auto it = m.find(t);
  return it == m.end() ? 0 : it->second;
}

// Relationship counts under multiset semantics; see evaluate().
struct RelationshipCounts {
  std::size_t gold = 0;
  std::size_t gen = 0;
  std::size_t hard = 0;
  std::size_t soft_gold = 0;
  std::size_t soft_gen = 0;
};

RelationshipCounts count_relationships(const std::map<Triple, std::size_t>& gold,
                                       const std::map<Triple, std::size_t>& gen) {
  RelationshipCounts c;
  c.gold = total(gold);
  c.gen = total(gen);
  const auto gold_pairs = connected_pairs(gold);
  const auto gen_pairs = connected_pairs(gen);
  for (const auto& [t, n] : gold) {
    c.hard += std::min(n, count_of(gen, t));
    if (gen_pairs.contains(unordered(t.source, t.target))) c.soft_gold += n;
  }
  for (const auto& [t, n] : gen) {
    if (gold_pairs.contains(unordered(t.source, t.target))) c.soft_gen += std::min(n, std::max<std::size_t>(1, count_of(gold, t)));
  }
  return c;
}

double ratio(std::size_t num, std::size_t den, std::size_t other_den) {
  if (den == 0) return other_den == 0 ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

std::string to_string(const Triple& triple) {
  return triple.source + " -" + std::string(to_string(triple.kind)) + "-> " + triple.target;
}

std::map<Triple, std::size_t> relationship_multiset(const UmlDiagram& diagram) {
  std::map<Triple, std::size_t> out;
  for (const auto& r : diagram.relationships) {
    ++out[Triple{normalize_name(r.source), normalize_name(r.target), r.kind}];
  }
  return out;
}

Prf compute_prf(std::size_t gold_count, std::size_t gen_count, std::size_t matched_count) {
  return compute_prf(gold_count, gen_count, matched_count, matched_count);
}

Prf compute_prf(std::size_t gold_count, std::size_t gen_count, std::size_t matched_gold, std::size_t matched_gen) {
  Prf p;
  p.precision = ratio(matched_gen, gen_count, gold_count);
  p.recall = ratio(matched_gold, gold_count, gen_count);
  p.f1 = p.precision + p.recall > 0 ? 2 * p.precision * p.recall / (p.precision + p.recall) : 0.0;
  return p;
}

std::set<std::string> match_classes(const UmlDiagram& gold, const UmlDiagram& gen) {
  const auto g = class_names(gold);
  const auto m = class_names(gen);
  std::set<std::string> out;
  for (const auto& [name, spelling] : g) {
    if (m.contains(name)) out.insert(name);
  }
  return out;
}

std::set<AttributeRef> match_attributes(const UmlDiagram& gold, const UmlDiagram& gen,
                                        const std::set<std::string>& matched_classes) {
  const auto g = class_attributes(gold);
  const auto m = class_attributes(gen);
  std::set<AttributeRef> out;
  for (const auto& cls : matched_classes) {
    auto gi = g.find(cls);
    auto mi = m.find(cls);
    if (gi == g.end() || mi == m.end()) continue;
    for (const auto& [attr, spelling] : gi->second) {
      if (mi->second.contains(attr)) out.emplace(cls, attr);
    }
  }
  return out;
}

std::set<Triple> match_relationships(const UmlDiagram& gold, const UmlDiagram& gen, MatchMode mode) {
  const auto g = relationship_multiset(gold);
  const auto m = relationship_multiset(gen);
  const auto gen_pairs = connected_pairs(m);
  std::set<Triple> out;
  for (const auto& [t, n] : g) {
    const bool hit = mode == MatchMode::Hard ? m.contains(t) : gen_pairs.contains(unordered(t.source, t.target));
    if (hit) out.insert(t);
  }
  return out;
}

MatchResult match(const UmlDiagram& gold, const UmlDiagram& gen) {
  MatchResult r;
  r.matched_classes = match_classes(gold, gen);
  r.matched_attributes = match_attributes(gold, gen, r.matched_classes);
  r.matched_relationships_hard = match_relationships(gold, gen, MatchMode::Hard);
  r.matched_relationships_soft = match_relationships(gold, gen, MatchMode::Soft);
  return r;
}

std::string_view to_string(Dimension dimension) noexcept {
  switch (dimension) {
    case Dimension::Class: return "class";
    case Dimension::Attribute: return "attribute";
    case Dimension::Relationship: return "relationship";
  }
  return "?";
}

std::string_view to_string(ErrorType type) noexcept {
  switch (type) {
    case ErrorType::Missing: return "missing";
    case ErrorType::Extra: return "extra";
    case ErrorType::Misrepresented: return "misrepresented";
    case ErrorType::Wrong: return "wrong";
    case ErrorType::Duplicate: return "duplicate";
    case ErrorType::Misclassified: return "misclassified";
  }
  return "?";
}

bool is_taxonomy_cell(Dimension dimension, ErrorType type) noexcept {
  if (type == ErrorType::Missing || type == ErrorType::Extra) return true;
  switch (dimension) {
    case Dimension::Class: return type == ErrorType::Misrepresented;
    case Dimension::Attribute: return type == ErrorType::Wrong;
    case Dimension::Relationship: return type == ErrorType::Duplicate || type == ErrorType::Misclassified;
  }
  return false;
}

ErrorRecord::ErrorRecord(Dimension dimension_, ErrorType error_type_, std::string subject_, std::string detail_)
    : dimension(dimension_), error_type(error_type_), subject(std::move(subject_)), detail(std::move(detail_)) {
  if (!is_taxonomy_cell(dimension, error_type)) {
    throw std::invalid_argument(std::string(to_string(dimension)) + "/" + std::string(to_string(error_type)) +
                                " is not an error category");
  }
}

std::vector<ErrorRecord> classify_errors(const UmlDiagram& gold, const UmlDiagram& gen, const MatchResult& matches) {
  std::vector<ErrorRecord> out;
  const auto gold_classes = class_names(gold);
  const auto gen_classes = class_names(gen);
  for (const auto& [name, spelling] : gold_classes) {
    if (!matches.matched_classes.contains(name)) {
      out.emplace_back(Dimension::Class, ErrorType::Missing, spelling, "reference class not generated");
    }
  }
  for (const auto& [name, spelling] : gen_classes) {
    if (!matches.matched_classes.contains(name)) {
      out.emplace_back(Dimension::Class, ErrorType::Extra, spelling, "class not in the reference");
    }
  }

  // Only classes present on both sides are scored for attributes.
  const auto gold_attrs = class_attributes(gold);
  const auto gen_attrs = class_attributes(gen);
  for (const auto& cls : matches.matched_classes) {
    const auto& g = gold_attrs.at(cls);
    const auto& m = gen_attrs.at(cls);
    for (const auto& [attr, spelling] : g) {
      if (!matches.matched_attributes.contains({cls, attr})) {
        out.emplace_back(Dimension::Attribute, ErrorType::Missing, gold_classes.at(cls) + "." + spelling,
                         "reference attribute not generated");
      }
    }
    for (const auto& [attr, spelling] : m) {
      if (!matches.matched_attributes.contains({cls, attr})) {
        out.emplace_back(Dimension::Attribute, ErrorType::Extra, gen_classes.at(cls) + "." + spelling,
                         "attribute not in the reference");
      }
    }
  }

  const auto g = relationship_multiset(gold);
  const auto m = relationship_multiset(gen);
  const auto gold_pairs = connected_pairs(g);
  std::map<PairKey, std::vector<Triple>> gen_by_pair;
  for (const auto& [t, n] : m) gen_by_pair[unordered(t.source, t.target)].push_back(t);

  for (const auto& [t, n] : g) {
    if (!matches.matched_relationships_soft.contains(t)) {
      for (std::size_t i = 0; i < n; ++i) {
        out.emplace_back(Dimension::Relationship, ErrorType::Missing, to_string(t), "classes not connected");
      }
    }
  }
  for (const auto& [t, n] : m) {
    if (!gold_pairs.contains(unordered(t.source, t.target))) {
      out.emplace_back(Dimension::Relationship, ErrorType::Extra, to_string(t), "classes not connected in the reference");
    }
  }
  for (const auto& [t, n] : m) {
    const auto allowed = std::max<std::size_t>(1, count_of(g, t));
    for (std::size_t i = allowed; i < n; ++i) {
      out.emplace_back(Dimension::Relationship, ErrorType::Duplicate, to_string(t), "redundant copy");
    }
  }
  for (const auto& [t, n] : g) {
    if (!matches.matched_relationships_soft.contains(t)) continue;
    const auto hard = std::min(n, count_of(m, t));
    if (hard == n) continue;
    std::string generated;
    for (const auto& other : gen_by_pair.at(unordered(t.source, t.target))) {
      if (other == t) continue;
      if (!generated.empty()) generated += ", ";
      generated += to_string(other);
    }
    for (std::size_t i = hard; i < n; ++i) {
      out.emplace_back(Dimension::Relationship, ErrorType::Misclassified, to_string(t),
                       generated.empty() ? "kind or direction differs" : "generated as " + generated);
    }
  }
  return out;
}

std::vector<ErrorRecord> parse_annotations(const json& document) {
  const json* items = &document;
  if (document.is_object()) {
    auto it = document.find("annotations");
    if (it == document.end()) throw FormatError("annotation overlay has no \"annotations\" array");
    items = &*it;
  }
  if (!items->is_array()) throw FormatError("annotation overlay must be an array");

  static const std::map<std::string, Dimension> dimensions = {
      {"class", Dimension::Class}, {"attribute", Dimension::Attribute}, {"relationship", Dimension::Relationship}};
  static const std::map<std::string, ErrorType> types = {
      {"missing", ErrorType::Missing},         {"extra", ErrorType::Extra},
      {"misrepresented", ErrorType::Misrepresented}, {"wrong", ErrorType::Wrong},
      {"duplicate", ErrorType::Duplicate},     {"misclassified", ErrorType::Misclassified}};

  std::vector<ErrorRecord> out;
  for (std::size_t i = 0; i < items->size(); ++i) {
    const auto& a = (*items)[i];
    const auto where = "annotation " + std::to_string(i);
    if (!a.is_object()) throw FormatError(where + ": expected an object");
    auto text = [&](const char* key, bool required) -> std::string {
      auto it = a.find(key);
      if (it == a.end()) {
        if (required) throw FormatError(where + ": missing \"" + key + "\"");
        return {};
      }
      if (!it->is_string()) throw FormatError(where + ": \"" + key + "\" must be a string");
      return it->get<std::string>();
    };
    auto dim = dimensions.find(lower(text("dimension", true)));
    if (dim == dimensions.end()) throw FormatError(where + ": unknown dimension");
    auto type = types.find(lower(text("error_type", true)));
    if (type == types.end()) throw FormatError(where + ": unknown error_type");
    if (!is_taxonomy_cell(dim->second, type->second)) {
      throw FormatError(where + ": " + dim->first + "/" + type->first + " is not an error category");
    }
    out.emplace_back(dim->second, type->second, text("subject", true), text("note", false));
  }
  return out;
}

std::vector<ErrorRecord> load_annotations(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("file not found: " + path.string());
  auto document = json::parse(in, nullptr, false);
  if (document.is_discarded()) throw FormatError(path.string() + ": invalid JSON");
  return parse_annotations(document);
}

std::map<std::pair<Dimension, ErrorType>, std::size_t> EvalReport::error_counts() const {
  std::map<std::pair<Dimension, ErrorType>, std::size_t> counts;
  for (auto d : {Dimension::Class, Dimension::Attribute, Dimension::Relationship}) {
    for (auto t : {ErrorType::Missing, ErrorType::Extra, ErrorType::Misrepresented, ErrorType::Wrong,
                   ErrorType::Duplicate, ErrorType::Misclassified}) {
      if (is_taxonomy_cell(d, t)) counts[{d, t}] = 0;
    }
  }
  for (const auto& e : errors) ++counts[{e.dimension, e.error_type}];
  return counts;
}

json EvalReport::to_json() const {
  auto prf = [](const Prf& p) { return json{{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}}; };
  json errs = json::array();
  for (const auto& e : errors) {
    errs.push_back({{"dimension", to_string(e.dimension)},
                    {"error_type", to_string(e.error_type)},
                    {"subject", e.subject},
                    {"detail", e.detail}});
  }
  json counts = json::object();
  for (const auto& [cell, n] : error_counts()) {
    counts[std::string(to_string(cell.first))][std::string(to_string(cell.second))] = n;
  }
  return {{"classes", prf(classes)},
          {"attributes", prf(attributes)},
          {"relationships_strict", prf(relationships_strict)},
          {"relationships_relaxed", prf(relationships_relaxed)},
          {"average", average},
          {"error_counts", std::move(counts)},
          {"errors", std::move(errs)}};
}

// Relationship scoring treats both diagrams as multisets of normalized triples.
// Hard matches count min(gold copies, generated copies) per triple. Soft recall
// counts gold relationships whose classes are connected in the generated diagram;
// soft precision counts generated relationships whose classes are connected in the
// gold, crediting at most max(1, gold copies) of each triple so that redundant
// copies only enlarge the denominator.
EvalReport evaluate(const UmlDiagram& gold, const UmlDiagram& gen, const std::vector<ErrorRecord>& annotations) {
  const auto matches = match(gold, gen);
  EvalReport report;

  std::set<std::string> gold_classes, gen_classes;
  for (const auto& c : gold.classes) gold_classes.insert(normalize_name(c.name));
  for (const auto& c : gen.classes) gen_classes.insert(normalize_name(c.name));
  report.classes = compute_prf(gold_classes.size(), gen_classes.size(), matches.matched_classes.size());

  const auto gold_attrs = class_attributes(gold);
  const auto gen_attrs = class_attributes(gen);
  std::size_t gold_attr_count = 0, gen_attr_count = 0;
  for (const auto& cls : matches.matched_classes) {
    gold_attr_count += gold_attrs.at(cls).size();
    gen_attr_count += gen_attrs.at(cls).size();
  }
  report.attributes = compute_prf(gold_attr_count, gen_attr_count, matches.matched_attributes.size());

  const auto counts = count_relationships(relationship_multiset(gold), relationship_multiset(gen));
  report.relationships_strict = compute_prf(counts.gold, counts.gen, counts.hard);
  report.relationships_relaxed = compute_prf(counts.gold, counts.gen, counts.soft_gold, counts.soft_gen);

  report.average = (report.classes.f1 + report.attributes.f1 + report.relationships_strict.f1 +
                    report.relationships_relaxed.f1) /
                   4.0;
  report.errors = classify_errors(gold, gen, matches);
  report.errors.insert(report.errors.end(), annotations.begin(), annotations.end());
  return report;
}

EvalReport macro_average(const std::vector<EvalReport>& reports) {
  EvalReport out;
  if (reports.empty()) return out;
  const double n = static_cast<double>(reports.size());
  auto mean = [&](Prf EvalReport::*field) {
    Prf p;
    for (const auto& r : reports) {
      p.precision += (r.*field).precision;
      p.recall += (r.*field).recall;
      p.f1 += (r.*field).f1;
    }
    p.precision /= n;
    p.recall /= n;
    p.f1 /= n;
    return p;
  };
  out.classes = mean(&EvalReport::classes);
  out.attributes = mean(&EvalReport::attributes);
  out.relationships_strict = mean(&EvalReport::relationships_strict);
  out.relationships_relaxed = mean(&EvalReport::relationships_relaxed);
  for (const auto& r : reports) {
    out.average += r.average;
    out.errors.insert(out.errors.end(), r.errors.begin(), r.errors.end());
  }
  out.average /= n;
  return out;
}

std::string render_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
  std::size_t label_width = 5;
  for (const auto& [label, r] : rows) label_width = std::max(label_width, label.size());
  std::string out;
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, "%-*s  %10s  %10s  %17s  %17s  %8s\n", static_cast<int>(label_width), "Model",
                "Classes", "Attributes", "Relationships (S)", "Relationships (R)", "Average");
  out += buffer;
  for (const auto& [label, r] : rows) {
    std::snprintf(buffer, sizeof buffer, "%-*s  %10.4f  %10.4f  %17.4f  %17.4f  %8.4f\n", static_cast<int>(label_width),
                  label.c_str(), r.classes.f1, r.attributes.f1, r.relationships_strict.f1, r.relationships_relaxed.f1,
                  r.average);
    out += buffer;
  }
  return out;
}

std::string render_taxonomy(const EvalReport& report) {
  std::ostringstream out;
  const auto counts = report.error_counts();
  for (auto d : {Dimension::Class, Dimension::Attribute, Dimension::Relationship}) {
    std::size_t sum = 0;
    std::string cells;
    for (const auto& [cell, n] : counts) {
      if (cell.first != d) continue;
      sum += n;
      if (!cells.empty()) cells += ", ";
      cells += std::string(to_string(cell.second)) + " " + std::to_string(n);
    }
    out << to_string(d) << ": " << sum << " (" << cells << ")\n";
  }
  return out.str();
}

}  // namespace umlforge
