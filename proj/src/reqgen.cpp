#include "umlforge/reqgen.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "umlforge/errors.hpp"

namespace umlforge {
namespace {

std::string substitute(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string placeholder = "{" + key + "}";
    for (auto pos = text.find(placeholder); pos != std::string::npos;
         pos = text.find(placeholder, pos + value.size())) {
      text.replace(pos, placeholder.size(), value);
    }
  }
  return text;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

// "A", "A or B", "A, B, or C"
std::string either_list(const std::vector<std::string>& items) {
  if (items.size() <= 2) return join(items, " or ");
  std::vector<std::string> head(items.begin(), items.end() - 1);
  return join(head, ", ") + ", or " + items.back();
}

// Audit matching ignores case and separators: "CreatedBy", "created_by", "Created By".
std::string audit_key(std::string_view name) {
  std::string out;
  for (char c : normalize_name(name)) {
    if (c != ' ') out.push_back(c);
  }
  return out;
}

class IdAllocator {
 public:
  explicit IdAllocator(std::string prefix) : prefix_(std::move(prefix)) {}

  std::string next(RequirementKind kind) {
    const bool functional = kind == RequirementKind::Functional;
    int& counter = functional ? functional_ : nonfunctional_;
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%03d", ++counter);
    return prefix_ + "-" + (functional ? "F" : "N") + buffer;
  }

 private:
  std::string prefix_;
  int functional_ = 0;
  int nonfunctional_ = 0;
};

}  // namespace

ReqGenConfig ReqGenConfig::from_json(const nlohmann::json& document) {
  ReqGenConfig cfg;
  if (!document.is_object()) throw ConfigError("requirements config must be a JSON object");
  try {
    if (document.contains("domain_prefix")) cfg.domain_prefix = document.at("domain_prefix").get<std::string>();
    if (document.contains("audit_attributes")) {
      cfg.audit_attribute_names = document.at("audit_attributes").get<std::set<std::string>>();
    }
    if (document.contains("include_nonfunctional")) {
      cfg.include_nonfunctional = document.at("include_nonfunctional").get<bool>();
    }
    if (document.contains("multiplicity_style")) {
      const auto style = document.at("multiplicity_style").get<std::string>();
      if (style == "literal") {
        cfg.multiplicity_style = MultiplicityStyle::Literal;
      } else if (style == "readable") {
        cfg.multiplicity_style = MultiplicityStyle::Readable;
      } else {
        throw ConfigError("multiplicity_style must be \"literal\" or \"readable\"");
      }
    }
    if (document.contains("templates")) {
      const auto& t = document.at("templates");
      auto& out = cfg.templates;
      const std::pair<const char*, std::string*> fields[] = {
          {"record", &out.record},
          {"record_bare", &out.record_bare},
          {"audit", &out.audit},
          {"association", &out.association},
          {"classification", &out.classification},
          {"catalogue", &out.catalogue},
          {"referential_integrity", &out.referential_integrity},
          {"naming", &out.naming},
      };
      for (const auto& [key, target] : fields) {
        if (t.contains(key)) *target = t.at(key).get<std::string>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("requirements config: ") + e.what());
  }
  if (cfg.domain_prefix.empty()) throw ConfigError("domain_prefix must not be empty");
  return cfg;
}

std::string trace_ref(const UmlClass& cls) { return "class:" + cls.name; }

std::string trace_ref(const Relationship& rel) {
  return "relationship:" + rel.source + "->" + rel.target + ":" + std::string(to_string(rel.kind));
}

std::string render_multiplicity(const Multiplicity& m, MultiplicityStyle style) {
  if (style == MultiplicityStyle::Literal) return m.to_string();
  if (m.lower == 1 && m.upper == 1u) return "exactly one";
  if (m.lower == 0 && !m.upper) return "zero or more";
  if (m.lower == 1 && !m.upper) return "one or more";
  if (m.lower == 0 && m.upper == 1u) return "zero or one";
  if (!m.upper) return std::to_string(m.lower) + " or more";
  if (m.lower == *m.upper) return "exactly " + std::to_string(m.lower);
  return std::to_string(m.lower) + " to " + std::to_string(*m.upper);
}

std::vector<Requirement> generate_requirements(const UmlDiagram& diagram, const ReqGenConfig& cfg) {
  if (cfg.domain_prefix.empty()) throw std::invalid_argument("domain_prefix must not be empty");
  require_valid(diagram, "generate_requirements");

  std::set<std::string> audit_keys;
  for (const auto& name : cfg.audit_attribute_names) audit_keys.insert(audit_key(name));

  IdAllocator ids(cfg.domain_prefix);
  std::vector<Requirement> out;
  auto emit = [&](RequirementKind kind, std::string text, std::vector<std::string> trace) {
    out.push_back(Requirement{ids.next(kind), kind, std::move(text), std::move(trace)});
  };
  const auto& t = cfg.templates;

  for (const auto& cls : diagram.classes) {
    std::vector<std::string> names;
    for (const auto& a : cls.attributes) names.push_back(a.name);

    if (cls.is_enumeration) {
      emit(RequirementKind::Functional, substitute(t.catalogue, {{"class", cls.name}, {"values", join(names, ", ")}}),
           {trace_ref(cls)});
      continue;
    }

    std::vector<std::string> regular;
    std::vector<std::string> audit;
    for (const auto& name : names) {
      (audit_keys.contains(audit_key(name)) ? audit : regular).push_back(name);
    }
    if (regular.empty()) {
      emit(RequirementKind::Functional, substitute(t.record_bare, {{"class", cls.name}}), {trace_ref(cls)});
    } else {
      emit(RequirementKind::Functional,
           substitute(t.record, {{"class", cls.name}, {"attributes", join(regular, ", ")}}), {trace_ref(cls)});
    }
    if (!audit.empty()) {
      emit(RequirementKind::Functional, substitute(t.audit, {{"class", cls.name}, {"attributes", join(audit, ", ")}}),
           {trace_ref(cls)});
    }
  }

  // Generalizations are grouped per superclass, emitted where the family first appears.
  std::map<std::string, std::vector<const Relationship*>> families;
  for (const auto& rel : diagram.relationships) {
    if (rel.kind == RelationshipKind::Generalization) families[normalize_name(rel.target)].push_back(&rel);
  }
  std::set<std::string> emitted_families;

  for (const auto& rel : diagram.relationships) {
    if (rel.kind == RelationshipKind::Generalization) {
      const auto key = normalize_name(rel.target);
      if (!emitted_families.insert(key).second) continue;
      const auto* super = diagram.find_class(rel.target);
      std::vector<std::string> subclasses;
      std::vector<std::string> trace = {trace_ref(*super)};
      for (const auto* member : families[key]) {
        if (std::find(subclasses.begin(), subclasses.end(), member->source) == subclasses.end()) {
          subclasses.push_back(member->source);
        }
        trace.push_back(trace_ref(*member));
      }
      emit(RequirementKind::Functional,
           substitute(t.classification, {{"class", super->name}, {"subclasses", either_list(subclasses)}}),
           std::move(trace));
      continue;
    }

    // One sentence per relationship, phrased from the "many" end; ties go to the
    // alphabetically first class.
    const bool source_many = rel.source_multiplicity && rel.source_multiplicity->is_many();
    const bool target_many = rel.target_multiplicity && rel.target_multiplicity->is_many();
    bool subject_is_target;
    if (target_many != source_many) {
      subject_is_target = target_many;
    } else {
      subject_is_target = normalize_name(rel.target) < normalize_name(rel.source);
    }
    const auto& subject = subject_is_target ? rel.target : rel.source;
    const auto& other = subject_is_target ? rel.source : rel.target;
    const auto& other_multiplicity = subject_is_target ? rel.source_multiplicity : rel.target_multiplicity;
    std::string text;
    if (other_multiplicity) {
      text = substitute(t.association, {{"class", subject},
                                        {"other", other},
                                        {"multiplicity", render_multiplicity(*other_multiplicity, cfg.multiplicity_style)}});
    } else {
      text = substitute(t.association, {{"class", subject}, {"other", other}, {"multiplicity", "{multiplicity}"}});
      const std::string gap = " {multiplicity}";
      if (auto pos = text.find(gap); pos != std::string::npos) text.erase(pos, gap.size());
    }
    emit(RequirementKind::Functional, std::move(text), {trace_ref(rel)});
  }

  if (cfg.include_nonfunctional) {
    for (const auto& rel : diagram.relationships) {
      if (rel.kind == RelationshipKind::Generalization) continue;
      emit(RequirementKind::NonFunctional,
           substitute(t.referential_integrity, {{"class", rel.source}, {"other", rel.target}}), {trace_ref(rel)});
    }
    if (!diagram.classes.empty()) {
      std::vector<std::string> names;
      std::vector<std::string> trace;
      for (const auto& cls : diagram.classes) {
        names.push_back(cls.name);
        trace.push_back(trace_ref(cls));
      }
      emit(RequirementKind::NonFunctional, substitute(t.naming, {{"classes", join(names, ", ")}}), std::move(trace));
    }
  }
  return out;
}

std::string render_document(const std::vector<Requirement>& requirements) {
  std::vector<const Requirement*> sorted;
  for (const auto& r : requirements) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->id == sorted[i - 1]->id) throw std::invalid_argument("duplicate requirement id " + sorted[i]->id);
  }
  std::string out;
  for (const auto* r : sorted) out += r->id + ": " + r->text + "\n";
  return out;
}

nlohmann::json trace_sidecar(const std::vector<Requirement>& requirements) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& r : requirements) out[r.id] = r.trace;
  return out;
}

}  // namespace umlforge
