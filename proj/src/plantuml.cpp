#include "umlforge/plantuml.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <tuple>

#include "umlforge/errors.hpp"

namespace umlforge {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  while (b < s.size() && is_space(s[b])) ++b;
  std::size_t e = s.size();
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool starts_with_word(std::string_view line, std::string_view word) {
  if (line.size() < word.size()) return false;
  if (lower(line.substr(0, word.size())) != word) return false;
  return line.size() == word.size() || is_space(line[word.size()]) || line[word.size()] == '{';
}

bool is_name_char(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '$' || c >= 0x80;
}

// Splits on '\n' and drops a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  if (!lines.empty() && lines.back().empty() && !text.empty() && text.back() == '\n') {
    lines.pop_back();
  }
  return lines;
}

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return i_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return i_ + ahead < s_.size() ? s_[i_ + ahead] : '\0'; }
  void advance(std::size_t n = 1) { i_ = std::min(s_.size(), i_ + n); }
  void skip_space() {
    while (!done() && is_space(peek())) advance();
  }
  bool consume(std::string_view token) {
    if (s_.substr(i_).starts_with(token)) {
      advance(token.size());
      return true;
    }
    return false;
  }
  std::string_view rest() const { return s_.substr(std::min(i_, s_.size())); }

  std::optional<std::string> quoted() {
    if (peek() != '"') return std::nullopt;
    const auto close = s_.find('"', i_ + 1);
    if (close == std::string_view::npos) return std::nullopt;
    std::string value(s_.substr(i_ + 1, close - i_ - 1));
    i_ = close + 1;
    return value;
  }

  // Bare identifier; dots allowed between name characters (package-qualified names).
  std::optional<std::string> bare_name() {
    const auto start = i_;
    while (!done()) {
      const auto c = static_cast<unsigned char>(peek());
      if (is_name_char(c)) {
        advance();
      } else if (c == '.' && i_ > start && is_name_char(static_cast<unsigned char>(peek(1)))) {
        advance();
      } else {
        break;
      }
    }
    if (i_ == start) return std::nullopt;
    return std::string(s_.substr(start, i_ - start));
  }

  std::optional<std::string> name() {
    if (peek() == '"') return quoted();
    return bare_name();
  }

 private:
  std::string_view s_;
  std::size_t i_ = 0;
};

struct ArrowParse {
  std::string left_head;
  std::string right_head;
  bool dotted = false;
};

bool followed_by_break(const Cursor& c, std::size_t ahead) {
  const char n = c.peek(ahead);
  return n == '\0' || is_space(n) || n == '"';
}

std::optional<ArrowParse> parse_arrow(Cursor& c) {
  ArrowParse arrow;
  auto body_char = [](char ch) { return ch == '-' || ch == '.'; };

  static constexpr std::string_view kLeftHeads[] = {"<|", "<", "*", "o", "+", "#", "x", "}", "^"};
  for (auto head : kLeftHeads) {
    if (!c.rest().starts_with(head)) continue;
    if ((head == "o" || head == "x") && !body_char(c.peek(1))) continue;
    arrow.left_head = std::string(head);
    c.advance(head.size());
    break;
  }

  if (!body_char(c.peek())) return std::nullopt;
  bool any_body = false;
  while (!c.done()) {
    const char ch = c.peek();
    if (body_char(ch)) {
      arrow.dotted = arrow.dotted || ch == '.';
      any_body = true;
      c.advance();
    } else if (ch == '[') {
      // style hint such as -[#red]->
      while (!c.done() && c.peek() != ']') c.advance();
      if (c.done()) return std::nullopt;
      c.advance();
    } else if (ch >= 'a' && ch <= 'z') {
      // direction hint such as -up-> or -left-|>
      std::size_t n = 0;
      while (c.peek(n) >= 'a' && c.peek(n) <= 'z') ++n;
      if (!body_char(c.peek(n))) break;
      c.advance(n);
    } else {
      break;
    }
  }
  if (!any_body) return std::nullopt;

  static constexpr std::string_view kRightHeads[] = {"|>", ">", "*", "o", "+", "#", "x", "{", "^"};
  for (auto head : kRightHeads) {
    if (!c.rest().starts_with(head)) continue;
    if ((head == "o" || head == "x") && !followed_by_break(c, 1)) continue;
    arrow.right_head = std::string(head);
    c.advance(head.size());
    break;
  }
  return arrow;
}

struct RelationshipLine {
  std::string left;
  std::string right;
  std::optional<std::string> left_multiplicity;
  std::optional<std::string> right_multiplicity;
  ArrowParse arrow;
  std::optional<std::string> label;
};

std::optional<RelationshipLine> scan_relationship(std::string_view line) {
  Cursor c(line);
  RelationshipLine out;
  c.skip_space();
  auto left = c.name();
  if (!left) return std::nullopt;
  out.left = *left;
  c.skip_space();
  if (c.peek() == '"') {
    out.left_multiplicity = c.quoted();
    if (!out.left_multiplicity) return std::nullopt;
    c.skip_space();
  }
  auto arrow = parse_arrow(c);
  if (!arrow) return std::nullopt;
  out.arrow = *arrow;
  c.skip_space();
  if (c.peek() == '"') {
    out.right_multiplicity = c.quoted();
    if (!out.right_multiplicity) return std::nullopt;
    c.skip_space();
  }
  auto right = c.name();
  if (!right && out.right_multiplicity) {
    // `A -- "Line Item"`: the quoted token was the class name.
    right = std::move(out.right_multiplicity);
    out.right_multiplicity.reset();
  }
  if (!right) return std::nullopt;
  out.right = *right;
  c.skip_space();
  if (c.peek() == ':') {
    c.advance();
    auto label = std::string(trim(c.rest()));
    // drop reading-direction markers ("owns >", "< employs")
    if (label.starts_with("<") || label.starts_with(">")) label = std::string(trim(label.substr(1)));
    if (label.ends_with("<") || label.ends_with(">")) {
      label.pop_back();
      label = std::string(trim(label));
    }
    if (!label.empty()) out.label = label;
  } else if (!c.done()) {
    return std::nullopt;
  }
  return out;
}

bool is_block_end(const std::string& low) {
  return low == "end note" || low == "endnote" || low == "end legend" || low == "endlegend";
}

bool is_separator_line(std::string_view line) {
  if (line.size() < 2) return false;
  const char first = line.front();
  if (first != '-' && first != '.' && first != '=' && first != '_') return false;
  // "--", "..", "== Title ==", "__ group __"
  return line.substr(0, 2) == std::string(2, first);
}

class Parser {
 public:
  explicit Parser(std::string_view source) : lines_(split_lines(source)) {}

  PlantUmlParse run() {
    for (std::size_t i = 0; i < lines_.size(); ++i) {
      line_no_ = static_cast<int>(i) + 1;
      handle_line(trim(lines_[i]));
    }
    finish();
    return std::move(result_);
  }

 private:
  enum class Block { None, ClassBody, Skip, Note, Comment };

  void warn(std::string message, int line = 0) {
    result_.diagnostics.push_back({line > 0 ? line : line_no_, std::move(message), Severity::Warning});
  }
  void error(std::string message, int line = 0) {
    result_.diagnostics.push_back({line > 0 ? line : line_no_, std::move(message), Severity::Error});
  }

  int last_line() const { return std::max(1, static_cast<int>(lines_.size())); }

  std::string resolve(const std::string& name) const {
    auto it = aliases_.find(name);
    return it == aliases_.end() ? name : it->second;
  }

  UmlClass& class_named(const std::string& name) {
    auto it = class_index_.find(name);
    if (it != class_index_.end()) return result_.diagram.classes[it->second];
    class_index_.emplace(name, result_.diagram.classes.size());
    result_.diagram.classes.push_back(UmlClass{.name = name});
    return result_.diagram.classes.back();
  }

  void handle_line(std::string_view line) {
    switch (block_) {
      case Block::Comment:
        if (line.find("'/") != std::string_view::npos) block_ = Block::None;
        return;
      case Block::Note:
        if (is_block_end(lower(line))) block_ = Block::None;
        return;
      case Block::Skip:
        for (char ch : line) {
          if (ch == '{') ++skip_depth_;
          if (ch == '}') --skip_depth_;
        }
        if (skip_depth_ <= 0) block_ = Block::None;
        return;
      case Block::ClassBody:
        handle_body_line(line);
        return;
      case Block::None:
        break;
    }

    if (line.empty() || line.front() == '\'') return;
    if (line.starts_with("/'")) {
      if (line.find("'/", 2) == std::string_view::npos) block_ = Block::Comment;
      return;
    }

    const auto low = lower(line);
    if (low.starts_with("@startuml")) {
      if (saw_start_) warn("repeated @startuml");
      saw_start_ = true;
      return;
    }
    if (low.starts_with("@enduml")) {
      saw_end_ = true;
      return;
    }
    if (saw_end_) {
      warn("content after @enduml ignored");
      return;
    }
    if (line.front() == '!') {
      warn("preprocessor directive not supported: " + std::string(line));
      return;
    }
    if (try_class_declaration(line)) return;
    if (line.front() == '(') {
      warn("association class syntax not supported: " + std::string(line));
      return;
    }
    if (try_relationship(line)) return;
    if (starts_with_word(line, "title")) {
      auto text = trim(line.substr(5));
      if (!text.empty()) result_.diagram.title = std::string(text);
      return;
    }
    if (low == "left to right direction" || low == "top to bottom direction") return;
    for (std::string_view word : {"skinparam", "hide", "show", "scale", "set", "caption", "header",
                                  "footer", "legend", "allowmixing", "skin"}) {
      if (starts_with_word(line, word)) {
        if (line.back() == '{') {
          block_ = Block::Skip;
          skip_depth_ = 1;
        } else if (word == "legend") {
          warn("legend block ignored");
          block_ = Block::Note;
        }
        return;
      }
    }
    if (starts_with_word(line, "note")) {
      const bool single_line = line.find(':') != std::string_view::npos ||
                               low.find(" as ") != std::string::npos;
      warn("note ignored");
      if (!single_line) block_ = Block::Note;
      return;
    }
    for (std::string_view word : {"package", "namespace", "together", "rectangle", "folder", "frame"}) {
      if (starts_with_word(line, word)) {
        warn(std::string(word) + " grouping ignored; contents parsed normally");
        if (line.back() == '{') package_lines_.push_back(line_no_);
        return;
      }
    }
    if (line == "}") {
      if (package_lines_.empty()) {
        error("unbalanced closing brace");
      } else {
        package_lines_.pop_back();
      }
      return;
    }
    warn("unrecognized line: " + std::string(line));
  }

  bool try_class_declaration(std::string_view line) {
    Cursor c(line);
    bool is_abstract = false;
    std::string keyword;
    if (c.consume("abstract") && (c.done() || is_space(c.peek()))) {
      is_abstract = true;
      c.skip_space();
      if (c.consume("class") && !(c.done() || is_space(c.peek()))) return false;
      keyword = "class";
    } else {
      c = Cursor(line);
      for (std::string_view kw : {"class", "interface", "enum", "entity", "struct", "annotation"}) {
        Cursor probe(line);
        if (probe.consume(kw) && (probe.done() || is_space(probe.peek()))) {
          keyword = std::string(kw);
          c = probe;
          break;
        }
      }
      if (keyword.empty()) return false;
    }
    c.skip_space();
    auto name = c.name();
    if (!name || name->empty()) {
      warn("class declaration without a name");
      return true;
    }
    std::string display = *name;

    std::optional<std::string> stereotype;
    if (keyword == "interface" || keyword == "entity" || keyword == "struct" || keyword == "annotation") {
      stereotype = keyword;
    }
    std::vector<std::string> supertypes;

    for (;;) {
      c.skip_space();
      if (c.done() || c.peek() == '{') break;
      if (c.consume("<<")) {
        auto text = c.rest();
        auto close = text.find(">>");
        if (close == std::string_view::npos) {
          warn("unterminated stereotype");
          return true;
        }
        stereotype = std::string(trim(text.substr(0, close)));
        c.advance(close + 2);
      } else if (c.peek() == '<') {
        // generic parameters
        int depth = 0;
        do {
          if (c.peek() == '<') ++depth;
          if (c.peek() == '>') --depth;
          c.advance();
        } while (!c.done() && depth > 0);
      } else if (c.peek() == '#') {
        while (!c.done() && !is_space(c.peek()) && c.peek() != '{') c.advance();
      } else if (c.consume("as") && (is_space(c.peek()) || c.done())) {
        c.skip_space();
        auto alias = c.name();
        if (alias) aliases_[*alias] = display;
      } else if ((c.consume("extends") || c.consume("implements")) && (is_space(c.peek()))) {
        for (;;) {
          c.skip_space();
          auto super = c.name();
          if (!super) break;
          supertypes.push_back(*super);
          c.skip_space();
          if (!c.consume(",")) break;
        }
      } else {
        warn("unexpected text in class declaration: " + std::string(c.rest()));
        break;
      }
    }

    if (class_index_.contains(display)) warn("class '" + display + "' declared more than once; merged");
    auto& cls = class_named(display);
    cls.is_abstract = cls.is_abstract || is_abstract;
    cls.is_enumeration = cls.is_enumeration || keyword == "enum";
    if (stereotype) cls.stereotype = stereotype;
    for (auto& super : supertypes) {
      pending_relationships_.push_back(
          {Relationship{.source = display, .target = super, .kind = RelationshipKind::Generalization},
           line_no_});
    }

    if (c.peek() == '{') {
      c.advance();
      current_class_ = display;
      body_line_ = line_no_;
      block_ = Block::ClassBody;
      auto rest = trim(c.rest());
      if (!rest.empty()) handle_body_line(rest, /*inline_body=*/true);
    }
    return true;
  }

  void handle_body_line(std::string_view line, bool inline_body = false) {
    bool closes = false;
    if (!line.empty() && line.back() == '}') {
      const auto opens = std::count(line.begin(), line.end(), '{');
      const auto closes_count = std::count(line.begin(), line.end(), '}');
      if (closes_count > opens) {
        closes = true;
        line = trim(line.substr(0, line.size() - 1));
      }
    }
    if (!line.empty()) {
      if (inline_body) {
        std::size_t start = 0;
        while (start <= line.size()) {
          auto end = line.find(';', start);
          if (end == std::string_view::npos) end = line.size();
          add_member(trim(line.substr(start, end - start)));
          start = end + 1;
        }
      } else {
        add_member(line);
      }
    }
    if (closes) {
      block_ = Block::None;
      current_class_.clear();
    }
  }

  void add_member(std::string_view line) {
    if (line.empty() || line.front() == '\'' || is_separator_line(line)) return;
    auto& cls = class_named(current_class_);

    if (cls.is_enumeration) {
      std::size_t start = 0;
      while (start <= line.size()) {
        auto end = line.find(',', start);
        if (end == std::string_view::npos) end = line.size();
        auto item = trim(line.substr(start, end - start));
        if (!item.empty() && item.back() == ';') item = trim(item.substr(0, item.size() - 1));
        if (auto colon = item.find(':'); colon != std::string_view::npos) item = trim(item.substr(0, colon));
        if (auto paren = item.find('('); paren != std::string_view::npos) item = trim(item.substr(0, paren));
        if (!item.empty()) cls.attributes.push_back(UmlAttribute{.name = std::string(item)});
        start = end + 1;
      }
      return;
    }

    bool is_method = false;
    while (line.starts_with("{")) {
      auto close = line.find('}');
      if (close == std::string_view::npos) break;
      if (lower(line.substr(0, close + 1)) == "{method}") is_method = true;
      line = trim(line.substr(close + 1));
    }
    if (line.empty()) return;
    // A parenthesis before the type separator marks an operation; "x : VARCHAR(50)"
    // and "VARCHAR(50) x" are attributes.
    const auto paren = line.find('(');
    const auto colon = line.find(':');
    const bool call_shape =
        paren != std::string_view::npos && (colon != std::string_view::npos ? paren < colon : line.back() == ')');
    if (is_method || call_shape) {
      cls.operations.emplace_back(line);
      return;
    }

    UmlAttribute attr;
    if (line.front() == '+' || line.front() == '-' || line.front() == '#' || line.front() == '~') {
      attr.visibility = line.front();
      line = trim(line.substr(1));
    }
    if (!line.empty() && line.back() == ';') line = trim(line.substr(0, line.size() - 1));
    if (auto eq = line.find('='); eq != std::string_view::npos) line = trim(line.substr(0, eq));

    if (auto colon = line.find(':'); colon != std::string_view::npos) {
      attr.name = std::string(trim(line.substr(0, colon)));
      auto type = trim(line.substr(colon + 1));
      if (!type.empty()) attr.declared_type = std::string(type);
    } else {
      // Java style "Type name": the last token is the name
      auto last_space = line.find_last_of(" \t");
      if (last_space == std::string_view::npos) {
        attr.name = std::string(line);
      } else {
        attr.name = std::string(trim(line.substr(last_space + 1)));
        attr.declared_type = std::string(trim(line.substr(0, last_space)));
      }
    }
    if (attr.name.empty()) {
      warn("attribute without a name in class '" + current_class_ + "'");
      return;
    }
    cls.attributes.push_back(std::move(attr));
  }

  bool try_relationship(std::string_view line) {
    auto scanned = scan_relationship(line);
    if (!scanned) return false;

    const auto& arrow = scanned->arrow;
    Relationship rel;
    bool reversed = false;  // true when the right-hand name is the source

    if (arrow.left_head == "<|" || arrow.right_head == "|>") {
      rel.kind = RelationshipKind::Generalization;
      reversed = arrow.left_head == "<|";
    } else if (arrow.left_head == "*" || arrow.right_head == "*") {
      rel.kind = RelationshipKind::Composition;
      reversed = arrow.left_head != "*";
    } else if (arrow.left_head == "o" || arrow.right_head == "o") {
      rel.kind = RelationshipKind::Aggregation;
      reversed = arrow.left_head != "o";
    } else {
      rel.kind = RelationshipKind::Association;
      reversed = arrow.left_head == "<" && arrow.right_head != ">";
      auto known = [](const std::string& h) { return h.empty() || h == "<" || h == ">"; };
      if (!known(arrow.left_head) || !known(arrow.right_head)) {
        warn("arrow head '" + arrow.left_head + arrow.right_head + "' treated as association");
      } else if (arrow.dotted) {
        warn("dotted dependency arrow treated as association");
      }
    }

    auto left_mult = parse_multiplicity(scanned->left_multiplicity);
    auto right_mult = parse_multiplicity(scanned->right_multiplicity);
    auto left = resolve(scanned->left);
    auto right = resolve(scanned->right);
    if (reversed) {
      rel.source = right;
      rel.target = left;
      rel.source_multiplicity = right_mult;
      rel.target_multiplicity = left_mult;
    } else {
      rel.source = left;
      rel.target = right;
      rel.source_multiplicity = left_mult;
      rel.target_multiplicity = right_mult;
    }
    rel.label = scanned->label;
    if (rel.kind == RelationshipKind::Generalization &&
        (rel.source_multiplicity || rel.target_multiplicity)) {
      warn("multiplicity on generalization dropped");
      rel.source_multiplicity.reset();
      rel.target_multiplicity.reset();
    }
    pending_relationships_.push_back({std::move(rel), line_no_});
    return true;
  }

  std::optional<Multiplicity> parse_multiplicity(const std::optional<std::string>& text) {
    if (!text) return std::nullopt;
    auto m = Multiplicity::parse(*text);
    if (!m) warn("unrecognized multiplicity \"" + *text + "\" ignored");
    return m;
  }

  void finish() {
    if (block_ == Block::ClassBody) {
      error("unbalanced braces: body of class '" + current_class_ + "' opened here is never closed",
            body_line_);
    }
    for (int line : package_lines_) error("unbalanced braces: group opened here is never closed", line);

    for (auto& [rel, line] : pending_relationships_) {
      for (const auto* endpoint : {&rel.source, &rel.target}) {
        if (!class_index_.contains(*endpoint)) {
          warn("class '" + *endpoint + "' declared implicitly by a relationship", line);
          class_named(*endpoint);
        }
      }
      result_.diagram.relationships.push_back(std::move(rel));
    }

    if (!saw_start_) warn("missing @startuml fence", 1);
    if (!saw_end_) warn("missing @enduml fence", last_line());
  }

  std::vector<std::string_view> lines_;
  int line_no_ = 1;
  PlantUmlParse result_;
  Block block_ = Block::None;
  int skip_depth_ = 0;
  std::string current_class_;
  int body_line_ = 0;
  std::vector<int> package_lines_;
  bool saw_start_ = false;
  bool saw_end_ = false;
  std::map<std::string, std::size_t> class_index_;
  std::map<std::string, std::string> aliases_;
  std::vector<std::pair<Relationship, int>> pending_relationships_;
};

bool needs_quotes(std::string_view name) {
  if (name.empty()) return true;
  return !std::all_of(name.begin(), name.end(),
                      [](char c) { return is_name_char(static_cast<unsigned char>(c)); });
}

std::string quoted_name(std::string_view name) {
  return needs_quotes(name) ? "\"" + std::string(name) + "\"" : std::string(name);
}

std::string single_line(std::string_view text) {
  std::string out(text);
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

std::string_view arrow_for(RelationshipKind kind) {
  switch (kind) {
    case RelationshipKind::Association: return "--";
    case RelationshipKind::Aggregation: return "o--";
    case RelationshipKind::Composition: return "*--";
    case RelationshipKind::Generalization: return "--|>";
  }
  return "--";
}

}  // namespace

bool PlantUmlParse::has_errors() const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const ParseDiagnostic& d) { return d.severity == Severity::Error; });
}

PlantUmlParse parse_plantuml(std::string_view source) {
  return Parser(source).run();
}

std::string emit_plantuml(const UmlDiagram& diagram) {
  require_valid(diagram, "emit_plantuml");

  std::vector<const UmlClass*> classes;
  for (const auto& cls : diagram.classes) classes.push_back(&cls);
  std::sort(classes.begin(), classes.end(), [](const UmlClass* a, const UmlClass* b) {
    return std::forward_as_tuple(normalize_name(a->name), a->name) <
           std::forward_as_tuple(normalize_name(b->name), b->name);
  });

  using RelKey = std::tuple<std::string, std::string, RelationshipKind, std::string, std::string,
                            std::optional<Multiplicity>, std::optional<Multiplicity>,
                            std::optional<std::string>>;
  std::vector<std::pair<RelKey, const Relationship*>> rels;
  for (const auto& r : diagram.relationships) {
    rels.emplace_back(RelKey{normalize_name(r.source), normalize_name(r.target), r.kind, r.source,
                             r.target, r.source_multiplicity, r.target_multiplicity, r.label},
                      &r);
  }
  std::sort(rels.begin(), rels.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::string out = "@startuml\n";
  if (diagram.title) out += "title " + single_line(*diagram.title) + "\n";

  for (const auto* cls : classes) {
    const bool plain_interface = cls->stereotype == "interface" && !cls->is_abstract && !cls->is_enumeration;
    if (plain_interface) {
      out += "interface ";
    } else if (cls->is_enumeration) {
      out += "enum ";
    } else if (cls->is_abstract) {
      out += "abstract class ";
    } else {
      out += "class ";
    }
    out += quoted_name(cls->name);
    if (cls->stereotype && !plain_interface) out += " <<" + *cls->stereotype + ">>";
    out += " {\n";
    for (const auto& attr : cls->attributes) {
      out += "  ";
      if (!cls->is_enumeration && attr.visibility) out += *attr.visibility;
      out += attr.name;
      if (!cls->is_enumeration) {
        const bool has_space = attr.name.find_first_of(" \t") != std::string::npos;
        if (attr.declared_type) {
          out += " : " + *attr.declared_type;
        } else if (has_space) {
          out += " :";
        }
      }
      out += "\n";
    }
    for (const auto& op : cls->operations) out += "  " + single_line(op) + "\n";
    out += "}\n";
  }

  for (const auto& [key, r] : rels) {
    out += quoted_name(r->source);
    if (r->source_multiplicity) out += " \"" + r->source_multiplicity->to_string() + "\"";
    out += " ";
    out += arrow_for(r->kind);
    if (r->target_multiplicity) out += " \"" + r->target_multiplicity->to_string() + "\"";
    out += " " + quoted_name(r->target);
    if (r->label && !r->label->empty()) out += " : " + single_line(*r->label);
    out += "\n";
  }
  out += "@enduml\n";
  return out;
}

std::string extract_plantuml(std::string_view reply) {
  std::string_view text = reply;
  if (auto fence = text.find("```"); fence != std::string_view::npos) {
    auto body_start = text.find('\n', fence);
    if (body_start != std::string_view::npos) {
      auto close = text.find("```", body_start + 1);
      text = text.substr(body_start + 1,
                         close == std::string_view::npos ? std::string_view::npos : close - body_start - 1);
    }
  }
  auto start = text.find("@startuml");
  if (start == std::string_view::npos) return std::string(text);
  auto end = text.find("@enduml", start);
  if (end == std::string_view::npos) return std::string(text.substr(start));
  auto line_end = text.find('\n', end);
  return std::string(text.substr(start, line_end == std::string_view::npos ? std::string_view::npos
                                                                            : line_end - start + 1));
}

}  // namespace umlforge
