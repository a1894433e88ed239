#include "umlforge/schema.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <stdexcept>

#include "umlforge/errors.hpp"

namespace umlforge {
namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

std::string fold(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool same_identifier(std::string_view a, std::string_view b) { return fold(a) == fold(b); }

enum class TokenKind { Word, Quoted, Number, String, Punct };

struct Token {
  TokenKind kind;
  std::string text;
  int line;
};

std::vector<Token> tokenize(std::string_view sql) {
  std::vector<Token> tokens;
  int line = 1;
  std::size_t i = 0;
  auto at = [&](std::size_t k) { return k < sql.size() ? sql[k] : '\0'; };
  while (i < sql.size()) {
    const char c = sql[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
    } else if ((c == '-' && at(i + 1) == '-') || c == '#') {
      while (i < sql.size() && sql[i] != '\n') ++i;
    } else if (c == '/' && at(i + 1) == '*') {
      const int start = line;
      i += 2;
      while (i < sql.size() && !(sql[i] == '*' && at(i + 1) == '/')) {
        if (sql[i] == '\n') ++line;
        ++i;
      }
      if (i >= sql.size()) throw DdlError("unterminated block comment", start);
      i += 2;
    } else if (c == '"' || c == '`' || c == '[') {
      const char close = c == '[' ? ']' : c;
      const int start = line;
      std::string text;
      ++i;
      while (i < sql.size() && sql[i] != close) {
        if (sql[i] == '\n') ++line;
        text.push_back(sql[i++]);
      }
      if (i >= sql.size()) throw DdlError("unterminated quoted identifier", start);
      ++i;
      tokens.push_back({TokenKind::Quoted, std::move(text), start});
    } else if (c == '\'') {
      const int start = line;
      std::string text;
      ++i;
      for (;;) {
        if (i >= sql.size()) throw DdlError("unterminated string literal", start);
        if (sql[i] == '\'') {
          if (at(i + 1) == '\'') {
            text.push_back('\'');
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (sql[i] == '\n') ++line;
        text.push_back(sql[i++]);
      }
      tokens.push_back({TokenKind::String, std::move(text), start});
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
               static_cast<unsigned char>(c) >= 0x80) {
      std::size_t j = i;
      while (j < sql.size() && (std::isalnum(static_cast<unsigned char>(sql[j])) || sql[j] == '_' ||
                                sql[j] == '$' || static_cast<unsigned char>(sql[j]) >= 0x80)) {
        ++j;
      }
      tokens.push_back({TokenKind::Word, std::string(sql.substr(i, j - i)), line});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < sql.size() && (std::isdigit(static_cast<unsigned char>(sql[j])) || sql[j] == '.')) ++j;
      tokens.push_back({TokenKind::Number, std::string(sql.substr(i, j - i)), line});
      i = j;
    } else {
      tokens.push_back({TokenKind::Punct, std::string(1, c), line});
      ++i;
    }
  }
  return tokens;
}

class StatementParser {
 public:
  StatementParser(std::vector<Token> tokens, std::vector<std::string>& warnings)
      : tokens_(std::move(tokens)), warnings_(warnings) {}

  /// Returns the table for CREATE TABLE statements, nullopt for skipped ones.
  std::optional<Table> parse() {
    if (tokens_.empty()) return std::nullopt;
    const int line = tokens_.front().line;
    if (!is_keyword("CREATE")) {
      warn("skipped unsupported statement " + upper(peek().text), line);
      return std::nullopt;
    }
    advance();
    while (is_keyword("TEMPORARY") || is_keyword("TEMP") || is_keyword("OR") || is_keyword("REPLACE")) {
      advance();
    }
    if (!is_keyword("TABLE")) {
      warn("skipped CREATE " + (done() ? std::string() : upper(peek().text)) + " statement", line);
      return std::nullopt;
    }
    advance();
    if (is_keyword("IF")) {
      advance();
      expect_keyword("NOT");
      expect_keyword("EXISTS");
    }

    Table table;
    table.name = qualified_name();
    if (is_keyword("AS")) throw DdlError("CREATE TABLE ... AS SELECT is not supported", line);
    expect_punct("(");
    std::optional<std::string> inline_pk;
    bool table_pk = false;

    for (;;) {
      parse_element(table, inline_pk, table_pk);
      if (is_punct(",")) {
        advance();
        continue;
      }
      expect_punct(")");
      break;
    }
    // Trailing table options (ENGINE=..., WITHOUT ROWID) are ignored.

    if (inline_pk) table.primary_key = {*inline_pk};
    finish_table(table, line);
    return table;
  }

 private:
  bool done() const { return pos_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const {
    static const Token end{TokenKind::Punct, "", 0};
    return pos_ + ahead < tokens_.size() ? tokens_[pos_ + ahead] : end;
  }
  int line() const { return done() ? (tokens_.empty() ? 0 : tokens_.back().line) : peek().line; }
  void advance() { ++pos_; }

  bool is_keyword(std::string_view kw, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return t.kind == TokenKind::Word && upper(t.text) == kw;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    const auto& t = peek(ahead);
    return t.kind == TokenKind::Punct && t.text == p;
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw DdlError(message + (done() ? " at end of statement" : " near '" + peek().text + "'"), line());
  }

  void expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail("expected " + std::string(kw));
    advance();
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    advance();
  }

  std::string identifier() {
    const auto& t = peek();
    if (t.kind != TokenKind::Word && t.kind != TokenKind::Quoted) fail("expected identifier");
    std::string name = t.text;
    advance();
    return name;
  }

  // schema.table -> table
  std::string qualified_name() {
    auto name = identifier();
    while (is_punct(".")) {
      advance();
      name = identifier();
    }
    return name;
  }

  std::vector<std::string> column_list() {
    expect_punct("(");
    std::vector<std::string> names;
    for (;;) {
      names.push_back(identifier());
      // MySQL prefix lengths and sort orders: col(10) ASC
      if (is_punct("(")) skip_parenthesized();
      if (is_keyword("ASC") || is_keyword("DESC")) advance();
      if (is_punct(",")) {
        advance();
        continue;
      }
      expect_punct(")");
      return names;
    }
  }

  void skip_parenthesized() {
    expect_punct("(");
    int depth = 1;
    while (!done() && depth > 0) {
      if (is_punct("(")) ++depth;
      if (is_punct(")")) --depth;
      advance();
    }
    if (depth > 0) fail("unbalanced parentheses");
  }

  void skip_referential_actions() {
    for (;;) {
      if (is_keyword("ON") && (is_keyword("DELETE", 1) || is_keyword("UPDATE", 1))) {
        advance();
        advance();
        if (is_keyword("SET") || is_keyword("NO")) advance();
        advance();  // CASCADE / RESTRICT / NULL / DEFAULT / ACTION
      } else if (is_keyword("MATCH")) {
        advance();
        advance();
      } else if (is_keyword("DEFERRABLE") || is_keyword("INITIALLY") || is_keyword("DEFERRED") ||
                 is_keyword("IMMEDIATE")) {
        advance();
      } else if (is_keyword("NOT") && is_keyword("DEFERRABLE", 1)) {
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  ForeignKey references_clause(std::vector<std::string> columns) {
    expect_keyword("REFERENCES");
    ForeignKey fk;
    fk.columns = std::move(columns);
    fk.referenced_table = qualified_name();
    if (is_punct("(")) fk.referenced_columns = column_list();
    skip_referential_actions();
    return fk;
  }

  void parse_element(Table& table, std::optional<std::string>& inline_pk, bool& table_pk) {
    if (is_keyword("CONSTRAINT")) {
      advance();
      identifier();
    }
    if (is_keyword("PRIMARY")) {
      advance();
      expect_keyword("KEY");
      if (table_pk || inline_pk) fail("more than one primary key");
      table.primary_key = column_list();
      table_pk = true;
      return;
    }
    if (is_keyword("FOREIGN")) {
      advance();
      expect_keyword("KEY");
      auto columns = column_list();
      table.foreign_keys.push_back(references_clause(std::move(columns)));
      return;
    }
    if (is_keyword("UNIQUE") && !is_punct(",", 1) && !is_punct(")", 1)) {
      advance();
      if (is_keyword("KEY") || is_keyword("INDEX")) advance();
      if (!is_punct("(")) identifier();
      auto columns = column_list();
      table.unique_constraints.push_back(std::move(columns));
      return;
    }
    if (is_keyword("CHECK")) {
      advance();
      skip_parenthesized();
      warn("CHECK constraint skipped in table " + table.name, line());
      return;
    }
    if ((is_keyword("INDEX") || is_keyword("KEY") || is_keyword("FULLTEXT") || is_keyword("SPATIAL")) &&
        (is_punct("(", 1) || ((peek(1).kind == TokenKind::Word || peek(1).kind == TokenKind::Quoted) &&
                              is_punct("(", 2)) ||
         is_keyword("KEY", 1) || is_keyword("INDEX", 1))) {
      advance();
      if (is_keyword("KEY") || is_keyword("INDEX")) advance();
      if (!is_punct("(")) identifier();
      column_list();
      warn("index definition skipped in table " + table.name, line());
      return;
    }
    parse_column(table, inline_pk);
  }

  static bool starts_constraint(const Token& t) {
    if (t.kind == TokenKind::Punct) return t.text == "," || t.text == ")";
    if (t.kind != TokenKind::Word) return false;
    static const char* kKeywords[] = {"NOT",     "NULL",          "PRIMARY",  "UNIQUE",  "REFERENCES",
                                      "DEFAULT", "CHECK",         "CONSTRAINT", "AUTO_INCREMENT",
                                      "AUTOINCREMENT", "IDENTITY", "COLLATE",  "GENERATED", "COMMENT",
                                      "ON",      "KEY"};
    const auto u = upper(t.text);
    return std::any_of(std::begin(kKeywords), std::end(kKeywords), [&](const char* k) { return u == k; });
  }

  void parse_column(Table& table, std::optional<std::string>& inline_pk) {
    Column column;
    column.name = identifier();

    std::string type;
    while (!done() && !starts_constraint(peek())) {
      if (is_punct("(")) {
        const auto start = pos_;
        skip_parenthesized();
        for (auto k = start; k < pos_; ++k) {
          const auto& t = tokens_[k];
          type += t.kind == TokenKind::String ? "'" + t.text + "'" : t.text;
          if (t.text == ",") type += " ";
        }
        // "DECIMAL(10, 2)" -> "DECIMAL(10,2)"
        std::erase(type, ' ');
        continue;
      }
      if (peek().kind != TokenKind::Word && peek().kind != TokenKind::Quoted) fail("unexpected token in column type");
      if (!type.empty()) type += ' ';
      type += peek().text;
      advance();
    }
    column.sql_type = type;

    bool inline_primary = false;
    while (!done() && !is_punct(",") && !is_punct(")")) {
      if (is_keyword("NOT")) {
        advance();
        expect_keyword("NULL");
        column.nullable = false;
      } else if (is_keyword("NULL")) {
        advance();
        column.nullable = true;
      } else if (is_keyword("PRIMARY")) {
        advance();
        expect_keyword("KEY");
        if (is_keyword("ASC") || is_keyword("DESC")) advance();
        inline_primary = true;
      } else if (is_keyword("KEY")) {
        // MySQL shorthand for PRIMARY KEY inside a column definition
        advance();
        inline_primary = true;
      } else if (is_keyword("UNIQUE")) {
        advance();
        if (is_keyword("KEY")) advance();
        column.unique = true;
      } else if (is_keyword("REFERENCES")) {
        table.foreign_keys.push_back(references_clause({column.name}));
      } else if (is_keyword("DEFAULT")) {
        advance();
        if (is_punct("(")) {
          skip_parenthesized();
        } else {
          if (is_punct("-") || is_punct("+")) advance();
          if (done()) fail("DEFAULT without a value");
          advance();
          if (is_punct("(")) skip_parenthesized();  // DEFAULT now()
        }
      } else if (is_keyword("CHECK")) {
        advance();
        skip_parenthesized();
        warn("CHECK constraint on column " + column.name + " skipped", line());
      } else if (is_keyword("CONSTRAINT")) {
        advance();
        identifier();
      } else if (is_keyword("AUTO_INCREMENT") || is_keyword("AUTOINCREMENT")) {
        advance();
      } else if (is_keyword("IDENTITY")) {
        advance();
        if (is_punct("(")) skip_parenthesized();
      } else if (is_keyword("COLLATE")) {
        advance();
        identifier();
      } else if (is_keyword("COMMENT")) {
        advance();
        if (peek().kind != TokenKind::String) fail("expected comment string");
        advance();
      } else if (is_keyword("ON") && is_keyword("UPDATE", 1)) {
        advance();
        advance();
        advance();
        if (is_punct("(")) skip_parenthesized();
      } else if (is_keyword("GENERATED")) {
        warn("generated column clause on " + column.name + " skipped", line());
        while (!done() && !is_punct(",") && !is_punct(")")) {
          if (is_punct("(")) {
            skip_parenthesized();
          } else {
            advance();
          }
        }
      } else {
        fail("unexpected token in definition of column " + column.name);
      }
    }

    if (inline_primary) {
      if (inline_pk) fail("more than one inline primary key");
      inline_pk = column.name;
    }
    table.columns.push_back(std::move(column));
  }

  void finish_table(Table& table, int line) {
    if (table.columns.empty()) throw DdlError("table " + table.name + " has no columns", line);
    auto resolve = [&](std::string& name, std::string_view what) {
      for (const auto& c : table.columns) {
        if (same_identifier(c.name, name)) {
          name = c.name;
          return;
        }
      }
      throw DdlError(std::string(what) + " column " + name + " is not a column of " + table.name, line);
    };
    for (auto& name : table.primary_key) resolve(name, "primary key");
    for (auto& fk : table.foreign_keys) {
      for (auto& name : fk.columns) resolve(name, "foreign key");
    }
    for (auto& unique : table.unique_constraints) {
      for (auto& name : unique) resolve(name, "unique");
    }
    for (auto& column : table.columns) {
      if (std::find(table.primary_key.begin(), table.primary_key.end(), column.name) != table.primary_key.end()) {
        column.nullable = false;
        if (table.primary_key.size() == 1) column.unique = true;
      }
    }
    auto& constraints = table.unique_constraints;
    for (auto it = constraints.begin(); it != constraints.end();) {
      if (it->size() == 1) {
        for (auto& column : table.columns) {
          if (column.name == it->front()) column.unique = true;
        }
        it = constraints.erase(it);
      } else {
        ++it;
      }
    }
  }

  void warn(std::string message, int line) {
    warnings_.push_back("line " + std::to_string(line) + ": " + std::move(message));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string>& warnings_;
};

bool is_subset(const std::vector<std::string>& key, const std::vector<std::string>& columns) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [&](const std::string& k) {
    return std::find(columns.begin(), columns.end(), k) != columns.end();
  });
}

}  // namespace

const Column* Table::find_column(std::string_view column) const {
  for (const auto& c : columns) {
    if (same_identifier(c.name, column)) return &c;
  }
  return nullptr;
}

const Table* RelationalSchema::find_table(std::string_view table) const {
  for (const auto& t : tables) {
    if (same_identifier(t.name, table)) return &t;
  }
  return nullptr;
}

DdlParse parse_ddl(std::string_view sql_text) {
  DdlParse result;
  auto tokens = tokenize(sql_text);

  std::vector<Token> statement;
  std::vector<int> table_lines;  // first line of each table's statement
  int depth = 0;
  auto flush = [&] {
    if (statement.empty()) return;
    const int line = statement.front().line;
    auto table = StatementParser(std::move(statement), result.warnings).parse();
    statement.clear();
    if (!table) return;
    if (result.schema.find_table(table->name)) {
      throw DdlError("duplicate table " + table->name, line);
    }
    result.schema.tables.push_back(std::move(*table));
    table_lines.push_back(line);
  };
  for (auto& token : tokens) {
    if (token.kind == TokenKind::Punct) {
      if (token.text == "(") ++depth;
      if (token.text == ")") --depth;
      if (token.text == ";" && depth <= 0) {
        if (depth < 0) throw DdlError("unbalanced parentheses", token.line);
        flush();
        depth = 0;
        continue;
      }
    }
    statement.push_back(std::move(token));
  }
  if (depth != 0) throw DdlError("unbalanced parentheses at end of input", 0);
  flush();

  // Resolve references now that every table is known (forward references are allowed).
  for (std::size_t t = 0; t < result.schema.tables.size(); ++t) {
    auto& table = result.schema.tables[t];
    const int line = table_lines[t];
    for (auto& fk : table.foreign_keys) {
      const auto* target = result.schema.find_table(fk.referenced_table);
      if (!target) {
        throw DdlError("table " + table.name + " references undeclared table " + fk.referenced_table, line);
      }
      fk.referenced_table = target->name;
      if (fk.referenced_columns.empty()) {
        if (target->primary_key.empty()) {
          throw DdlError("foreign key in " + table.name + " references " + target->name +
                             ", which has no primary key",
                         line);
        }
        fk.referenced_columns = target->primary_key;
      }
      for (auto& column : fk.referenced_columns) {
        const auto* c = target->find_column(column);
        if (!c) throw DdlError("foreign key in " + table.name + " references unknown column " + target->name + "." + column, line);
        column = c->name;
      }
      if (fk.columns.size() != fk.referenced_columns.size()) {
        throw DdlError("foreign key in " + table.name + " has mismatched column counts", line);
      }
    }
  }
  return result;
}

std::vector<std::string> check_schema(const RelationalSchema& schema) {
  std::vector<std::string> problems;
  std::set<std::string> names;
  for (const auto& table : schema.tables) {
    if (!names.insert(fold(table.name)).second) problems.push_back("duplicate table " + table.name);
    for (const auto& pk : table.primary_key) {
      const auto* c = table.find_column(pk);
      if (!c) {
        problems.push_back("primary key column " + table.name + "." + pk + " does not exist");
      } else if (c->nullable) {
        problems.push_back("primary key column " + table.name + "." + pk + " is nullable");
      }
    }
    for (const auto& fk : table.foreign_keys) {
      if (fk.columns.size() != fk.referenced_columns.size()) {
        problems.push_back("foreign key in " + table.name + " has mismatched column counts");
      }
      for (const auto& c : fk.columns) {
        if (!table.find_column(c)) problems.push_back("foreign key column " + table.name + "." + c + " does not exist");
      }
      const auto* target = schema.find_table(fk.referenced_table);
      if (!target) {
        problems.push_back(table.name + " references undeclared table " + fk.referenced_table);
        continue;
      }
      for (const auto& c : fk.referenced_columns) {
        if (!target->find_column(c)) {
          problems.push_back("referenced column " + target->name + "." + c + " does not exist");
        }
      }
    }
  }
  return problems;
}

std::set<std::string> detect_join_tables(const RelationalSchema& schema) {
  std::set<std::string> joins;
  for (const auto& table : schema.tables) {
    if (table.foreign_keys.size() != 2) continue;
    std::set<std::string> fk_columns;
    for (const auto& fk : table.foreign_keys) fk_columns.insert(fk.columns.begin(), fk.columns.end());
    const bool only_key_columns = std::all_of(table.columns.begin(), table.columns.end(),
                                              [&](const Column& c) { return fk_columns.contains(c.name); });
    const std::set<std::string> pk(table.primary_key.begin(), table.primary_key.end());
    if (only_key_columns && pk == fk_columns) joins.insert(table.name);
  }
  return joins;
}

Cardinality infer_cardinality(const ForeignKey& fk, const Table& owning_table) {
  bool nullable = false;
  bool single_unique = false;
  for (const auto& name : fk.columns) {
    const auto* column = owning_table.find_column(name);
    if (!column) {
      throw std::invalid_argument("foreign key column " + name + " is not in table " + owning_table.name);
    }
    nullable = nullable || column->nullable;
    single_unique = fk.columns.size() == 1 && column->unique;
  }
  bool unique = single_unique || is_subset(owning_table.primary_key, fk.columns);
  for (const auto& key : owning_table.unique_constraints) unique = unique || is_subset(key, fk.columns);

  Cardinality result;
  result.referenced = nullable ? Multiplicity::range(0, 1) : Multiplicity::exactly(1);
  result.owning = unique ? Multiplicity::exactly(1) : Multiplicity::at_least(0);
  return result;
}

UmlDiagram reverse_engineer(const RelationalSchema& schema) {
  if (auto problems = check_schema(schema); !problems.empty()) {
    std::string message = "invalid schema";
    for (const auto& p : problems) message += "; " + p;
    throw ValidationError(message);
  }
  const auto joins = detect_join_tables(schema);

  UmlDiagram diagram;
  for (const auto& table : schema.tables) {
    if (joins.contains(table.name)) continue;
    std::set<std::string> fk_columns;
    for (const auto& fk : table.foreign_keys) fk_columns.insert(fk.columns.begin(), fk.columns.end());
    UmlClass cls{.name = table.name};
    for (const auto& column : table.columns) {
      if (fk_columns.contains(column.name)) continue;
      UmlAttribute attr{.name = column.name};
      if (!column.sql_type.empty()) attr.declared_type = column.sql_type;
      cls.attributes.push_back(std::move(attr));
    }
    diagram.classes.push_back(std::move(cls));
  }

  for (const auto& table : schema.tables) {
    if (joins.contains(table.name)) {
      const auto& a = table.foreign_keys[0];
      const auto& b = table.foreign_keys[1];
      for (const auto* fk : {&a, &b}) {
        if (joins.contains(fk->referenced_table)) {
          throw ValidationError("join table " + table.name + " references join table " + fk->referenced_table);
        }
      }
      diagram.relationships.push_back(Relationship{.source = a.referenced_table,
                                                   .target = b.referenced_table,
                                                   .kind = RelationshipKind::Association,
                                                   .source_multiplicity = Multiplicity::at_least(0),
                                                   .target_multiplicity = Multiplicity::at_least(0),
                                                   .label = table.name});
      continue;
    }
    for (const auto& fk : table.foreign_keys) {
      if (joins.contains(fk.referenced_table)) {
        throw ValidationError("table " + table.name + " references join table " + fk.referenced_table);
      }
      const auto card = infer_cardinality(fk, table);
      diagram.relationships.push_back(Relationship{.source = fk.referenced_table,
                                                   .target = table.name,
                                                   .kind = RelationshipKind::Association,
                                                   .source_multiplicity = card.referenced,
                                                   .target_multiplicity = card.owning});
    }
  }
  return diagram;
}

}  // namespace umlforge
