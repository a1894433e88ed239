#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "umlforge/uml.hpp"

namespace umlforge {

struct Column {
  std::string name;
  std::string sql_type;
  bool nullable = true;
  bool unique = false;
};

struct ForeignKey {
  std::vector<std::string> columns;
  std::string referenced_table;
  std::vector<std::string> referenced_columns;
};

struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::string> primary_key;
  std::vector<ForeignKey> foreign_keys;
  /// Multi-column UNIQUE constraints; single-column ones set Column::unique instead.
  std::vector<std::vector<std::string>> unique_constraints;

  const Column* find_column(std::string_view column) const;
};

struct RelationalSchema {
  std::vector<Table> tables;

  const Table* find_table(std::string_view table) const;
};

struct DdlParse {
  RelationalSchema schema;
  std::vector<std::string> warnings;
};

/// Parses `CREATE TABLE` statements. Column constraints NOT NULL / NULL / UNIQUE /
/// PRIMARY KEY / REFERENCES / DEFAULT and table constraints PRIMARY KEY / UNIQUE /
/// FOREIGN KEY are understood; indexes, checks and other statements are skipped
/// with a warning. Throws DdlError on malformed statements or references to
/// undeclared tables.
DdlParse parse_ddl(std::string_view sql_text);

/// Structural problems of a schema (duplicate tables, dangling keys, arity mismatches).
std::vector<std::string> check_schema(const RelationalSchema& schema);

/// Tables that only realize a many-to-many link: exactly two foreign keys, no
/// column outside those keys, and a primary key equal to the union of their columns.
std::set<std::string> detect_join_tables(const RelationalSchema& schema);

struct Cardinality {
  Multiplicity referenced;  // end at the referenced table
  Multiplicity owning;      // end at the table declaring the foreign key
};

/// unique + NOT NULL  -> (1..1, 1..1)
/// NOT NULL           -> (1..1, 0..*)
/// nullable variants lower the referenced end to 0.
Cardinality infer_cardinality(const ForeignKey& fk, const Table& owning_table);

/// Gold diagram for a schema: one class per non-join table (foreign-key columns
/// are not attributes), one association per foreign key from referenced to owning
/// class, one 0..* / 0..* association per join table labeled with its name.
UmlDiagram reverse_engineer(const RelationalSchema& schema);

}  // namespace umlforge
