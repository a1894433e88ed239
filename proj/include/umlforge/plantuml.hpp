#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "umlforge/uml.hpp"

namespace umlforge {

enum class Severity { Warning, Error };

struct ParseDiagnostic {
  int line = 1;  // 1-based
  std::string message;
  Severity severity = Severity::Warning;
};

struct PlantUmlParse {
  UmlDiagram diagram;
  std::vector<ParseDiagnostic> diagnostics;

  bool has_errors() const;
};

/// Parses PlantUML class-diagram text. Never throws; unrecognized lines become
/// warnings and unbalanced braces become error diagnostics.
///
/// Arrow conventions: `A --|> B` makes A the subclass (source) and B the
/// superclass (target); `A *-- B` / `A o-- B` make A the whole (source);
/// `A --> B` and `A -- B` keep A as source, `A <-- B` makes B the source.
PlantUmlParse parse_plantuml(std::string_view source);

/// Deterministic canonical PlantUML for a valid diagram. Throws ValidationError otherwise.
std::string emit_plantuml(const UmlDiagram& diagram);

/// Cuts a PlantUML document out of a chatty LLM reply: fenced code block
/// contents, or the `@startuml`..`@enduml` span, or the text unchanged.
std::string extract_plantuml(std::string_view reply);

}  // namespace umlforge
