// JSON documents cross the boundary as strings; the Python package decodes them.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "umlforge/cli.hpp"
#include "umlforge/errors.hpp"
#include "umlforge/evaluator.hpp"
#include "umlforge/model_json.hpp"
#include "umlforge/plantuml.hpp"
#include "umlforge/reqgen.hpp"
#include "umlforge/schema.hpp"

namespace py = pybind11;
using namespace umlforge;

namespace {

UmlDiagram parse_strict(const std::string& text) {
  auto p = parse_plantuml(text);
  if (p.has_errors()) {
    std::string msg = "PlantUML has errors:";
    for (const auto& d : p.diagnostics) {
      if (d.severity == Severity::Error) msg += "\n  line " + std::to_string(d.line) + ": " + d.message;
    }
    throw Error(msg);
  }
  return std::move(p.diagram);
}

std::string model_json(const UmlDiagram& d) { return from_diagram(d).document.dump(); }

}  // namespace

PYBIND11_MODULE(_umlforge, m) {
  m.doc() = "Class-diagram tooling: PlantUML, reverse engineering, requirements, evaluation";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ValidationError>(m, "ValidationError", base);
  py::register_exception<DdlError>(m, "DdlError", base);
  py::register_exception<BackendError>(m, "BackendError", base);
  py::register_exception<FormatError>(m, "FormatError", base);
  py::register_exception<SchemaError>(m, "SchemaError", base);
  py::register_exception<ConfigError>(m, "ConfigError", base);
  py::register_exception<StageError>(m, "StageError", base);

  m.def("normalize_name", [](const std::string& s) { return normalize_name(s); });

  m.def(
      "parse_plantuml",
      [](const std::string& text) {
        auto p = parse_plantuml(text);
        std::vector<py::tuple> diagnostics;
        for (const auto& d : p.diagnostics) {
          diagnostics.push_back(py::make_tuple(d.line, d.message, d.severity == Severity::Error ? "error" : "warning"));
        }
        // An invalid diagram has no canonical model; report it through the diagnostics only.
        std::string model = validate(p.diagram).empty() ? model_json(p.diagram) : std::string("null");
        return py::make_tuple(model, diagnostics);
      },
      py::arg("text"));

  m.def(
      "emit_plantuml",
      [](const std::string& model) { return emit_plantuml(to_diagram({nlohmann::json::parse(model)})); },
      py::arg("model_json"));

  m.def(
      "reverse_engineer",
      [](const std::string& sql) {
        const auto parsed = parse_ddl(sql);
        return py::make_tuple(model_json(reverse_engineer(parsed.schema)), parsed.warnings);
      },
      py::arg("sql"));

  m.def(
      "generate_requirements",
      [](const std::string& plantuml, const std::string& config) {
        const auto cfg = ReqGenConfig::from_json(nlohmann::json::parse(config));
        const auto reqs = generate_requirements(parse_strict(plantuml), cfg);
        return py::make_tuple(render_document(reqs), trace_sidecar(reqs).dump());
      },
      py::arg("plantuml"), py::arg("config_json"));

  m.def(
      "evaluate",
      [](const std::string& gold, const std::string& generated) {
        return evaluate(parse_strict(gold), parse_strict(generated)).to_json().dump();
      },
      py::arg("gold"), py::arg("generated"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
