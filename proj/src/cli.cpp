#include "umlforge/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "umlforge/errors.hpp"
#include "umlforge/evaluator.hpp"
#include "umlforge/model_json.hpp"
#include "umlforge/pipeline.hpp"
#include "umlforge/plantuml.hpp"
#include "umlforge/reqgen.hpp"
#include "umlforge/schema.hpp"

namespace umlforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Input problems that map to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_text(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw InputError("file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

void write_json(const fs::path& path, const json& value) { write_text(path, value.dump(2) + "\n"); }

UmlDiagram load_diagram(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw InputError("file not found: " + path.string());
  try {
    return load_diagram_file(path.string());
  } catch (const Error& e) {
    throw InputError(e.what());
  }
}

// "out/northwind.puml" and "out/northwind" both name the prefix "out/northwind".
fs::path output_prefix(fs::path out) {
  const auto ext = out.extension();
  if (ext == ".puml" || ext == ".json" || ext == ".txt") out.replace_extension();
  return out;
}

fs::path with_suffix(const fs::path& prefix, std::string_view suffix) {
  return prefix.parent_path() / (prefix.filename().string() + std::string(suffix));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

int cmd_reverse(const fs::path& sql_path, const fs::path& out, std::ostream& os, std::ostream& es) {
  const auto sql = read_text(sql_path);
  DdlParse parsed;
  UmlDiagram diagram;
  try {
    parsed = parse_ddl(sql);
    diagram = reverse_engineer(parsed.schema);
  } catch (const Error& e) {
    throw InputError(sql_path.string() + ": " + e.what());
  }
  for (const auto& w : parsed.warnings) es << sql_path.string() << ": warning: " << w << "\n";
  const auto prefix = output_prefix(out);
  write_text(with_suffix(prefix, ".puml"), emit_plantuml(diagram));
  write_json(with_suffix(prefix, ".json"), from_diagram(diagram).document);
  os << "wrote " << diagram.classes.size() << " classes, " << diagram.relationships.size() << " relationships to "
     << with_suffix(prefix, ".{puml,json}").string() << "\n";
  return kExitOk;
}

int cmd_reqgen(const fs::path& diagram_path, const std::optional<fs::path>& config_path,
               const std::optional<fs::path>& out, std::ostream& os) {
  ReqGenConfig config;
  if (config_path) {
    const auto text = read_text(*config_path);
    auto document = json::parse(text, nullptr, false);
    if (document.is_discarded()) throw ConfigError(config_path->string() + ": invalid JSON");
    config = ReqGenConfig::from_json(document);
  }
  const auto diagram = load_diagram(diagram_path);
  std::vector<Requirement> requirements;
  try {
    requirements = generate_requirements(diagram, config);
  } catch (const ValidationError& e) {
    throw InputError(diagram_path.string() + ": " + e.what());
  }
  const auto document = render_document(requirements);
  const auto trace = trace_sidecar(requirements);
  if (out) {
    const auto prefix = output_prefix(*out);
    write_text(with_suffix(prefix, ".txt"), document);
    write_json(with_suffix(prefix, ".trace.json"), trace);
  } else {
    os << document;
  }
  return kExitOk;
}

struct GenerateFlags {
  std::optional<std::string> backend;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<double> temperature;
  std::optional<int> max_tokens;
  std::optional<bool> verify;
  std::optional<fs::path> fixtures;
  std::optional<fs::path> prompts;
  std::optional<fs::path> config;
};

int cmd_generate(const fs::path& requirements_path, const fs::path& out_dir, const GenerateFlags& flags,
                 std::ostream& os, std::ostream& es) {
  RunConfig config;
  if (flags.config) load_run_config(*flags.config, config);
  if (flags.backend) {
    auto kind = parse_backend_kind(*flags.backend);
    if (!kind) throw ConfigError("unknown backend \"" + *flags.backend + "\" (expected http, mock or record)");
    config.backend = *kind;
  }
  if (flags.endpoint) config.endpoint = flags.endpoint;
  if (flags.model) config.model_name = flags.model;
  if (flags.temperature) config.temperature = *flags.temperature;
  if (flags.max_tokens) config.max_tokens = *flags.max_tokens;
  if (flags.verify) config.verify = *flags.verify;
  if (flags.fixtures) config.fixture_dir = flags.fixtures;
  if (flags.prompts) config.prompt_dir = flags.prompts;
  config.check();

  std::optional<std::string> api_key;
  if (const char* key = std::getenv("NOMAD_API_KEY"); key && *key) api_key = key;

  const auto requirements = read_text(requirements_path);
  if (requirements.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw InputError(requirements_path.string() + ": requirements file is empty");
  }

  std::unique_ptr<LlmBackend> inner;
  auto backend = make_backend(config, api_key, inner);
  std::optional<PromptSet> prompts;
  if (config.prompt_dir) prompts = PromptSet::load(*config.prompt_dir);

  PipelineOptions options;
  options.generation = {config.temperature, config.max_tokens};
  options.prompts = prompts ? &*prompts : nullptr;
  const auto result = run_pipeline(requirements, *backend, config.verify, options);

  fs::create_directories(out_dir);
  write_json(out_dir / "01_concepts.json", result.concepts.to_json());
  write_json(out_dir / "02_relationships.json", result.relationships.to_json());
  write_json(out_dir / "03_model.json", result.model.document);
  write_text(out_dir / "04_diagram.puml", result.plantuml);
  if (result.verified_plantuml) {
    write_text(out_dir / "05_verified.puml", *result.verified_plantuml);
  } else {
    fs::remove(out_dir / "05_verified.puml");
  }
  write_json(out_dir / "transcript.json", result.transcript_json());

  for (const auto& entry : result.transcript) {
    for (const auto& note : entry.notes) es << entry.stage << ": " << note << "\n";
  }
  const auto diagram = result.final_diagram();
  os << "generated " << diagram.classes.size() << " classes, " << diagram.relationships.size()
     << " relationships in " << result.transcript.size() << " stages; bundle written to " << out_dir.string()
     << "\n";
  return kExitOk;
}

// Gold and generated diagrams of one batch case: gold.{puml,json} and generated.{puml,json}.
std::optional<fs::path> find_case_file(const fs::path& dir, std::string_view stem) {
  for (auto ext : {".puml", ".json"}) {
    auto p = dir / (std::string(stem) + ext);
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

int cmd_eval(const std::optional<fs::path>& gold_path, const std::optional<fs::path>& gen_path,
             const std::optional<fs::path>& annotations_path, const std::optional<fs::path>& batch_dir,
             const std::optional<fs::path>& out, bool taxonomy, std::ostream& os) {
  auto annotations_of = [](const fs::path& path) {
    if (!fs::is_regular_file(path)) throw InputError("file not found: " + path.string());
    try {
      return load_annotations(path);
    } catch (const Error& e) {
      throw InputError(e.what());
    }
  };

  if (batch_dir) {
    if (gold_path || gen_path) throw ConfigError("--batch takes no positional diagram arguments");
    if (!fs::is_directory(*batch_dir)) throw InputError("file not found: " + batch_dir->string());
    std::vector<fs::path> cases;
    for (const auto& entry : fs::directory_iterator(*batch_dir)) {
      if (entry.is_directory()) cases.push_back(entry.path());
    }
    std::sort(cases.begin(), cases.end());
    std::vector<std::pair<std::string, EvalReport>> rows;
    std::vector<EvalReport> reports;
    json cases_json = json::object();
    for (const auto& dir : cases) {
      auto gold = find_case_file(dir, "gold");
      auto gen = find_case_file(dir, "generated");
      if (!gold || !gen) continue;
      std::vector<ErrorRecord> annotations;
      if (fs::is_regular_file(dir / "annotations.json")) annotations = annotations_of(dir / "annotations.json");
      auto report = evaluate(load_diagram(*gold), load_diagram(*gen), annotations);
      const auto name = dir.filename().string();
      cases_json[name] = report.to_json();
      reports.push_back(report);
      rows.emplace_back(name, std::move(report));
    }
    if (reports.empty()) throw InputError(batch_dir->string() + ": no use-case directories with gold and generated diagrams");
    const auto macro = macro_average(reports);
    rows.emplace_back("macro average", macro);
    os << render_table(rows);
    if (taxonomy) os << "\n" << render_taxonomy(macro);
    if (out) {
      auto summary = macro.to_json();
      summary.erase("errors");
      write_json(*out, {{"cases", std::move(cases_json)}, {"macro_average", std::move(summary)}});
    }
    return kExitOk;
  }

  if (!gold_path || !gen_path) throw ConfigError("eval needs GOLD and GENERATED diagrams, or --batch DIR");
  std::vector<ErrorRecord> annotations;
  if (annotations_path) annotations = annotations_of(*annotations_path);
  const auto report = evaluate(load_diagram(*gold_path), load_diagram(*gen_path), annotations);
  os << render_table({{gen_path->filename().string(), report}});
  if (taxonomy) os << "\n" << render_taxonomy(report);
  if (out) write_json(*out, report.to_json());
  return kExitOk;
}

}  // namespace

std::optional<BackendKind> parse_backend_kind(std::string_view text) {
  const auto t = lower(text);
  if (t == "http") return BackendKind::Http;
  if (t == "mock") return BackendKind::Mock;
  if (t == "record") return BackendKind::Record;
  return std::nullopt;
}

void RunConfig::merge_json(const json& document, const fs::path& base_dir) {
  if (!document.is_object()) throw ConfigError("config must be a JSON object");
  auto path_of = [&](const json& v, const char* key) {
    if (!v.is_string()) throw ConfigError(std::string(key) + " must be a string");
    fs::path p = v.get<std::string>();
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  for (const auto& [key, v] : document.items()) {
    try {
      if (key == "backend") {
        auto kind = parse_backend_kind(v.get<std::string>());
        if (!kind) throw ConfigError("unknown backend \"" + v.get<std::string>() + "\"");
        backend = *kind;
      } else if (key == "endpoint") {
        endpoint = v.get<std::string>();
      } else if (key == "model") {
        model_name = v.get<std::string>();
      } else if (key == "temperature") {
        temperature = v.get<double>();
      } else if (key == "max_tokens") {
        max_tokens = v.get<int>();
      } else if (key == "verify") {
        verify = v.get<bool>();
      } else if (key == "prompts") {
        prompt_dir = path_of(v, "prompts");
      } else if (key == "fixtures") {
        fixture_dir = path_of(v, "fixtures");
      } else {
        throw ConfigError("unknown config key \"" + key + "\"");
      }
    } catch (const json::exception&) {
      throw ConfigError("config key \"" + key + "\" has the wrong type");
    }
  }
}

void RunConfig::check() const {
  if (!(temperature >= 0)) throw ConfigError("temperature must be >= 0");
  if (max_tokens <= 0) throw ConfigError("max_tokens must be > 0");
  if (backend != BackendKind::Mock) {
    if (!endpoint || endpoint->empty()) throw ConfigError("the http backend requires an endpoint");
    if (!model_name || model_name->empty()) throw ConfigError("the http backend requires a model name");
  }
  if (backend != BackendKind::Http && !fixture_dir) throw ConfigError("mock and record backends require --fixtures");
}

void load_run_config(const fs::path& path, RunConfig& config) {
  if (!fs::is_regular_file(path)) throw ConfigError("config file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  auto document = json::parse(in, nullptr, false);
  if (document.is_discarded()) throw ConfigError(path.string() + ": invalid JSON");
  config.merge_json(document, path.parent_path());
}

std::unique_ptr<LlmBackend> make_backend(const RunConfig& config, const std::optional<std::string>& api_key,
                                         std::unique_ptr<LlmBackend>& inner) {
  config.check();
  if (config.backend == BackendKind::Mock) {
    return std::make_unique<MockBackend>(MockBackend::from_directory(*config.fixture_dir));
  }
  if (!api_key) throw ConfigError("NOMAD_API_KEY is not set");
  auto http = std::make_unique<HttpBackend>(HttpBackendOptions{*config.endpoint, *config.model_name, *api_key});
  if (config.backend == BackendKind::Http) return http;
  inner = std::move(http);
  return std::make_unique<RecordingBackend>(*inner, *config.fixture_dir);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"UML class diagram generation, benchmark construction and evaluation", "umlforge"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "umlforge 0.1.0");

  std::string input, second;
  std::optional<fs::path> out_path;

  auto* reverse = app.add_subcommand("reverse", "Reverse-engineer SQL DDL into a reference diagram");
  reverse->add_option("sql", input, "SQL file with CREATE TABLE statements")->required();
  reverse->add_option("--out,-o", out_path, "Output prefix; writes PREFIX.puml and PREFIX.json")->required();

  std::optional<fs::path> reqgen_config;
  auto* reqgen = app.add_subcommand("reqgen", "Generate requirements from a diagram");
  reqgen->add_option("diagram", input, "Diagram (.puml or intermediate-model .json)")->required();
  reqgen->add_option("--config,-c", reqgen_config, "JSON requirement-generation config");
  reqgen->add_option("--out,-o", out_path, "Output prefix; writes PREFIX.txt and PREFIX.trace.json");

  GenerateFlags gflags;
  auto* generate = app.add_subcommand("generate", "Run the generation pipeline on a requirements document");
  generate->add_option("requirements", input, "Requirements text file")->required();
  generate->add_option("--out,-o", out_path, "Bundle directory")->required();
  generate->add_option("--backend", gflags.backend, "http, mock or record");
  generate->add_option("--endpoint", gflags.endpoint, "Chat-completions URL");
  generate->add_option("--model", gflags.model, "Model name");
  generate->add_option("--temperature", gflags.temperature, "Sampling temperature (default 0)");
  generate->add_option("--max-tokens", gflags.max_tokens, "Completion token limit (default 4096)");
  generate->add_option("--fixtures", gflags.fixtures, "Fixture directory for mock and record backends");
  generate->add_option("--prompts", gflags.prompts, "Directory of prompt templates overriding the built-in ones");
  generate->add_option("--config,-c", gflags.config, "JSON run config");
  bool verify_flag = true;
  auto* verify_opt = generate->add_flag("--verify,!--no-verify", verify_flag, "Run the validator stage (default on)");

  std::optional<fs::path> annotations, batch;
  bool taxonomy = false;
  auto* eval = app.add_subcommand("eval", "Score a generated diagram against a reference");
  eval->add_option("gold", input, "Reference diagram");
  eval->add_option("generated", second, "Generated diagram");
  eval->add_option("--annotations", annotations, "Human annotation overlay (JSON)");
  eval->add_option("--batch", batch, "Directory of use cases, each holding gold.* and generated.*");
  eval->add_option("--out,-o", out_path, "Write the report as JSON");
  eval->add_flag("--taxonomy", taxonomy, "Print error counts per dimension");

  std::vector<std::string> argv_storage{"umlforge"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (reverse->parsed()) return cmd_reverse(input, *out_path, out, err);
    if (reqgen->parsed()) return cmd_reqgen(input, reqgen_config, out_path, out);
    if (generate->parsed()) {
      if (verify_opt->count() > 0) gflags.verify = verify_flag;
      return cmd_generate(input, *out_path, gflags, out, err);
    }
    if (eval->parsed()) {
      std::optional<fs::path> gold, gen;
      if (!input.empty()) gold = input;
      if (!second.empty()) gen = second;
      return cmd_eval(gold, gen, annotations, batch, out_path, taxonomy, out);
    }
  } catch (const StageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitStage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitConfig;
}

}  // namespace umlforge
