#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "umlforge/cli.hpp"
#include "umlforge/errors.hpp"
#include "umlforge/model_json.hpp"

using namespace umlforge;
namespace fs = std::filesystem;

namespace {

const fs::path kData = fs::path(UMLFORGE_SOURCE_DIR) / "data";
const fs::path kFixtures = fs::path(UMLFORGE_SOURCE_DIR) / "tests" / "fixtures";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::path(UMLFORGE_TEST_TMP) / "cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> generate_args(const fs::path& out) {
  return {"generate", (kData / "northwind" / "requirements.txt").string(), "--backend", "mock",
          "--fixtures", (kData / "northwind" / "mock").string(), "--out", out.string()};
}

std::map<std::string, std::string> bundle(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = read_file(e.path());
  return files;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    if (value) {
      setenv(name, value, 1);
    } else {
      unsetenv(name);
    }
  }
  ~ScopedEnv() {
    if (old_) {
      setenv(name_, old_->c_str(), 1);
    } else {
      unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace

TEST(Cli, ReverseWritesBothFiles) {
  const auto dir = scratch("reverse");
  const auto sql = dir / "shop.sql";
  std::ofstream(sql) << "CREATE TABLE Customers (id INT PRIMARY KEY, name TEXT);\n"
                        "CREATE TABLE Orders (id INT PRIMARY KEY, customer_id INT NOT NULL REFERENCES Customers(id));\n";
  const auto r = cli({"reverse", sql.string(), "--out", (dir / "shop.puml").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "shop.puml"));
  EXPECT_TRUE(fs::exists(dir / "shop.json"));
  const auto d = load_diagram_file((dir / "shop.json").string());
  EXPECT_EQ(d.classes.size(), 2u);
  EXPECT_TRUE(equivalent(d, load_diagram_file((dir / "shop.puml").string())));
}

TEST(Cli, ReverseNorthwindClassCount) {
  const auto dir = scratch("reverse_nw");
  const auto r = cli({"reverse", (kData / "northwind" / "northwind.sql").string(), "--out", (dir / "nw").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(load_diagram_file((dir / "nw.puml").string()).classes.size(), 21u);
  EXPECT_NE(r.err.find("warning"), std::string::npos);  // the CREATE INDEX statement
}

TEST(Cli, MissingFileIsInputError) {
  const auto r = cli({"reverse", "/nonexistent/x.sql", "--out", "/tmp/x"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("file not found"), std::string::npos);
  EXPECT_EQ(cli({"eval", "/nonexistent/a.puml", "/nonexistent/b.puml"}).code, kExitInput);
}

TEST(Cli, MalformedInputIsInputError) {
  const auto dir = scratch("malformed");
  std::ofstream(dir / "bad.sql") << "CREATE TABLE a (x INT";
  std::ofstream(dir / "bad.puml") << "@startuml\nclass A {\n";
  EXPECT_EQ(cli({"reverse", (dir / "bad.sql").string(), "--out", (dir / "o").string()}).code, kExitInput);
  EXPECT_EQ(cli({"reqgen", (dir / "bad.puml").string()}).code, kExitInput);
}

TEST(Cli, UsageErrorsAreConfigErrors) {
  EXPECT_EQ(cli({}).code, kExitConfig);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitConfig);
  EXPECT_EQ(cli({"generate", "x.txt"}).code, kExitConfig);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(Cli, ReqgenEmptyDiagram) {
  const auto dir = scratch("reqgen_empty");
  std::ofstream(dir / "empty.puml") << "@startuml\n@enduml\n";
  const auto r = cli({"reqgen", (dir / "empty.puml").string(), "--out", (dir / "reqs").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(read_file(dir / "reqs.txt"), "");
  EXPECT_EQ(nlohmann::json::parse(read_file(dir / "reqs.trace.json")), nlohmann::json::object());
}

TEST(Cli, ReqgenOneClassToStdout) {
  const auto dir = scratch("reqgen_one");
  std::ofstream(dir / "one.puml") << "@startuml\nclass Customer {\n  name\n}\n@enduml\n";
  const auto r = cli({"reqgen", (dir / "one.puml").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "REQ-F001: The system shall record Customer information including name.\n");
}

TEST(Cli, ReqgenNorthwindMatchesShippedDocument) {
  const auto dir = scratch("reqgen_nw");
  const auto r = cli({"reqgen", (kData / "northwind" / "gold.puml").string(), "--config",
                      (kData / "northwind" / "reqgen.json").string(), "--out", (dir / "r").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(read_file(dir / "r.txt"), read_file(kData / "northwind" / "requirements.txt"));
  EXPECT_EQ(read_file(dir / "r.trace.json"), read_file(kData / "northwind" / "requirements.trace.json"));
}

TEST(Cli, GenerateBundleIsDeterministic) {
  const auto a = scratch("gen_a");
  const auto b = scratch("gen_b");
  const auto ra = cli(generate_args(a));
  ASSERT_EQ(ra.code, kExitOk) << ra.err;
  EXPECT_NE(ra.out.find("21 classes"), std::string::npos);
  ASSERT_EQ(cli(generate_args(b)).code, kExitOk);
  const auto files = bundle(a);
  EXPECT_EQ(files, bundle(b));
  for (const auto* name : {"01_concepts.json", "02_relationships.json", "03_model.json", "04_diagram.puml",
                           "05_verified.puml", "transcript.json"}) {
    EXPECT_TRUE(files.contains(name)) << name;
  }
  EXPECT_EQ(nlohmann::json::parse(files.at("transcript.json")).size(), 5u);
}

TEST(Cli, NoVerifyRunsFourStages) {
  const auto dir = scratch("gen_noverify");
  // A stale verified diagram from an earlier run must not survive.
  std::ofstream(dir / "05_verified.puml") << "stale";
  auto args = generate_args(dir);
  args.push_back("--no-verify");
  const auto r = cli(args);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(nlohmann::json::parse(read_file(dir / "transcript.json")).size(), 4u);
  EXPECT_FALSE(fs::exists(dir / "05_verified.puml"));
}

TEST(Cli, HttpWithoutApiKeyIsConfigError) {
  ScopedEnv env("NOMAD_API_KEY", nullptr);
  const auto dir = scratch("gen_http");
  const auto r = cli({"generate", (kData / "northwind" / "requirements.txt").string(), "--endpoint",
                      "http://127.0.0.1:9/v1/chat/completions", "--model", "m", "--out", dir.string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("NOMAD_API_KEY"), std::string::npos);
}

TEST(Cli, HttpWithoutEndpointIsConfigError) {
  ScopedEnv env("NOMAD_API_KEY", "k");
  const auto r = cli({"generate", (kData / "northwind" / "requirements.txt").string(), "--out",
                      scratch("gen_noendpoint").string()});
  EXPECT_EQ(r.code, kExitConfig);
}

TEST(Cli, StageFailureNamesStage) {
  // Fixtures recorded for other requirements: the first stage finds nothing to replay.
  const auto dir = scratch("gen_stage");
  std::ofstream(dir / "reqs.txt") << "X-F001: The system shall record Widget information including size.\n";
  const auto r = cli({"generate", (dir / "reqs.txt").string(), "--backend", "mock", "--fixtures",
                      (kData / "northwind" / "mock").string(), "--out", (dir / "bundle").string()});
  EXPECT_EQ(r.code, kExitStage);
  EXPECT_NE(r.err.find("concept_extractor"), std::string::npos) << r.err;
}

TEST(Cli, ConfigFileFeedsGenerate) {
  const auto dir = scratch("gen_config");
  std::ofstream(dir / "run.json") << nlohmann::json{{"backend", "mock"},
                                                    {"fixtures", (kData / "northwind" / "mock").string()},
                                                    {"verify", false}}
                                         .dump();
  const auto r = cli({"generate", (kData / "northwind" / "requirements.txt").string(), "--config",
                      (dir / "run.json").string(), "--out", (dir / "bundle").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("in 4 stages"), std::string::npos);

  std::ofstream(dir / "bad.json") << R"({"backend": "mock", "colour": "blue"})";
  EXPECT_EQ(cli({"generate", (kData / "northwind" / "requirements.txt").string(), "--config",
                 (dir / "bad.json").string(), "--out", (dir / "bundle2").string()})
                .code,
            kExitConfig);
}

TEST(Cli, EvalSelfPrintsOnes) {
  const auto gold = (kData / "northwind" / "gold.puml").string();
  const auto r = cli({"eval", gold, gold});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("1.0000      1.0000             1.0000             1.0000    1.0000"), std::string::npos)
      << r.out;
}

TEST(Cli, EvalFixturePairWithJsonAndTaxonomy) {
  const auto dir = scratch("eval_pair");
  const auto r = cli({"eval", (kFixtures / "taxonomy" / "gold.puml").string(),
                      (kFixtures / "taxonomy" / "generated.puml").string(), "--taxonomy", "--out",
                      (dir / "report.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("0.8000      0.7500             0.2857             0.5714    0.6018"), std::string::npos)
      << r.out;
  EXPECT_NE(r.out.find("relationship: 4"), std::string::npos) << r.out;
  const auto j = nlohmann::json::parse(read_file(dir / "report.json"));
  EXPECT_EQ(j.at("errors").size(), 8u);
}

TEST(Cli, EvalBatchMacroAverage) {
  const auto dir = scratch("eval_batch");
  const auto r = cli({"eval", "--batch", (kFixtures / "batch").string(), "--out", (dir / "batch.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("case_a"), std::string::npos);
  EXPECT_NE(r.out.find("case_b"), std::string::npos);
  EXPECT_NE(r.out.find("macro average"), std::string::npos);
  const auto j = nlohmann::json::parse(read_file(dir / "batch.json"));
  EXPECT_NEAR(j.at("macro_average").at("average").get<double>(), 0.85, 1e-12);
  EXPECT_NEAR(j.at("macro_average").at("classes").at("f1").get<double>(), 0.9, 1e-12);
  EXPECT_EQ(j.at("cases").size(), 2u);
}

TEST(RunConfig, MergeAndCheck) {
  RunConfig c;
  EXPECT_THROW(c.check(), ConfigError);  // http without endpoint
  c.merge_json({{"backend", "mock"}, {"fixtures", "fx"}, {"temperature", 0.5}}, "/base");
  EXPECT_EQ(c.backend, BackendKind::Mock);
  EXPECT_EQ(c.fixture_dir, fs::path("/base/fx"));
  EXPECT_EQ(c.temperature, 0.5);
  EXPECT_NO_THROW(c.check());
  EXPECT_THROW(c.merge_json({{"backend", "carrier pigeon"}}), ConfigError);
  EXPECT_THROW(c.merge_json({{"max_tokens", "many"}}), ConfigError);
  RunConfig rec;
  rec.backend = BackendKind::Record;
  rec.endpoint = "http://x";
  rec.model_name = "m";
  EXPECT_THROW(rec.check(), ConfigError);  // no fixture directory
  EXPECT_EQ(parse_backend_kind("record"), BackendKind::Record);
  EXPECT_FALSE(parse_backend_kind("grpc"));
}
