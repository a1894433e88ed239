#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "umlforge/llm.hpp"
#include "umlforge/model_json.hpp"
#include "umlforge/prompts.hpp"
#include "umlforge/uml.hpp"

namespace umlforge {

inline constexpr std::string_view kConceptExtractor = "concept_extractor";
inline constexpr std::string_view kRelationshipComprehender = "relationship_comprehender";
inline constexpr std::string_view kModelIntegrator = "model_integrator";
inline constexpr std::string_view kCodeArticulator = "code_articulator";
inline constexpr std::string_view kValidator = "validator";

/// Execution order.
inline constexpr std::array<std::string_view, 5> kStages = {
    kConceptExtractor, kRelationshipComprehender, kModelIntegrator, kCodeArticulator, kValidator};

struct Entity {
  std::string name;
  std::vector<std::string> attributes;

  friend bool operator==(const Entity&, const Entity&) = default;
};

struct ConceptSet {
  std::vector<Entity> entities;

  nlohmann::json to_json() const;
  friend bool operator==(const ConceptSet&, const ConceptSet&) = default;
};

struct RelationSpec {
  std::string source;
  std::string target;
  RelationshipKind kind = RelationshipKind::Association;
  std::optional<Multiplicity> source_multiplicity;
  std::optional<Multiplicity> target_multiplicity;

  friend bool operator==(const RelationSpec&, const RelationSpec&) = default;
};

struct RelationshipSet {
  std::vector<RelationSpec> relations;

  nlohmann::json to_json() const;
  friend bool operator==(const RelationshipSet&, const RelationshipSet&) = default;
};

struct Exchange {
  LlmRequest request;
  std::string response;
};

/// Everything one stage sent and received, plus warnings (dropped relations,
/// fallbacks, rejected revisions).
struct TranscriptEntry {
  std::string stage;
  std::vector<Exchange> exchanges;
  std::vector<std::string> notes;
};

struct GenerationOptions {
  double temperature = kDefaultTemperature;
  int max_tokens = kDefaultMaxTokens;
};

/// Shared by the stages of one run. Each stage appends exactly one transcript entry.
struct StageContext {
  const PromptSet& prompts;
  GenerationOptions options;
  std::vector<TranscriptEntry>& transcript;
};

/// Concept extractor. Throws std::invalid_argument for blank requirements,
/// BackendError, or FormatError when the reply is unusable after one repair prompt.
ConceptSet extract_concepts(std::string_view requirements, LlmBackend& backend, StageContext& ctx);

/// Relationship comprehender. Relations naming unknown entities are dropped with a note.
RelationshipSet comprehend_relationships(const ConceptSet& concepts, std::string_view requirements,
                                         LlmBackend& backend, StageContext& ctx);

/// Model integrator. The reply is checked against the intermediate-model schema;
/// one repair prompt carries the violations. Throws FormatError or SchemaError.
IntermediateModel integrate_model(const ConceptSet& concepts, const RelationshipSet& relationships,
                                  LlmBackend& backend, StageContext& ctx);

/// Code articulator. Falls back to `emit_plantuml(to_diagram(model))` when the
/// reply does not parse into a valid, non-empty diagram.
std::string articulate_code(const IntermediateModel& model, LlmBackend& backend, StageContext& ctx);

/// Single-shot validator. Returns the reply when it parses into a valid diagram,
/// otherwise the input unchanged. Throws std::invalid_argument if `plantuml` has parse errors.
std::string verify(std::string_view plantuml, std::string_view requirements, LlmBackend& backend,
                   StageContext& ctx);

struct PipelineResult {
  ConceptSet concepts;
  RelationshipSet relationships;
  IntermediateModel model;
  std::string plantuml;
  std::optional<std::string> verified_plantuml;
  std::vector<TranscriptEntry> transcript;

  const std::string& final_plantuml() const { return verified_plantuml ? *verified_plantuml : plantuml; }
  UmlDiagram final_diagram() const;
  nlohmann::json transcript_json() const;
  nlohmann::json to_json() const;
};

struct PipelineOptions {
  GenerationOptions generation;
  /// Defaults to PromptSet::defaults() when null.
  const PromptSet* prompts = nullptr;
};

/// Runs the four generation stages and, if `verify_enabled`, the validator.
/// Throws StageError naming the first stage that failed.
PipelineResult run_pipeline(std::string_view requirements, LlmBackend& backend, bool verify_enabled,
                            const PipelineOptions& options = {});

/// First JSON value embedded in an LLM reply (code fences and prose are skipped).
/// Throws FormatError when none parses.
nlohmann::json extract_json(std::string_view reply);

}  // namespace umlforge
