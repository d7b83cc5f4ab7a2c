// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace corm {

struct QaExample {
  std::string id;
  std::string question;
  std::vector<std::string> gold_answers;
  std::string answer_type;  // typed-pool tag, e.g. "person", "place"

  /// Content tokens of the question (lowercased, stopwords removed).
  std::vector<std::string> topic_tokens() const;
};

enum class PerturbationType { FalsePremise, ConfirmationBias, Distraction };

std::string to_string(PerturbationType t);
PerturbationType perturbation_type_from_string(const std::string& s);

struct PerturbedQuery {
  std::string source_id;
  std::string text;
  PerturbationType ptype = PerturbationType::FalsePremise;
  std::optional<std::string> bias_payload;  // wrong entity (I) or false claim (II)
  std::size_t perturbation_index = 1;       // k in 1..K
};

struct PerturbationSet {
  std::string source_id;
  std::vector<PerturbedQuery> members;
};

struct Violation {
  std::string rule;  // "R1".."R4"
  std::string detail;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;
};

enum class ConfirmationSubtype { Historical, Quantitative };

/// Template tables and distractor inventory, loaded from JSON data files.
/// Rewrites are template-based (not LLM-based) so the whole protocol is a
/// pure function of its inputs.
struct TemplateTables {
  std::vector<std::string> false_premise;       // {wrong}, {topic}, {question}
  std::size_t false_premise_sampled = 0;        // only indices < this are sampled
  std::vector<std::string> confirmation_historical;    // {claim}, {short_question}, ...
  std::vector<std::string> confirmation_quantitative;  // {claim_core}, {question}, ...
  std::vector<std::string> claim_historical;    // {topic}, {wrong}
  std::vector<std::string> claim_quantitative;  // {topic}
  std::vector<std::string> banned_hedging;

  static TemplateTables load(const std::string& path);
  static TemplateTables builtin();  // the shipped defaults, compiled in
};

struct DistractorDomain {
  std::string domain;
  std::vector<std::string> sentences;
};

struct DistractorInventory {
  std::vector<DistractorDomain> domains;

  static DistractorInventory load(const std::string& path);
  static DistractorInventory builtin();
};

/// Entities grouped by answer-type tag; wrong-belief entities are drawn from
/// the pool entry matching the example's tag.
struct EntityPool {
  struct Group {
    std::string answer_type;
    std::vector<std::string> entities;
  };
  std::vector<Group> groups;

  static EntityPool from_qa(const std::vector<QaExample>& examples);
  const std::vector<std::string>* find(const std::string& answer_type) const;
};

/// Trailing capitalized phrase of the question (e.g. "Mona Lisa" from
/// "Who painted the Mona Lisa?"), falling back to the last content token.
std::string topic_phrase(const std::string& question);

PerturbedQuery perturb_false_premise(const QaExample& example, const std::string& wrong_entity,
                                     std::size_t template_index,
                                     const TemplateTables& tables);

PerturbedQuery perturb_confirmation_bias(const QaExample& example, const std::string& false_claim,
                                         ConfirmationSubtype subtype,
                                         const TemplateTables& tables,
                                         std::size_t template_index = 0);

PerturbedQuery perturb_distraction(const QaExample& example, const std::string& topic,
                                   const std::string& distractor_sentence,
                                   const DistractorInventory& inventory);

/// Checks R1 (wh-word preserved), R2 (no hedging word), R3 (no gold alias in
/// added material), R4 (Type III distractor shares no content token with the
/// question). Reports, never throws.
ValidationReport validate_perturbation(const QaExample& example, const PerturbedQuery& perturbed,
                                       const std::vector<std::string>& banned_hedging);

ValidationReport validate_perturbation(const QaExample& example, const PerturbedQuery& perturbed,
                                       const TemplateTables& tables);

/// K perturbations, types round-robin (I, II, III), every member validated.
/// Pure function of (example, k, pool, seed, tables, inventory).
PerturbationSet generate_perturbation_set(const QaExample& example, std::size_t k,
                                          const EntityPool& pool, std::uint64_t seed,
                                          const TemplateTables& tables,
                                          const DistractorInventory& inventory);

std::vector<QaExample> load_qa(const std::string& path);

void write_perturbations(const std::vector<PerturbationSet>& sets, const std::string& path);
std::vector<PerturbationSet> read_perturbations(const std::string& path);

}  // namespace corm
