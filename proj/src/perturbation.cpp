// SPDX-License-Identifier: Apache-2.0
#include "corm/perturbation.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "corm/rng.hpp"
#include "corm/text.hpp"

namespace corm {

namespace {

constexpr std::size_t kMaxResamples = 8;
constexpr double kContentSurvivalThreshold = 0.6;

std::string lowercase_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string uppercase_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

void replace_all(std::string& s, const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = s.find(key, pos)) != std::string::npos) {
    s.replace(pos, key.size(), value);
    pos += value.size();
  }
}

bool starts_with_ci(const std::string& s, const std::string& prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

/// "Who is the CEO?" -> "Who's the CEO?" and friends.
std::string contract_wh_is(const std::string& question) {
  static const std::vector<std::pair<std::string, std::string>> kPairs = {
      {"who is ", "who's "},   {"what is ", "what's "}, {"where is ", "where's "},
      {"when is ", "when's "}, {"how is ", "how's "},   {"why is ", "why's "}};
  for (const auto& [pat, rep] : kPairs) {
    if (starts_with_ci(question, pat)) {
      std::string out = rep + question.substr(pat.size());
      out[0] = question[0];  // keep original capitalization
      return out;
    }
  }
  return question;
}

bool is_preposition(const std::string& w) {
  static const std::set<std::string> kPreps = {"of", "in", "at", "on", "for", "from", "about"};
  return kPreps.count(w) != 0;
}

/// Drops a trailing "<prep> <topic>" phrase when the claim already names the
/// topic, e.g. "Who is the CEO of Apple?" + a claim mentioning Apple ->
/// "Who is the CEO?".
std::string elide_redundant_tail(const std::string& question, const std::string& claim) {
  std::string topic = topic_phrase(question);
  if (topic.empty()) return question;
  std::size_t pos = question.rfind(topic);
  if (pos == std::string::npos || pos == 0) return question;
  for (std::size_t i = pos + topic.size(); i < question.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(question[i]);
    if (std::isalnum(c)) return question;  // topic is not the final phrase
  }
  std::string tail = question.substr(pos + topic.size());
  std::string prefix = question.substr(0, pos);
  while (!prefix.empty() && prefix.back() == ' ') prefix.pop_back();
  std::size_t sp = prefix.find_last_of(' ');
  std::string prev = sp == std::string::npos ? prefix : prefix.substr(sp + 1);
  if (!is_preposition(lower_ascii(prev))) return question;

  std::set<std::string> claim_toks;
  for (auto& t : tokenize(claim)) claim_toks.insert(t);
  auto topic_content = content_tokens(topic);
  if (topic_content.empty()) return question;
  for (const auto& t : topic_content) {
    if (!claim_toks.count(t)) return question;
  }
  std::string head = sp == std::string::npos ? std::string{} : prefix.substr(0, sp);
  return head + tail;
}

std::string strip_claim_copula(const std::string& claim) {
  static const std::vector<std::string> kCopulas = {
      "it is ", "it's ", "this is ", "that is ", "they are ", "there is ", "there are "};
  std::string core = claim;
  for (const auto& c : kCopulas) {
    if (starts_with_ci(core, c)) {
      core = core.substr(c.size());
      break;
    }
  }
  for (const std::string art : {"the ", "an ", "a "}) {
    if (starts_with_ci(core, art)) {
      core = core.substr(art.size());
      break;
    }
  }
  return core;
}

struct RenderContext {
  const QaExample* example = nullptr;
  std::string wrong;
  std::string claim;
};

std::string render_template(const std::string& tmpl, const RenderContext& ctx) {
  std::string out = tmpl;
  const std::string& q = ctx.example->question;
  replace_all(out, "{question}", lowercase_first(q));
  replace_all(out, "{Question}", q);
  replace_all(out, "{topic}", topic_phrase(q));
  replace_all(out, "{wrong}", ctx.wrong);
  if (!ctx.claim.empty() || out.find("{claim") != std::string::npos) {
    replace_all(out, "{claim}", ctx.claim);
    replace_all(out, "{claim_lower}", lowercase_first(ctx.claim));
    replace_all(out, "{claim_capital}", uppercase_first(ctx.claim));
    replace_all(out, "{claim_core}", strip_claim_copula(ctx.claim));
    replace_all(out, "{short_question}",
                lowercase_first(contract_wh_is(elide_redundant_tail(q, ctx.claim))));
  }
  return out;
}

bool is_gold_alias(const QaExample& example, const std::string& text) {
  for (const auto& g : example.gold_answers) {
    if (normalize_answer(text) == normalize_answer(g)) return true;
  }
  return false;
}

bool mentions_gold(const QaExample& example, const std::string& text) {
  for (const auto& g : example.gold_answers) {
    if (contains_normalized(text, g)) return true;
  }
  return false;
}

/// Fraction of the clean question's distinct content tokens that survive in
/// the perturbed text.
double content_survival(const QaExample& example, const std::string& perturbed_text) {
  std::set<std::string> clean;
  for (auto& t : content_tokens(example.question)) clean.insert(std::move(t));
  if (clean.empty()) return 1.0;
  std::set<std::string> present;
  for (auto& t : tokenize(perturbed_text)) present.insert(std::move(t));
  std::size_t kept = 0;
  for (const auto& t : clean) {
    if (present.count(t)) ++kept;
  }
  return static_cast<double>(kept) / static_cast<double>(clean.size());
}

}  // namespace

std::vector<std::string> QaExample::topic_tokens() const { return content_tokens(question); }

std::string to_string(PerturbationType t) {
  switch (t) {
    case PerturbationType::FalsePremise: return "false_premise";
    case PerturbationType::ConfirmationBias: return "confirmation_bias";
    case PerturbationType::Distraction: return "distraction";
  }
  return "unknown";
}

PerturbationType perturbation_type_from_string(const std::string& s) {
  if (s == "false_premise") return PerturbationType::FalsePremise;
  if (s == "confirmation_bias") return PerturbationType::ConfirmationBias;
  if (s == "distraction") return PerturbationType::Distraction;
  throw std::invalid_argument("unknown perturbation type: " + s);
}

std::string topic_phrase(const std::string& question) {
  // Words, original casing, split on whitespace.
  std::vector<std::string> words;
  std::string cur;
  for (char c : question) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) words.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  auto strip = [](const std::string& w) {
    std::size_t lo = 0, hi = w.size();
    while (lo < hi && !std::isalnum(static_cast<unsigned char>(w[lo]))) ++lo;
    while (hi > lo && !std::isalnum(static_cast<unsigned char>(w[hi - 1]))) --hi;
    return w.substr(lo, hi - lo);
  };
  // Trailing maximal run of capitalized words, excluding the sentence-initial
  // word (always capitalized).
  std::vector<std::string> run;
  for (std::size_t i = words.size(); i-- > 1;) {
    std::string w = strip(words[i]);
    if (w.empty()) {
      if (run.empty()) continue;
      break;
    }
    if (std::isupper(static_cast<unsigned char>(w[0]))) {
      run.push_back(w);
    } else {
      break;
    }
  }
  if (!run.empty()) {
    std::reverse(run.begin(), run.end());
    return join(run, " ");
  }
  auto content = content_tokens(question);
  return content.empty() ? std::string{} : content.back();
}

PerturbedQuery perturb_false_premise(const QaExample& example, const std::string& wrong_entity,
                                     std::size_t template_index, const TemplateTables& tables) {
  if (is_gold_alias(example, wrong_entity)) {
    throw std::invalid_argument("wrong entity '" + wrong_entity +
                                "' is a gold alias of example " + example.id);
  }
  if (template_index >= tables.false_premise.size()) {
    throw std::invalid_argument("false-premise template index " +
                                std::to_string(template_index) + " out of range");
  }
  RenderContext ctx;
  ctx.example = &example;
  ctx.wrong = wrong_entity;
  PerturbedQuery pq;
  pq.source_id = example.id;
  pq.text = render_template(tables.false_premise[template_index], ctx);
  pq.ptype = PerturbationType::FalsePremise;
  pq.bias_payload = wrong_entity;
  return pq;
}

PerturbedQuery perturb_confirmation_bias(const QaExample& example, const std::string& false_claim,
                                         ConfirmationSubtype subtype,
                                         const TemplateTables& tables,
                                         std::size_t template_index) {
  if (false_claim.empty()) throw std::invalid_argument("false claim must be non-empty");
  if (mentions_gold(example, false_claim)) {
    throw std::invalid_argument("false claim contains a gold alias of example " + example.id);
  }
  const auto& tmpls = subtype == ConfirmationSubtype::Historical
                          ? tables.confirmation_historical
                          : tables.confirmation_quantitative;
  if (template_index >= tmpls.size()) {
    throw std::invalid_argument("confirmation-bias template index " +
                                std::to_string(template_index) + " out of range");
  }
  RenderContext ctx;
  ctx.example = &example;
  ctx.claim = false_claim;
  PerturbedQuery pq;
  pq.source_id = example.id;
  pq.text = render_template(tmpls[template_index], ctx);
  pq.ptype = PerturbationType::ConfirmationBias;
  pq.bias_payload = false_claim;
  return pq;
}

PerturbedQuery perturb_distraction(const QaExample& example, const std::string& topic,
                                   const std::string& distractor_sentence,
                                   const DistractorInventory& inventory) {
  bool known_topic = false;
  for (const auto& d : inventory.domains) {
    if (d.domain == topic) known_topic = true;
  }
  if (!known_topic) {
    throw std::invalid_argument("distractor topic '" + topic +
                                "' is not in the unrelated-domain inventory");
  }
  std::set<std::string> question_content;
  for (auto& t : content_tokens(example.question)) question_content.insert(std::move(t));
  for (const auto& t : content_tokens(distractor_sentence)) {
    if (question_content.count(t)) {
      throw std::invalid_argument("distractor shares content token '" + t +
                                  "' with the question");
    }
  }
  if (mentions_gold(example, distractor_sentence)) {
    throw std::invalid_argument("distractor contains a gold alias of example " + example.id);
  }
  PerturbedQuery pq;
  pq.source_id = example.id;
  pq.text = example.question + " " + distractor_sentence;
  pq.ptype = PerturbationType::Distraction;
  return pq;
}

ValidationReport validate_perturbation(const QaExample& example, const PerturbedQuery& perturbed,
                                       const std::vector<std::string>& banned_hedging) {
  ValidationReport report;
  auto add = [&](std::string rule, std::string detail) {
    report.violations.push_back({std::move(rule), std::move(detail)});
  };

  // R1: wh-word of the clean question still present.
  std::string wh = wh_word_of(example.question);
  if (!wh.empty()) {
    auto toks = tokenize(perturbed.text);
    if (std::find(toks.begin(), toks.end(), wh) == toks.end()) {
      add("R1", "wh-word '" + wh + "' of the clean question was dropped");
    }
  }

  // R2: no banned hedging word.
  {
    std::string padded = " " + join(tokenize(perturbed.text), " ") + " ";
    for (const auto& banned : banned_hedging) {
      std::string needle = " " + join(tokenize(banned), " ") + " ";
      if (needle != "  " && padded.find(needle) != std::string::npos) {
        add("R2", "hedging word '" + banned + "' present");
      }
    }
  }

  // R3: no gold alias introduced by the perturbation.
  for (const auto& g : example.gold_answers) {
    if (contains_normalized(perturbed.text, g) && !contains_normalized(example.question, g)) {
      add("R3", "gold alias '" + g + "' appears in added material");
    }
  }

  // R4: Type III distractor must follow the clean question verbatim and share
  // no content token with it.
  if (perturbed.ptype == PerturbationType::Distraction) {
    if (perturbed.text.rfind(example.question, 0) != 0) {
      add("R4", "clean question does not survive verbatim as a prefix");
    } else {
      std::string rest = perturbed.text.substr(example.question.size());
      std::set<std::string> question_content;
      for (auto& t : content_tokens(example.question)) question_content.insert(std::move(t));
      for (const auto& t : content_tokens(rest)) {
        if (question_content.count(t)) {
          add("R4", "distractor shares content token '" + t + "' with the question");
          break;
        }
      }
    }
  }

  report.valid = report.violations.empty();
  return report;
}

ValidationReport validate_perturbation(const QaExample& example, const PerturbedQuery& perturbed,
                                       const TemplateTables& tables) {
  return validate_perturbation(example, perturbed, tables.banned_hedging);
}

const std::vector<std::string>* EntityPool::find(const std::string& answer_type) const {
  for (const auto& g : groups) {
    if (g.answer_type == answer_type) return &g.entities;
  }
  return nullptr;
}

EntityPool EntityPool::from_qa(const std::vector<QaExample>& examples) {
  EntityPool pool;
  std::map<std::string, std::size_t> index;
  for (const auto& ex : examples) {
    if (ex.gold_answers.empty()) continue;
    auto it = index.find(ex.answer_type);
    if (it == index.end()) {
      index.emplace(ex.answer_type, pool.groups.size());
      pool.groups.push_back({ex.answer_type, {}});
      it = index.find(ex.answer_type);
    }
    auto& entities = pool.groups[it->second].entities;
    const std::string& primary = ex.gold_answers.front();
    bool dup = false;
    for (const auto& e : entities) {
      if (normalize_answer(e) == normalize_answer(primary)) dup = true;
    }
    if (!dup) entities.push_back(primary);
  }
  return pool;
}

PerturbationSet generate_perturbation_set(const QaExample& example, std::size_t k,
                                          const EntityPool& pool, std::uint64_t seed,
                                          const TemplateTables& tables,
                                          const DistractorInventory& inventory) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const auto* typed = pool.find(example.answer_type);
  std::vector<std::string> eligible;
  if (typed) {
    for (const auto& e : *typed) {
      if (!is_gold_alias(example, e)) eligible.push_back(e);
    }
  }
  if (eligible.empty()) {
    throw std::runtime_error("entity pool exhausted for answer type '" + example.answer_type +
                             "' (example " + example.id + ")");
  }
  if (inventory.domains.empty()) throw std::runtime_error("distractor inventory is empty");

  Rng rng(Rng::mix(seed, fnv1a64(example.id)));
  PerturbationSet set;
  set.source_id = example.id;
  std::size_t confirmation_count = 0;

  for (std::size_t j = 0; j < k; ++j) {
    PerturbationType type = static_cast<PerturbationType>(j % 3);
    bool accepted = false;
    for (std::size_t attempt = 0; attempt < kMaxResamples && !accepted; ++attempt) {
      PerturbedQuery pq;
      try {
        switch (type) {
          case PerturbationType::FalsePremise: {
            const std::string& wrong = eligible[rng.bounded(eligible.size())];
            std::size_t sampled = std::min(tables.false_premise_sampled,
                                           tables.false_premise.size());
            if (sampled == 0) sampled = tables.false_premise.size();
            pq = perturb_false_premise(example, wrong, rng.bounded(sampled), tables);
            break;
          }
          case PerturbationType::ConfirmationBias: {
            ConfirmationSubtype subtype = confirmation_count % 2 == 0
                                              ? ConfirmationSubtype::Historical
                                              : ConfirmationSubtype::Quantitative;
            const auto& claim_tmpls = subtype == ConfirmationSubtype::Historical
                                          ? tables.claim_historical
                                          : tables.claim_quantitative;
            if (claim_tmpls.empty()) throw std::runtime_error("no claim templates");
            RenderContext ctx;
            ctx.example = &example;
            ctx.wrong = eligible[rng.bounded(eligible.size())];
            std::string claim = render_template(claim_tmpls[rng.bounded(claim_tmpls.size())], ctx);
            const auto& sent_tmpls = subtype == ConfirmationSubtype::Historical
                                         ? tables.confirmation_historical
                                         : tables.confirmation_quantitative;
            pq = perturb_confirmation_bias(example, claim, subtype, tables,
                                           rng.bounded(sent_tmpls.size()));
            break;
          }
          case PerturbationType::Distraction: {
            const auto& domain = inventory.domains[rng.bounded(inventory.domains.size())];
            if (domain.sentences.empty()) throw std::runtime_error("empty distractor domain");
            const std::string& sentence =
                domain.sentences[rng.bounded(domain.sentences.size())];
            pq = perturb_distraction(example, domain.domain, sentence, inventory);
            break;
          }
        }
      } catch (const std::invalid_argument&) {
        continue;  // precondition failed for this draw; resample
      }
      if (!validate_perturbation(example, pq, tables.banned_hedging).valid) continue;
      if (type != PerturbationType::Distraction &&
          content_survival(example, pq.text) < kContentSurvivalThreshold) {
        continue;
      }
      pq.perturbation_index = j + 1;
      set.members.push_back(std::move(pq));
      accepted = true;
    }
    if (!accepted) {
      throw std::runtime_error("could not generate a valid " + to_string(type) +
                               " perturbation for example " + example.id + " after " +
                               std::to_string(kMaxResamples) + " attempts");
    }
    if (type == PerturbationType::ConfirmationBias) ++confirmation_count;
  }
  return set;
}

std::vector<QaExample> load_qa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open QA file: " + path);
  std::vector<QaExample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      QaExample ex;
      ex.id = j.at("id").get<std::string>();
      ex.question = j.at("question").get<std::string>();
      ex.gold_answers = j.at("answers").get<std::vector<std::string>>();
      ex.answer_type = j.value("answer_type", std::string{"entity"});
      if (ex.question.empty()) throw std::runtime_error("empty question");
      if (ex.gold_answers.empty()) throw std::runtime_error("empty answers list");
      out.push_back(std::move(ex));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad QA record: " +
                               e.what());
    }
  }
  return out;
}

void write_perturbations(const std::vector<PerturbationSet>& sets, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write perturbations file: " + path);
  for (const auto& set : sets) {
    for (const auto& m : set.members) {
      nlohmann::ordered_json j;
      j["source_id"] = m.source_id;
      j["text"] = m.text;
      j["ptype"] = to_string(m.ptype);
      if (m.bias_payload) {
        j["bias_payload"] = *m.bias_payload;
      } else {
        j["bias_payload"] = nullptr;
      }
      j["k_index"] = m.perturbation_index;
      out << j.dump() << "\n";
    }
  }
  if (!out) throw std::runtime_error("I/O error writing perturbations file: " + path);
}

std::vector<PerturbationSet> read_perturbations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open perturbations file: " + path);
  std::vector<PerturbationSet> sets;
  std::map<std::string, std::size_t> index;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      PerturbedQuery m;
      m.source_id = j.at("source_id").get<std::string>();
      m.text = j.at("text").get<std::string>();
      m.ptype = perturbation_type_from_string(j.at("ptype").get<std::string>());
      if (j.contains("bias_payload") && !j.at("bias_payload").is_null()) {
        m.bias_payload = j.at("bias_payload").get<std::string>();
      }
      m.perturbation_index = j.at("k_index").get<std::size_t>();
      auto it = index.find(m.source_id);
      if (it == index.end()) {
        index.emplace(m.source_id, sets.size());
        sets.push_back({m.source_id, {}});
        it = index.find(m.source_id);
      }
      sets[it->second].members.push_back(std::move(m));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": bad perturbation record: " + e.what());
    }
  }
  for (auto& set : sets) {
    std::sort(set.members.begin(), set.members.end(),
              [](const PerturbedQuery& a, const PerturbedQuery& b) {
                return a.perturbation_index < b.perturbation_index;
              });
  }
  return sets;
}

}  // namespace corm
