// SPDX-License-Identifier: Apache-2.0
#include "corm/distill.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "corm/rng.hpp"
#include "corm/text.hpp"

namespace corm {

CandidatePools build_candidate_pools(const QaExample& example, const PerturbationSet& pset,
                                     const Bm25Index& index, std::size_t m) {
  if (m < 1) throw std::invalid_argument("pool size m must be >= 1");
  CandidatePools pools;
  pools.query_id = example.id;
  pools.m = m;
  pools.clean_pool = index.retrieve_top_m(example.question, m);
  pools.perturbed_pools.reserve(pset.members.size());
  for (const auto& member : pset.members) {
    pools.perturbed_pools.push_back(index.retrieve_top_m(member.text, m));
  }
  return pools;
}

RobustnessLabel label_robustness(const QaExample& example, const PerturbationSet& pset,
                                 const Document& doc, const GeneratorBackend& backend) {
  if (pset.members.empty()) throw std::invalid_argument("K must be >= 1 for labeling");
  RobustnessLabel label;
  label.query_id = example.id;
  label.doc_id = doc.id;
  label.per_perturbation.reserve(pset.members.size());
  std::size_t correct = 0;
  for (const auto& member : pset.members) {
    GenerationRequest request{member.text, {doc}};
    SimHints hints{member.bias_payload, example.gold_answers};
    std::string answer;
    try {
      answer = generate_answer(backend, request, hints);
    } catch (const std::exception& e) {
      throw std::runtime_error("teacher evaluation failed for (query " + example.id + ", doc " +
                               doc.id + ", k " + std::to_string(member.perturbation_index) +
                               "): " + e.what());
    }
    bool ok = judge_correct(answer, example.gold_answers);
    label.per_perturbation.push_back(ok);
    if (ok) ++correct;
  }
  label.score = static_cast<double>(correct) / static_cast<double>(pset.members.size());
  return label;
}

LabelMap label_pools(const QaExample& example, const PerturbationSet& pset,
                     const CandidatePools& pools, const Corpus& corpus,
                     const GeneratorBackend& backend) {
  // Union of all pools in first-appearance order; each (query, doc) pair is
  // evaluated once.
  std::vector<std::string> doc_ids;
  std::set<std::string> seen;
  auto collect = [&](const std::vector<RankedCandidate>& pool) {
    for (const auto& c : pool) {
      if (seen.insert(c.doc_id).second) doc_ids.push_back(c.doc_id);
    }
  };
  collect(pools.clean_pool);
  for (const auto& pool : pools.perturbed_pools) collect(pool);

  LabelMap labels;
  for (const auto& id : doc_ids) {
    const Document* doc = corpus.find(id);
    if (!doc) throw std::runtime_error("pool references unknown doc id: " + id);
    labels.emplace(id, label_robustness(example, pset, *doc, backend));
  }
  return labels;
}

std::vector<ListwiseGroup> build_listwise_groups(const CandidatePools& pools,
                                                 const PerturbationSet& pset,
                                                 const LabelMap& labels, std::size_t n_neg,
                                                 std::uint64_t seed) {
  auto label_of = [&](const std::string& doc_id) -> const RobustnessLabel& {
    auto it = labels.find(doc_id);
    if (it == labels.end()) {
      throw std::invalid_argument("labels do not cover doc id " + doc_id);
    }
    return it->second;
  };

  // Surviving subset of the clean retrieval.
  std::vector<const RankedCandidate*> positives;
  for (const auto& c : pools.clean_pool) {
    if (label_of(c.doc_id).score > 0.0) positives.push_back(&c);
  }

  Rng rng(Rng::mix(seed, fnv1a64(pools.query_id)));
  std::vector<ListwiseGroup> groups;
  for (std::size_t k = 0; k < pools.perturbed_pools.size(); ++k) {
    if (positives.empty()) break;  // every group of this query is skipped
    const auto& pool_k = pools.perturbed_pools[k];
    const RankedCandidate* anchor = positives[rng.bounded(positives.size())];

    std::vector<const RankedCandidate*> zero_docs;
    for (const auto& c : pool_k) {
      if (c.doc_id == anchor->doc_id) continue;
      if (label_of(c.doc_id).score == 0.0) zero_docs.push_back(&c);
    }
    // Shrink when scarce; sampling with replacement would put duplicate docs
    // inside one softmax group.
    auto picks = rng.sample_without_replacement(zero_docs.size(), n_neg);

    ListwiseGroup g;
    g.query_id = pools.query_id;
    g.k_index = k + 1;
    g.perturbed_text = pset.members.at(k).text;
    g.anchor_index = 0;
    g.docs.push_back({anchor->doc_id, label_of(anchor->doc_id).score});
    for (auto idx : picks) {
      g.docs.push_back({zero_docs[idx]->doc_id, 0.0});
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

namespace {
constexpr const char* kDatasetVersion = "CORMDS1";
}

void write_dataset(const DistillDataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  nlohmann::ordered_json header;
  header["version"] = kDatasetVersion;
  header["k"] = ds.k;
  header["n_neg"] = ds.n_neg;
  header["seed"] = ds.seed;
  header["config_hash"] = ds.provenance.config_hash;
  header["queries"] = ds.provenance.queries;
  header["skipped_groups"] = ds.provenance.skipped_groups;
  out << header.dump() << "\n";
  for (const auto& g : ds.groups) {
    nlohmann::ordered_json j;
    j["query_id"] = g.query_id;
    j["k_index"] = g.k_index;
    j["perturbed_text"] = g.perturbed_text;
    nlohmann::ordered_json docs = nlohmann::ordered_json::array();
    for (const auto& d : g.docs) {
      docs.push_back({{"doc_id", d.doc_id}, {"s", d.score}});
    }
    j["docs"] = std::move(docs);
    j["anchor_index"] = g.anchor_index;
    out << j.dump() << "\n";
  }
  if (!out) throw std::runtime_error("I/O error writing dataset file: " + path);
}

DistillDataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset file is empty: " + path);
  DistillDataset ds;
  try {
    auto header = nlohmann::json::parse(line);
    std::string version = header.at("version").get<std::string>();
    if (version != kDatasetVersion) {
      throw std::runtime_error("unsupported dataset version '" + version + "' (expected " +
                               kDatasetVersion + ")");
    }
    ds.k = header.at("k").get<std::size_t>();
    ds.n_neg = header.at("n_neg").get<std::size_t>();
    ds.seed = header.at("seed").get<std::uint64_t>();
    ds.provenance.config_hash = header.value("config_hash", std::string{});
    ds.provenance.queries = header.value("queries", std::size_t{0});
    ds.provenance.skipped_groups = header.value("skipped_groups", std::size_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(path + ":1: bad dataset header: " + e.what());
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ListwiseGroup g;
      g.query_id = j.at("query_id").get<std::string>();
      g.k_index = j.at("k_index").get<std::size_t>();
      g.perturbed_text = j.at("perturbed_text").get<std::string>();
      for (const auto& d : j.at("docs")) {
        g.docs.push_back({d.at("doc_id").get<std::string>(), d.at("s").get<double>()});
      }
      g.anchor_index = j.at("anchor_index").get<std::size_t>();
      if (g.anchor_index >= g.docs.size()) throw std::runtime_error("anchor_index out of range");
      ds.groups.push_back(std::move(g));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad group record: " +
                               e.what());
    }
  }
  return ds;
}

}  // namespace corm
