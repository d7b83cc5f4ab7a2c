// SPDX-License-Identifier: Apache-2.0
#include "corm/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

#include "corm/text.hpp"

namespace corm {

namespace {

void ensure_parent_dir(const std::string& path) {
  auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

void require_path(const std::string& value, const std::string& field) {
  if (value.empty()) {
    throw std::invalid_argument("config: paths." + field + " is required for this command");
  }
}

TemplateTables tables_from_config(const PipelineConfig& cfg) {
  TemplateTables tables = cfg.paths.templates.empty() ? TemplateTables::builtin()
                                                      : TemplateTables::load(cfg.paths.templates);
  if (!cfg.perturb.banned_words.empty()) tables.banned_hedging = cfg.perturb.banned_words;
  return tables;
}

DistractorInventory inventory_from_config(const PipelineConfig& cfg) {
  return cfg.paths.distractors.empty() ? DistractorInventory::builtin()
                                       : DistractorInventory::load(cfg.paths.distractors);
}

std::string config_hash(const PipelineConfig& cfg) {
  // Stable digest of the knobs that shape the dataset.
  std::string desc = std::to_string(cfg.perturb.k) + "|" + std::to_string(cfg.perturb.seed) +
                     "|" + std::to_string(cfg.distill.m) + "|" + std::to_string(cfg.distill.n_neg) +
                     "|" + std::to_string(cfg.distill.seed) + "|" + cfg.distill.backend;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(desc)));
  return buf;
}

bool doc_has_gold(const Document& doc, const std::vector<std::string>& golds) {
  for (const auto& g : golds) {
    if (contains_normalized(doc.text, g)) return true;
  }
  return false;
}

}  // namespace

GeneratorBackend backend_from_config(const PipelineConfig& cfg) {
  if (cfg.distill.backend == "sim") return GeneratorBackend::sycophant();
  RemoteEndpoint ep;
  ep.base_url = cfg.remote.base_url;
  ep.model = cfg.remote.model;
  ep.timeout_seconds = cfg.remote.timeout_seconds;
  ep.max_parallel = cfg.remote.max_parallel;
  if (ep.base_url.empty()) {
    throw std::invalid_argument("config: remote.base_url is required for backend 'remote'");
  }
  return GeneratorBackend::remote_backend(ep);
}

void run_ingest(const PipelineConfig& cfg) {
  require_path(cfg.paths.corpus, "corpus");
  require_path(cfg.paths.index, "index");
  Corpus corpus = ingest_corpus(cfg.paths.corpus);
  if (corpus.doc_count() == 0) {
    std::cerr << "warning: corpus is empty; retrieval over it will fail\n";
  }
  Bm25Index index = Bm25Index::build(corpus);
  ensure_parent_dir(cfg.paths.index);
  index.save(cfg.paths.index);
  std::cout << "ingested " << corpus.doc_count() << " docs -> " << cfg.paths.index << "\n";
}

std::vector<PerturbationSet> run_perturb(const PipelineConfig& cfg) {
  require_path(cfg.paths.qa, "qa");
  require_path(cfg.paths.perturbations, "perturbations");
  auto qa = load_qa(cfg.paths.qa);
  auto tables = tables_from_config(cfg);
  auto inventory = inventory_from_config(cfg);
  EntityPool pool = EntityPool::from_qa(qa);
  std::vector<PerturbationSet> sets;
  sets.reserve(qa.size());
  for (const auto& ex : qa) {
    sets.push_back(
        generate_perturbation_set(ex, cfg.perturb.k, pool, cfg.perturb.seed, tables, inventory));
  }
  ensure_parent_dir(cfg.paths.perturbations);
  write_perturbations(sets, cfg.paths.perturbations);
  std::cout << "perturbed " << qa.size() << " queries (k=" << cfg.perturb.k << ") -> "
            << cfg.paths.perturbations << "\n";
  return sets;
}

DistillDataset run_distill(const PipelineConfig& cfg) {
  require_path(cfg.paths.corpus, "corpus");
  require_path(cfg.paths.index, "index");
  require_path(cfg.paths.qa, "qa");
  require_path(cfg.paths.perturbations, "perturbations");
  require_path(cfg.paths.dataset, "dataset");

  Corpus corpus = ingest_corpus(cfg.paths.corpus);
  Bm25Index index = Bm25Index::load(cfg.paths.index);
  auto qa = load_qa(cfg.paths.qa);
  auto sets = read_perturbations(cfg.paths.perturbations);
  GeneratorBackend backend = backend_from_config(cfg);

  DistillDataset ds;
  ds.k = cfg.perturb.k;
  ds.n_neg = cfg.distill.n_neg;
  ds.seed = cfg.distill.seed;
  ds.provenance.queries = qa.size();
  ds.provenance.config_hash = config_hash(cfg);

  for (const auto& ex : qa) {
    auto set_it = std::find_if(sets.begin(), sets.end(),
                               [&](const PerturbationSet& s) { return s.source_id == ex.id; });
    if (set_it == sets.end()) {
      throw std::runtime_error("no perturbation set for query " + ex.id);
    }
    CandidatePools pools = build_candidate_pools(ex, *set_it, index, cfg.distill.m);
    LabelMap labels = label_pools(ex, *set_it, pools, corpus, backend);
    auto groups = build_listwise_groups(pools, *set_it, labels, cfg.distill.n_neg,
                                        cfg.distill.seed);
    ds.provenance.skipped_groups += set_it->members.size() - groups.size();
    for (auto& g : groups) ds.groups.push_back(std::move(g));
  }
  ensure_parent_dir(cfg.paths.dataset);
  write_dataset(ds, cfg.paths.dataset);
  std::cout << "distilled " << ds.groups.size() << " listwise groups ("
            << ds.provenance.skipped_groups << " skipped) -> " << cfg.paths.dataset << "\n";
  return ds;
}

CriticParams run_train(const PipelineConfig& cfg) {
  require_path(cfg.paths.corpus, "corpus");
  require_path(cfg.paths.index, "index");
  require_path(cfg.paths.dataset, "dataset");
  require_path(cfg.paths.params, "params");

  Corpus corpus = ingest_corpus(cfg.paths.corpus);
  Bm25Index index = Bm25Index::load(cfg.paths.index);
  DistillDataset ds = read_dataset(cfg.paths.dataset);
  Featurizer featurizer(index, cfg.train.hash_bits);

  TrainConfig tc;
  tc.epochs = cfg.train.epochs;
  tc.batch_size = cfg.train.batch;
  tc.learning_rate = cfg.train.lr;
  tc.tau = cfg.train.tau;
  tc.lambda = cfg.train.lambda;
  tc.weight_decay = cfg.train.weight_decay;
  tc.seed = cfg.train.seed;
  tc.optimizer = cfg.train.optimizer == "sgd" ? Optimizer::Sgd : Optimizer::AdamW;

  TrainLog log;
  CriticParams params = train(ds, corpus, featurizer, tc, &log);
  ensure_parent_dir(cfg.paths.params);
  params.save(cfg.paths.params);
  if (!cfg.paths.train_log.empty()) {
    ensure_parent_dir(cfg.paths.train_log);
    log.save_csv(cfg.paths.train_log);
  }
  if (!log.epochs.empty()) {
    std::cout << "trained " << log.groups_used << " groups, final mean loss "
              << log.epochs.back().mean_total_loss << " -> " << cfg.paths.params << "\n";
  }
  return params;
}

namespace {

SystemEval evaluate_system(const std::string& system, const Corpus& corpus,
                           const Bm25Index& index, const std::vector<QaExample>& qa,
                           const std::vector<PerturbationSet>& sets, const CriticParams& params,
                           const Featurizer& featurizer, const GeneratorBackend& backend,
                           const PipelineConfig& cfg) {
  InferenceConfig icfg{cfg.infer.m, cfg.infer.c, cfg.infer.gamma};
  SystemEval out;
  out.system = system;

  std::vector<EvalRecord> clean_records, biased_records;
  std::vector<std::vector<std::string>> gold_pools;  // biased pools with >= 1 gold
  std::map<std::pair<std::size_t, std::string>, bool> has_gold;
  std::vector<std::size_t> bm25_gold_rank, system_gold_rank;

  for (std::size_t qi = 0; qi < qa.size(); ++qi) {
    const QaExample& ex = qa[qi];
    auto set_it = std::find_if(sets.begin(), sets.end(),
                               [&](const PerturbationSet& s) { return s.source_id == ex.id; });
    if (set_it == sets.end() || set_it->members.empty()) {
      throw std::runtime_error("no perturbation set for query " + ex.id);
    }
    const PerturbedQuery& member = set_it->members[qi % std::min<std::size_t>(
                                                            3, set_it->members.size())];

    // Clean condition.
    SimHints clean_hints{std::nullopt, ex.gold_answers};
    InferenceOutcome clean = answer_pipeline(ex.question, index, corpus, params, featurizer,
                                             backend, icfg, clean_hints);
    EvalRecord rc;
    rc.query_id = ex.id;
    rc.condition = "clean";
    rc.confidence = clean.confidence;
    rc.abstained = clean.status == InferenceStatus::Abstained;
    rc.correct = !rc.abstained && clean.answer && judge_correct(*clean.answer, ex.gold_answers);
    clean_records.push_back(rc);

    // Biased condition.
    SimHints biased_hints{member.bias_payload, ex.gold_answers};
    InferenceOutcome biased = answer_pipeline(member.text, index, corpus, params, featurizer,
                                              backend, icfg, biased_hints);
    EvalRecord rb;
    rb.query_id = ex.id;
    rb.condition = "biased";
    rb.ptype = to_string(member.ptype);
    rb.confidence = biased.confidence;
    rb.abstained = biased.status == InferenceStatus::Abstained;
    rb.correct = !rb.abstained && biased.answer && judge_correct(*biased.answer, ex.gold_answers);

    // Gold-rank annotations over the biased pool.
    auto pool = index.retrieve_top_m(member.text, cfg.infer.m);
    std::size_t bm25_rank = 0;
    for (const auto& c : pool) {
      if (doc_has_gold(*corpus.find(c.doc_id), ex.gold_answers)) {
        bm25_rank = c.retrieval_rank;
        break;
      }
    }
    if (bm25_rank > 0) {
      auto reranked = rerank(params, featurizer, member.text, pool, corpus);
      std::size_t sys_rank = 0;
      for (std::size_t r = 0; r < reranked.size(); ++r) {
        if (doc_has_gold(*corpus.find(reranked[r].doc_id), ex.gold_answers)) {
          sys_rank = r + 1;
          break;
        }
      }
      rb.gold_ranks["bm25"] = bm25_rank;
      rb.gold_ranks[system] = sys_rank;
      bm25_gold_rank.push_back(bm25_rank);
      system_gold_rank.push_back(sys_rank);

      std::size_t pool_index = gold_pools.size();
      std::vector<std::string> ranked_ids;
      for (const auto& sc : reranked) {
        ranked_ids.push_back(sc.doc_id);
        has_gold[{pool_index, sc.doc_id}] =
            doc_has_gold(*corpus.find(sc.doc_id), ex.gold_answers);
      }
      gold_pools.push_back(std::move(ranked_ids));
    }
    biased_records.push_back(std::move(rb));
  }

  out.report.acc_clean = accuracy(clean_records);
  out.report.acc_biased = accuracy(biased_records);
  out.report.robustness_gap = robustness_gap(out.report.acc_clean, out.report.acc_biased);

  std::map<std::string, std::pair<std::size_t, std::size_t>> per_type;  // correct, total
  for (const auto& r : biased_records) {
    auto& [correct, total] = per_type[*r.ptype];
    ++total;
    if (r.correct && !r.abstained) ++correct;
  }
  for (const auto& [type, counts] : per_type) {
    out.report.per_type_accuracy[type] =
        static_cast<double>(counts.first) / static_cast<double>(counts.second);
  }

  if (!gold_pools.empty()) {
    out.report.recall_at_k = recall_at_k(gold_pools, has_gold, cfg.eval.ks);
    out.report.paired = paired_rank_comparison(bm25_gold_rank, system_gold_rank);
  }
  out.report.risk_coverage = risk_coverage_curve(biased_records, cfg.eval.coverage_grid);

  out.records = std::move(clean_records);
  for (auto& r : biased_records) out.records.push_back(std::move(r));
  return out;
}

void write_comparison_csv(const EvalOutput& eval_out, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  out << "system,acc_clean,acc_biased,robustness_gap\n";
  char buf[160];
  for (const SystemEval* s : {&eval_out.baseline, &eval_out.critic}) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g\n", s->system.c_str(),
                  s->report.acc_clean, s->report.acc_biased, s->report.robustness_gap);
    out << buf;
  }
}

}  // namespace

EvalOutput run_eval(const PipelineConfig& cfg) {
  require_path(cfg.paths.corpus, "corpus");
  require_path(cfg.paths.index, "index");
  require_path(cfg.paths.qa, "qa");
  require_path(cfg.paths.perturbations, "perturbations");
  require_path(cfg.paths.params, "params");
  require_path(cfg.paths.report_dir, "report_dir");

  Corpus corpus = ingest_corpus(cfg.paths.corpus);
  Bm25Index index = Bm25Index::load(cfg.paths.index);
  auto qa = load_qa(cfg.paths.qa);
  auto sets = read_perturbations(cfg.paths.perturbations);
  CriticParams params = CriticParams::load(cfg.paths.params);
  int hash_bits = cfg.train.hash_bits;
  Featurizer featurizer(index, hash_bits);
  if (featurizer.version() != params.version) {
    throw std::runtime_error("params feature map '" + params.version +
                             "' does not match configured hash_bits");
  }
  GeneratorBackend backend = backend_from_config(cfg);

  EvalOutput out;
  out.critic = evaluate_system("critic", corpus, index, qa, sets, params, featurizer, backend,
                               cfg);
  CriticParams zero = CriticParams::zeros(featurizer);
  out.baseline =
      evaluate_system("bm25", corpus, index, qa, sets, zero, featurizer, backend, cfg);

  std::filesystem::create_directories(cfg.paths.report_dir);
  emit_report(out.critic.report, cfg.paths.report_dir + "/critic");
  emit_report(out.baseline.report, cfg.paths.report_dir + "/baseline");
  write_records(out.critic.records, cfg.paths.report_dir + "/critic/records.jsonl");
  write_records(out.baseline.records, cfg.paths.report_dir + "/baseline/records.jsonl");
  write_comparison_csv(out, cfg.paths.report_dir + "/comparison.csv");

  // Paired-rank scatter pairs for the critic system.
  {
    std::ofstream pairs(cfg.paths.report_dir + "/critic/paired_rank.csv", std::ios::trunc);
    pairs << "query_id,rank_bm25,rank_critic\n";
    for (const auto& r : out.critic.records) {
      auto a = r.gold_ranks.find("bm25");
      auto b = r.gold_ranks.find("critic");
      if (a != r.gold_ranks.end() && b != r.gold_ranks.end()) {
        pairs << r.query_id << "," << a->second << "," << b->second << "\n";
      }
    }
  }

  std::cout << "eval: critic acc_clean=" << out.critic.report.acc_clean
            << " acc_biased=" << out.critic.report.acc_biased
            << " gap=" << out.critic.report.robustness_gap
            << " | bm25 acc_clean=" << out.baseline.report.acc_clean
            << " acc_biased=" << out.baseline.report.acc_biased
            << " gap=" << out.baseline.report.robustness_gap << "\n";
  return out;
}

EvalOutput run_demo(const PipelineConfig& cfg) {
  run_ingest(cfg);
  run_perturb(cfg);
  run_distill(cfg);
  run_train(cfg);
  return run_eval(cfg);
}

std::vector<SweepRow> run_sweep(const PipelineConfig& cfg, const std::string& parameter,
                                const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("sweep requires at least one value");
  if (parameter != "k" && parameter != "tau" && parameter != "m" && parameter != "gamma") {
    throw std::invalid_argument("sweep parameter must be one of k, tau, m, gamma");
  }
  require_path(cfg.paths.report_dir, "report_dir");
  std::filesystem::create_directories(cfg.paths.report_dir);

  bool retrain = parameter == "k" || parameter == "tau";
  std::vector<SweepRow> rows;

  PipelineConfig base = cfg;
  if (!retrain) {
    // One critic shared across all inference-time values.
    run_ingest(base);
    run_perturb(base);
    run_distill(base);
    run_train(base);
  }

  for (double value : values) {
    PipelineConfig run = base;
    std::string tag = parameter + "_" + std::to_string(value);
    std::string dir = cfg.paths.report_dir + "/" + tag;
    std::filesystem::create_directories(dir);
    run.paths.report_dir = dir;
    if (parameter == "k") {
      run.perturb.k = static_cast<std::size_t>(value);
      if (run.perturb.k < 1) throw std::invalid_argument("sweep k values must be >= 1");
    } else if (parameter == "tau") {
      run.train.tau = value;
    } else if (parameter == "m") {
      run.infer.m = static_cast<std::size_t>(value);
    } else {
      run.infer.gamma = value;
    }
    run.validate();

    if (retrain) {
      run.paths.index = dir + "/index.json";
      run.paths.perturbations = dir + "/perturbations.jsonl";
      run.paths.dataset = dir + "/dataset.jsonl";
      run.paths.params = dir + "/critic.json";
      run.paths.train_log = dir + "/train_log.csv";
      run_ingest(run);
      run_perturb(run);
      run_distill(run);
      run_train(run);
    }
    EvalOutput eval_out = run_eval(run);
    rows.push_back({parameter, value, eval_out.critic.report.acc_clean,
                    eval_out.critic.report.acc_biased, eval_out.critic.report.robustness_gap});
  }

  std::ofstream out(cfg.paths.report_dir + "/sweep.csv", std::ios::trunc);
  out << "parameter,value,acc_clean,acc_biased,robustness_gap\n";
  char buf[200];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.17g,%.17g,%.17g,%.17g\n", r.parameter.c_str(), r.value,
                  r.acc_clean, r.acc_biased, r.robustness_gap);
    out << buf;
  }
  return rows;
}

InferenceOutcome run_infer(const PipelineConfig& cfg, const InferRequest& request) {
  require_path(cfg.paths.corpus, "corpus");
  require_path(cfg.paths.index, "index");
  require_path(cfg.paths.params, "params");
  Corpus corpus = ingest_corpus(cfg.paths.corpus);
  Bm25Index index = Bm25Index::load(cfg.paths.index);
  CriticParams params = CriticParams::load(cfg.paths.params);
  Featurizer featurizer(index, cfg.train.hash_bits);
  GeneratorBackend backend = backend_from_config(cfg);
  SimHints hints;
  hints.gold_aliases = request.gold_hint;
  if (!request.payload_hint.empty()) hints.payload = request.payload_hint;
  InferenceConfig icfg{cfg.infer.m, cfg.infer.c, cfg.infer.gamma};
  return answer_pipeline(request.query, index, corpus, params, featurizer, backend, icfg, hints);
}

}  // namespace corm
