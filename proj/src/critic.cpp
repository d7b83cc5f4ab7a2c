// SPDX-License-Identifier: Apache-2.0
#include "corm/critic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "corm/rng.hpp"
#include "corm/text.hpp"

namespace corm {

namespace {

std::vector<std::string> bigrams(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  if (tokens.size() < 2) return out;
  out.reserve(tokens.size() - 1);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    out.push_back(tokens[i] + " " + tokens[i + 1]);
  }
  return out;
}

}  // namespace

Featurizer::Featurizer(const Bm25Index& index, int hash_bits)
    : index_(&index), hash_bits_(hash_bits) {
  if (hash_bits < 1 || hash_bits > 24) {
    throw std::invalid_argument("hash_bits must be in [1, 24]");
  }
  version_ = "fm1:h=" + std::to_string(hash_bits);
}

FeatureVector Featurizer::operator()(const std::string& query_text, const Document& doc) const {
  FeatureVector fv;
  fv.version = version_;

  auto q_tokens = tokenize(query_text);
  auto d_tokens = tokenize(doc.text);

  std::set<std::string> q_set(q_tokens.begin(), q_tokens.end());
  std::set<std::string> d_set(d_tokens.begin(), d_tokens.end());
  std::map<std::string, std::size_t> d_tf;
  for (const auto& t : d_tokens) ++d_tf[t];

  // f0: BM25 against the index statistics, document stats recomputed locally
  // so any Document scores, in or out of the corpus.
  double dl = static_cast<double>(d_tokens.size());
  double avgdl = index_->avg_doc_length();
  double norm = avgdl > 0.0 ? dl / avgdl : 0.0;
  const auto& bp = index_->params();
  double f0 = 0.0;
  for (const auto& t : q_tokens) {
    auto it = d_tf.find(t);
    if (it == d_tf.end()) continue;
    double tf = static_cast<double>(it->second);
    f0 += index_->idf(t) * tf * (bp.k1 + 1.0) / (tf + bp.k1 * (1.0 - bp.b + bp.b * norm));
  }
  fv.dense[0] = f0;

  // f1/f2: unigram overlap, plain and idf-weighted.
  std::vector<std::string> inter;
  double idf_total = 0.0, idf_hit = 0.0;
  for (const auto& t : q_set) {
    double w = index_->idf(t);
    idf_total += w;
    if (d_set.count(t)) {
      inter.push_back(t);
      idf_hit += w;
    }
  }
  fv.dense[1] = q_set.empty() ? 0.0
                              : static_cast<double>(inter.size()) /
                                    static_cast<double>(q_set.size());
  fv.dense[2] = idf_total > 0.0 ? idf_hit / idf_total : 0.0;

  // f3: bigram overlap.
  auto q_bi = bigrams(q_tokens);
  std::set<std::string> q_bi_set(q_bi.begin(), q_bi.end());
  auto d_bi = bigrams(d_tokens);
  std::set<std::string> d_bi_set(d_bi.begin(), d_bi.end());
  std::vector<std::string> bi_inter;
  for (const auto& b : q_bi_set) {
    if (d_bi_set.count(b)) bi_inter.push_back(b);
  }
  fv.dense[3] = static_cast<double>(bi_inter.size()) /
                std::max<double>(1.0, static_cast<double>(q_bi_set.size()));

  fv.dense[4] = std::log1p(dl);

  std::size_t q_content = 0, missing = 0;
  for (const auto& t : q_set) {
    if (is_stopword(t)) continue;
    ++q_content;
    if (!d_set.count(t)) ++missing;
  }
  fv.dense[5] = q_content ? static_cast<double>(missing) / static_cast<double>(q_content) : 0.0;

  // Signed hashing of intersection unigrams and bigrams.
  std::uint32_t mask = (std::uint32_t{1} << hash_bits_) - 1;
  std::map<std::uint32_t, double> buckets;
  auto hash_in = [&](const std::string& ns, const std::vector<std::string>& grams) {
    for (const auto& g : grams) {
      std::uint64_t h = fnv1a64(ns + "\x1f" + g);
      double sign = (h >> 63) ? -1.0 : 1.0;
      buckets[static_cast<std::uint32_t>(h) & mask] += sign;
    }
  };
  hash_in("u", inter);
  hash_in("b", bi_inter);
  fv.hashed.reserve(buckets.size());
  for (const auto& [bucket, value] : buckets) {
    if (value != 0.0) fv.hashed.emplace_back(bucket, value);
  }
  return fv;
}

CriticParams CriticParams::zeros(const Featurizer& featurizer) {
  CriticParams p;
  p.weights.assign(featurizer.weight_count(), 0.0);
  p.bias = 0.0;
  p.version = featurizer.version();
  return p;
}

double score(const CriticParams& params, const FeatureVector& fv) {
  if (params.version != fv.version) {
    throw std::invalid_argument("feature-map version mismatch: params '" + params.version +
                                "' vs features '" + fv.version + "'");
  }
  double z = params.bias;
  for (std::size_t i = 0; i < kDenseFeatureCount; ++i) {
    z += params.weights[i] * fv.dense[i];
  }
  for (const auto& [bucket, value] : fv.hashed) {
    z += params.weights[kDenseFeatureCount + bucket] * value;
  }
  return z;
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

double rank_loss(const GroupLogits& g) {
  if (g.z.size() != g.targets.size()) {
    throw std::invalid_argument("logit/target size mismatch");
  }
  if (g.z.empty()) throw std::invalid_argument("empty group");
  if (g.tau <= 0.0) throw std::invalid_argument("tau must be > 0");
  double target_sum = 0.0;
  for (double s : g.targets) target_sum += s;
  if (target_sum <= 0.0) {
    throw std::logic_error("rank_loss on a group with zero target mass; mask it");
  }
  double zmax = *std::max_element(g.z.begin(), g.z.end());
  double denom = 0.0;
  for (double z : g.z) denom += std::exp((z - zmax) / g.tau);
  double log_denom = std::log(denom);
  double loss = 0.0;
  for (std::size_t i = 0; i < g.z.size(); ++i) {
    double p = g.targets[i] / target_sum;
    if (p == 0.0) continue;
    double log_q = (g.z[i] - zmax) / g.tau - log_denom;
    loss -= p * log_q;
  }
  return loss;
}

double conf_loss(const GroupLogits& g) {
  if (g.z.size() != g.targets.size()) {
    throw std::invalid_argument("logit/target size mismatch");
  }
  double loss = 0.0;
  for (std::size_t i = 0; i < g.z.size(); ++i) {
    double z = g.z[i], s = g.targets[i];
    loss += std::max(z, 0.0) - s * z + std::log1p(std::exp(-std::abs(z)));
  }
  return loss;
}

LossBreakdown total_loss_and_grad(const CriticParams& params, std::span<const TrainGroup> batch,
                                  double tau, double lambda, std::vector<double>& grad_weights,
                                  double& grad_bias) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  if (grad_weights.size() != params.weights.size()) {
    grad_weights.assign(params.weights.size(), 0.0);
  } else {
    std::fill(grad_weights.begin(), grad_weights.end(), 0.0);
  }
  grad_bias = 0.0;

  LossBreakdown out;
  for (const auto& group : batch) {
    double target_sum = 0.0;
    for (double s : group.targets) target_sum += s;
    if (target_sum <= 0.0) continue;  // masked: zero loss, zero gradient

    GroupLogits gl;
    gl.tau = tau;
    gl.targets = group.targets;
    gl.z.reserve(group.docs.size());
    for (const auto& fv : group.docs) gl.z.push_back(score(params, fv));

    out.rank += rank_loss(gl);
    out.conf += conf_loss(gl);
    ++out.contributing_groups;

    // d rank / d z_i = (softmax(z/tau)_i - p_i) / tau
    // d conf / d z_i = sigmoid(z_i) - s_i
    double zmax = *std::max_element(gl.z.begin(), gl.z.end());
    double denom = 0.0;
    for (double z : gl.z) denom += std::exp((z - zmax) / tau);
    for (std::size_t i = 0; i < gl.z.size(); ++i) {
      double q = std::exp((gl.z[i] - zmax) / tau) / denom;
      double p = gl.targets[i] / target_sum;
      double coeff = (q - p) / tau + lambda * (sigmoid(gl.z[i]) - gl.targets[i]);
      const FeatureVector& fv = group.docs[i];
      for (std::size_t d = 0; d < kDenseFeatureCount; ++d) {
        grad_weights[d] += coeff * fv.dense[d];
      }
      for (const auto& [bucket, value] : fv.hashed) {
        grad_weights[kDenseFeatureCount + bucket] += coeff * value;
      }
      grad_bias += coeff;
    }
  }
  if (out.contributing_groups == 0) {
    throw std::runtime_error("every group in the batch is masked (zero target mass)");
  }
  double inv = 1.0 / static_cast<double>(out.contributing_groups);
  for (auto& g : grad_weights) g *= inv;
  grad_bias *= inv;
  out.rank *= inv;
  out.conf *= inv;
  out.total = out.rank + lambda * out.conf;
  return out;
}

LossBreakdown total_loss_and_grad(const CriticParams& params,
                                  const std::vector<ListwiseGroup>& batch, const Corpus& corpus,
                                  const Featurizer& featurizer, double tau, double lambda,
                                  std::vector<double>& grad_weights, double& grad_bias) {
  std::vector<TrainGroup> feats;
  feats.reserve(batch.size());
  for (const auto& g : batch) {
    TrainGroup tg;
    tg.docs.reserve(g.docs.size());
    tg.targets.reserve(g.docs.size());
    for (const auto& d : g.docs) {
      const Document* doc = corpus.find(d.doc_id);
      if (!doc) throw std::runtime_error("group references unknown doc id: " + d.doc_id);
      tg.docs.push_back(featurizer(g.perturbed_text, *doc));
      tg.targets.push_back(d.score);
    }
    feats.push_back(std::move(tg));
  }
  return total_loss_and_grad(params, feats, tau, lambda, grad_weights, grad_bias);
}

void TrainLog::save_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write training log: " + path);
  out << "epoch,mean_rank_loss,mean_conf_loss,mean_total\n";
  char buf[160];
  for (const auto& e : epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", e.epoch, e.mean_rank_loss,
                  e.mean_conf_loss, e.mean_total_loss);
    out << buf;
  }
}

CriticParams train(const DistillDataset& ds, const Corpus& corpus, const Featurizer& featurizer,
                   const TrainConfig& cfg, TrainLog* log) {
  if (cfg.epochs < 1 || cfg.batch_size < 1) {
    throw std::invalid_argument("epochs and batch_size must be >= 1");
  }
  if (cfg.learning_rate <= 0.0 || cfg.tau <= 0.0 || cfg.lambda < 0.0 || cfg.weight_decay < 0.0) {
    throw std::invalid_argument("bad training hyperparameter");
  }

  // Featurize every group once; mask degenerate groups up front.
  std::vector<TrainGroup> groups;
  std::size_t masked = 0;
  for (const auto& g : ds.groups) {
    TrainGroup tg;
    double target_sum = 0.0;
    for (const auto& d : g.docs) {
      const Document* doc = corpus.find(d.doc_id);
      if (!doc) throw std::runtime_error("group references unknown doc id: " + d.doc_id);
      tg.docs.push_back(featurizer(g.perturbed_text, *doc));
      tg.targets.push_back(d.score);
      target_sum += d.score;
    }
    if (target_sum > 0.0) {
      groups.push_back(std::move(tg));
    } else {
      ++masked;
    }
  }
  if (groups.empty()) {
    throw std::runtime_error("dataset is empty after masking degenerate groups");
  }
  if (log) {
    log->groups_used = groups.size();
    log->groups_masked = masked;
  }

  CriticParams params = CriticParams::zeros(featurizer);
  const std::size_t n_params = params.weights.size();
  std::vector<double> grad_w(n_params, 0.0);
  double grad_b = 0.0;

  std::vector<double> m_w, v_w;
  double m_b = 0.0, v_b = 0.0;
  if (cfg.optimizer == Optimizer::AdamW) {
    m_w.assign(n_params, 0.0);
    v_w.assign(n_params, 0.0);
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

  std::vector<std::size_t> order(groups.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(cfg.seed);
  long step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_rank = 0.0, epoch_conf = 0.0;
    std::size_t epoch_groups = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<TrainGroup> batch;
      batch.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) batch.push_back(groups[order[i]]);

      LossBreakdown loss = total_loss_and_grad(params, batch, cfg.tau, cfg.lambda, grad_w, grad_b);
      if (!std::isfinite(loss.total)) {
        throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch + 1) +
                                 ", step " + std::to_string(step) + ": total=" +
                                 std::to_string(loss.total));
      }
      epoch_rank += loss.rank * static_cast<double>(loss.contributing_groups);
      epoch_conf += loss.conf * static_cast<double>(loss.contributing_groups);
      epoch_groups += loss.contributing_groups;

      ++step;
      if (cfg.optimizer == Optimizer::AdamW) {
        double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
        double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
        for (std::size_t i = 0; i < n_params; ++i) {
          double g = grad_w[i];
          m_w[i] = kBeta1 * m_w[i] + (1.0 - kBeta1) * g;
          v_w[i] = kBeta2 * v_w[i] + (1.0 - kBeta2) * g * g;
          double update = (m_w[i] / bc1) / (std::sqrt(v_w[i] / bc2) + kEps);
          params.weights[i] -= cfg.learning_rate * (update + cfg.weight_decay * params.weights[i]);
        }
        m_b = kBeta1 * m_b + (1.0 - kBeta1) * grad_b;
        v_b = kBeta2 * v_b + (1.0 - kBeta2) * grad_b * grad_b;
        params.bias -= cfg.learning_rate * ((m_b / bc1) / (std::sqrt(v_b / bc2) + kEps));
      } else {
        for (std::size_t i = 0; i < n_params; ++i) {
          params.weights[i] -=
              cfg.learning_rate * (grad_w[i] + cfg.weight_decay * params.weights[i]);
        }
        params.bias -= cfg.learning_rate * grad_b;
      }
    }
    if (log) {
      EpochStats stats;
      stats.epoch = epoch + 1;
      stats.mean_rank_loss = epoch_rank / static_cast<double>(epoch_groups);
      stats.mean_conf_loss = epoch_conf / static_cast<double>(epoch_groups);
      stats.mean_total_loss = stats.mean_rank_loss + cfg.lambda * stats.mean_conf_loss;
      log->epochs.push_back(stats);
    }
  }
  return params;
}

double predict_robustness(const CriticParams& params, const Featurizer& featurizer,
                          const std::string& query_text, const Document& doc) {
  return sigmoid(score(params, featurizer(query_text, doc)));
}

namespace {
constexpr const char* kParamsVersion = "CORMPM1";
}

void CriticParams::save(const std::string& path) const {
  nlohmann::ordered_json j;
  j["version"] = kParamsVersion;
  j["feature_map_version"] = version;
  j["weights"] = weights;
  j["bias"] = bias;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write params file: " + path);
  out << j.dump() << "\n";
  if (!out) throw std::runtime_error("I/O error writing params file: " + path);
}

CriticParams CriticParams::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open params file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("params file " + path + ": " + e.what());
  }
  std::string version = j.value("version", std::string{});
  if (version != kParamsVersion) {
    throw std::runtime_error("params file " + path + ": unsupported version '" + version + "'");
  }
  CriticParams p;
  p.version = j.at("feature_map_version").get<std::string>();
  p.weights = j.at("weights").get<std::vector<double>>();
  p.bias = j.at("bias").get<double>();
  for (double w : p.weights) {
    if (!std::isfinite(w)) throw std::runtime_error("params file contains non-finite weight");
  }
  if (!std::isfinite(p.bias)) throw std::runtime_error("params file contains non-finite bias");
  return p;
}

}  // namespace corm
