// SPDX-License-Identifier: Apache-2.0
#include "corm/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace corm {

double accuracy(const std::vector<EvalRecord>& records) {
  if (records.empty()) throw std::invalid_argument("accuracy over an empty record list");
  std::size_t correct = 0;
  for (const auto& r : records) {
    if (r.correct && !r.abstained) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(records.size());
}

double robustness_gap(double clean_acc, double biased_acc) { return clean_acc - biased_acc; }

std::vector<RiskCoveragePoint> risk_coverage_curve(const std::vector<EvalRecord>& records,
                                                   const std::vector<double>& grid) {
  if (records.empty()) throw std::invalid_argument("risk-coverage over an empty record list");
  if (grid.empty()) throw std::invalid_argument("empty coverage grid");
  for (double c : grid) {
    if (c <= 0.0 || c > 1.0) {
      throw std::invalid_argument("coverage levels must lie in (0,1]");
    }
  }
  std::vector<const EvalRecord*> sorted;
  sorted.reserve(records.size());
  for (const auto& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](const EvalRecord* a, const EvalRecord* b) {
    if (a->confidence != b->confidence) return a->confidence > b->confidence;
    return a->query_id < b->query_id;
  });

  std::vector<double> levels = grid;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  std::vector<RiskCoveragePoint> curve;
  double n = static_cast<double>(sorted.size());
  for (double c : levels) {
    std::size_t take = static_cast<std::size_t>(std::ceil(c * n));
    take = std::min(take, sorted.size());
    if (take == 0) take = 1;
    std::size_t correct = 0;
    for (std::size_t i = 0; i < take; ++i) {
      if (sorted[i]->correct && !sorted[i]->abstained) ++correct;
    }
    RiskCoveragePoint pt;
    pt.coverage = c;
    pt.selective_accuracy = static_cast<double>(correct) / static_cast<double>(take);
    pt.threshold = sorted[take - 1]->confidence;
    curve.push_back(pt);
  }
  return curve;
}

std::map<std::size_t, double> recall_at_k(
    const std::vector<std::vector<std::string>>& pools,
    const std::map<std::pair<std::size_t, std::string>, bool>& has_gold,
    const std::vector<std::size_t>& ks) {
  if (pools.empty()) throw std::invalid_argument("recall over an empty pool list");
  std::vector<std::size_t> gold_rank(pools.size(), 0);
  for (std::size_t q = 0; q < pools.size(); ++q) {
    std::size_t best = 0;
    for (std::size_t r = 0; r < pools[q].size(); ++r) {
      auto it = has_gold.find({q, pools[q][r]});
      if (it != has_gold.end() && it->second) {
        best = r + 1;
        break;
      }
    }
    if (best == 0) {
      throw std::invalid_argument("query " + std::to_string(q) +
                                  " has no gold doc in its pool; pre-filter the query set");
    }
    gold_rank[q] = best;
  }
  std::map<std::size_t, double> out;
  for (std::size_t k : ks) {
    std::size_t hits = 0;
    for (std::size_t rank : gold_rank) {
      if (rank <= k) ++hits;
    }
    out[k] = static_cast<double>(hits) / static_cast<double>(pools.size());
  }
  return out;
}

PairedRankFractions paired_rank_comparison(const std::vector<std::size_t>& ranks_a,
                                           const std::vector<std::size_t>& ranks_b) {
  if (ranks_a.size() != ranks_b.size()) {
    throw std::invalid_argument("paired rank comparison needs the same query set");
  }
  if (ranks_a.empty()) throw std::invalid_argument("paired rank comparison over no queries");
  std::size_t wb = 0, tie = 0, wa = 0;
  for (std::size_t i = 0; i < ranks_a.size(); ++i) {
    if (ranks_b[i] < ranks_a[i]) {
      ++wb;
    } else if (ranks_b[i] == ranks_a[i]) {
      ++tie;
    } else {
      ++wa;
    }
  }
  double n = static_cast<double>(ranks_a.size());
  return {static_cast<double>(wb) / n, static_cast<double>(tie) / n,
          static_cast<double>(wa) / n};
}

namespace {

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["acc_clean"] = report.acc_clean;
  j["acc_biased"] = report.acc_biased;
  j["robustness_gap"] = report.robustness_gap;
  if (!report.per_type_accuracy.empty()) {
    nlohmann::ordered_json per;
    for (const auto& [type, acc] : report.per_type_accuracy) per[type] = acc;
    j["per_type_accuracy"] = std::move(per);
  }
  if (!report.recall_at_k.empty()) {
    nlohmann::ordered_json rec = nlohmann::ordered_json::array();
    for (const auto& [k, v] : report.recall_at_k) {
      rec.push_back({{"k", k}, {"recall", v}});
    }
    j["recall_at_k"] = std::move(rec);
  }
  if (report.paired) {
    j["paired_rank"] = {{"win_b", report.paired->win_b},
                        {"tie", report.paired->tie},
                        {"win_a", report.paired->win_a}};
  }
  if (!report.risk_coverage.empty()) {
    nlohmann::ordered_json rc = nlohmann::ordered_json::array();
    for (const auto& pt : report.risk_coverage) {
      rc.push_back({{"coverage", pt.coverage},
                    {"selective_accuracy", pt.selective_accuracy},
                    {"threshold", pt.threshold}});
    }
    j["risk_coverage"] = std::move(rc);
  }
  return j;
}

}  // namespace

void emit_report(const EvalReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir + "/report.json", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write report to " + dir);
    out << report_to_json(report).dump(2) << "\n";
  }
  {
    std::ofstream out(dir + "/risk_coverage.csv", std::ios::trunc);
    out << "coverage,selective_accuracy\n";
    char buf[96];
    for (const auto& pt : report.risk_coverage) {
      std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", pt.coverage, pt.selective_accuracy);
      out << buf;
    }
  }
  {
    std::ofstream out(dir + "/recall_at_k.csv", std::ios::trunc);
    out << "k,recall\n";
    char buf[64];
    for (const auto& [k, v] : report.recall_at_k) {
      std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", k, v);
      out << buf;
    }
  }
}

EvalReport read_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open report file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("report file " + path + ": " + e.what());
  }
  EvalReport r;
  r.acc_clean = j.at("acc_clean").get<double>();
  r.acc_biased = j.at("acc_biased").get<double>();
  r.robustness_gap = j.at("robustness_gap").get<double>();
  if (j.contains("per_type_accuracy")) {
    for (const auto& [type, acc] : j.at("per_type_accuracy").items()) {
      r.per_type_accuracy[type] = acc.get<double>();
    }
  }
  if (j.contains("recall_at_k")) {
    for (const auto& entry : j.at("recall_at_k")) {
      r.recall_at_k[entry.at("k").get<std::size_t>()] = entry.at("recall").get<double>();
    }
  }
  if (j.contains("paired_rank")) {
    PairedRankFractions p;
    p.win_b = j.at("paired_rank").at("win_b").get<double>();
    p.tie = j.at("paired_rank").at("tie").get<double>();
    p.win_a = j.at("paired_rank").at("win_a").get<double>();
    r.paired = p;
  }
  if (j.contains("risk_coverage")) {
    for (const auto& entry : j.at("risk_coverage")) {
      RiskCoveragePoint pt;
      pt.coverage = entry.at("coverage").get<double>();
      pt.selective_accuracy = entry.at("selective_accuracy").get<double>();
      pt.threshold = entry.value("threshold", 0.0);
      r.risk_coverage.push_back(pt);
    }
  }
  return r;
}

void write_records(const std::vector<EvalRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write records file: " + path);
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["query_id"] = r.query_id;
    j["condition"] = r.condition;
    if (r.ptype) j["ptype"] = *r.ptype;
    j["confidence"] = r.confidence;
    j["correct"] = r.correct;
    j["abstained"] = r.abstained;
    if (!r.gold_ranks.empty()) {
      nlohmann::ordered_json ranks;
      for (const auto& [system, rank] : r.gold_ranks) ranks[system] = rank;
      j["gold_ranks"] = std::move(ranks);
    }
    out << j.dump() << "\n";
  }
}

std::vector<EvalRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open records file: " + path);
  std::vector<EvalRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      EvalRecord r;
      r.query_id = j.at("query_id").get<std::string>();
      r.condition = j.at("condition").get<std::string>();
      if (j.contains("ptype") && !j.at("ptype").is_null()) {
        r.ptype = j.at("ptype").get<std::string>();
      }
      r.confidence = j.at("confidence").get<double>();
      r.correct = j.at("correct").get<bool>();
      r.abstained = j.at("abstained").get<bool>();
      if (j.contains("gold_ranks")) {
        for (const auto& [system, rank] : j.at("gold_ranks").items()) {
          r.gold_ranks[system] = rank.get<std::size_t>();
        }
      }
      out.push_back(std::move(r));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad eval record: " +
                               e.what());
    }
  }
  return out;
}

}  // namespace corm
