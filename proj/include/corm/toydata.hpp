// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corm/corpus.hpp"
#include "corm/perturbation.hpp"

namespace corm {

/// The shipped desk-scale benchmark: ~200 docs, 50 QA. Built from a fixed
/// fact table plus the perturbation protocol itself, so every sycophantic
/// document embeds exactly the payload the seeded adversary will produce.
struct ToyBenchmark {
  Corpus corpus;
  std::vector<QaExample> qa;
};

ToyBenchmark make_toy_benchmark(std::uint64_t seed = 42, std::size_t k = 5);

/// Writes corpus.jsonl and qa.jsonl under dir.
void write_toy_benchmark(const ToyBenchmark& bench, const std::string& dir);

/// Writes templates.json and distractors.json (the compiled-in tables) under
/// dir.
void write_builtin_data_files(const std::string& dir);

}  // namespace corm
