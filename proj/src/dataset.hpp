// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef MRCAP_DATASET_HPP
#define MRCAP_DATASET_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mrcap {

// Synthetic word dataset: N total words drawn uniformly from a fixed
// vocabulary of U distinct fixed-width words. Fully deterministic: equal
// specs produce byte-identical data.
struct DatasetSpec {
  std::uint64_t total_words = 0;   // N
  std::uint64_t unique_words = 0;  // U
  std::uint64_t seed = 0;
  unsigned word_len = 6;  // characters, 'a'..'z'

  // Throws Error(Config) when invariants are violated.
  void validate() const;
};

struct WordChunk {
  std::uint32_t rank = 0;
  std::vector<std::string> words;
};

// Word i is the base-26 rendering of i over 'a'..'z', left-padded with 'a'
// to word_len. Lexicographically ordered by construction.
std::vector<std::string> vocabulary(const DatasetSpec& spec);

// Single word of the vocabulary without materializing the whole list.
std::string vocabulary_word(std::uint64_t index, unsigned word_len);

// Deterministic chunk for one rank. The first (N mod R) ranks hold
// ceil(N/R) words, the rest floor(N/R). Word choice is a counter-based
// function of (seed, rank, position): a splitmix64-style finalizer over the
// combined key, so any chunk regenerates in isolation. The mixing function
// is fixed; changing it changes every generated dataset.
WordChunk generate_chunk(const DatasetSpec& spec, std::uint32_t rank,
                         std::uint32_t num_ranks);

// Number of words rank r receives under the block split.
std::uint64_t chunk_length(const DatasetSpec& spec, std::uint32_t rank,
                           std::uint32_t num_ranks);

// Serial brute-force word counts over all chunks; the wordcount oracle.
std::map<std::string, std::uint64_t> expected_counts(const DatasetSpec& spec,
                                                     std::uint32_t num_ranks);

// Fraction of the chunk a perfect combiner eliminates: (len - distinct)/len.
// Empty chunk -> 0.
double combinability(const WordChunk& chunk);

// Distinct words in a chunk (combiner output size for that rank).
std::uint64_t distinct_words(const WordChunk& chunk);

}  // namespace mrcap

#endif
