// Copyright 2026 The mrcap Authors
// SPDX-License-Identifier: Apache-2.0

#include "dataset.hpp"

#include <unordered_set>

#include "error.hpp"

namespace mrcap {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

std::uint64_t draw(std::uint64_t seed, std::uint32_t rank,
                   std::uint64_t position) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (kGolden * (rank + 1)));
  h = mix64(h ^ (kGolden * (position + 1)));
  return h;
}

// Unbiased-enough map of a 64-bit draw onto [0, n).
std::uint64_t bounded(std::uint64_t x, std::uint64_t n) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(x) * n) >> 64);
}

// 26^word_len >= u without overflow.
bool encodable(std::uint64_t u, unsigned word_len) {
  std::uint64_t cap = 1;
  for (unsigned i = 0; i < word_len; ++i) {
    if (cap >= u) return true;
    if (cap > UINT64_MAX / 26) return true;
    cap *= 26;
  }
  return cap >= u;
}

}  // namespace

void DatasetSpec::validate() const {
  if (unique_words < 1 || unique_words > total_words)
    throw Error(ErrorKind::Config,
                "dataset: need 1 <= unique_words <= total_words");
  if (word_len < 1)
    throw Error(ErrorKind::Config, "dataset: word_len must be positive");
  if (!encodable(unique_words, word_len))
    throw Error(ErrorKind::Config,
                "dataset: word_len too small to encode unique_words words");
}

std::string vocabulary_word(std::uint64_t index, unsigned word_len) {
  std::string w(word_len, 'a');
  for (unsigned pos = word_len; pos-- > 0 && index > 0;) {
    w[pos] = static_cast<char>('a' + index % 26);
    index /= 26;
  }
  if (index > 0)
    throw Error(ErrorKind::Config, "dataset: word index exceeds word_len");
  return w;
}

std::vector<std::string> vocabulary(const DatasetSpec& spec) {
  spec.validate();
  std::vector<std::string> words;
  words.reserve(spec.unique_words);
  for (std::uint64_t i = 0; i < spec.unique_words; ++i)
    words.push_back(vocabulary_word(i, spec.word_len));
  return words;
}

std::uint64_t chunk_length(const DatasetSpec& spec, std::uint32_t rank,
                           std::uint32_t num_ranks) {
  const std::uint64_t base = spec.total_words / num_ranks;
  const std::uint64_t extra = spec.total_words % num_ranks;
  return base + (rank < extra ? 1 : 0);
}

WordChunk generate_chunk(const DatasetSpec& spec, std::uint32_t rank,
                         std::uint32_t num_ranks) {
  spec.validate();
  if (num_ranks < 1 || rank >= num_ranks)
    throw Error(ErrorKind::Usage, "generate_chunk: rank out of range");
  if (num_ranks > spec.total_words)
    throw Error(ErrorKind::Usage,
                "generate_chunk: more ranks than total words");

  const std::uint64_t len = chunk_length(spec, rank, num_ranks);
  WordChunk chunk;
  chunk.rank = rank;
  chunk.words.reserve(len);
  const std::vector<std::string> vocab = vocabulary(spec);
  for (std::uint64_t pos = 0; pos < len; ++pos) {
    const std::uint64_t i = bounded(draw(spec.seed, rank, pos),
                                    spec.unique_words);
    chunk.words.push_back(vocab[i]);
  }
  return chunk;
}

std::map<std::string, std::uint64_t> expected_counts(const DatasetSpec& spec,
                                                     std::uint32_t num_ranks) {
  spec.validate();
  std::map<std::string, std::uint64_t> counts;
  for (std::uint32_t r = 0; r < num_ranks; ++r) {
    const WordChunk chunk = generate_chunk(spec, r, num_ranks);
    for (const std::string& w : chunk.words) ++counts[w];
  }
  return counts;
}

std::uint64_t distinct_words(const WordChunk& chunk) {
  std::unordered_set<std::string> seen(chunk.words.begin(),
                                       chunk.words.end());
  return seen.size();
}

double combinability(const WordChunk& chunk) {
  if (chunk.words.empty()) return 0.0;
  const double len = static_cast<double>(chunk.words.size());
  return (len - static_cast<double>(distinct_words(chunk))) / len;
}

}  // namespace mrcap
