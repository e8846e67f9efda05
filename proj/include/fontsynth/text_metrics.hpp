#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fontsynth {

struct TranscriptPair {
  std::string predicted;
  std::string ground_truth;
};

/// Unit-cost edit distance over Unicode code points (bytes if not valid UTF-8).
std::size_t levenshtein(std::string_view a, std::string_view b);

/// ASCII lowercase with leading/trailing whitespace removed.
std::string normalize_transcript(std::string_view text);

/// 1 - lev / max(|p|, |g|) on normalized strings; 1 when both are empty.
double ned(const TranscriptPair& pair);

/// Case-folded exact match after trimming.
bool exact_match(const TranscriptPair& pair);

/// Fraction of exact matches. Throws EmptyBatch.
double word_acc(std::span<const TranscriptPair> pairs);

}  // namespace fontsynth
