#include "fontsynth/text_metrics.hpp"

#include <algorithm>

#include "fontsynth/error.hpp"

namespace fontsynth {

namespace {

std::u32string code_points(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    int extra = lead < 0x80 ? 0 : (lead >> 5) == 0x6 ? 1 : (lead >> 4) == 0xE ? 2
                                : (lead >> 3) == 0x1E ? 3 : -1;
    char32_t cp = extra == 0 ? lead : extra == 1 ? lead & 0x1F : extra == 2 ? lead & 0x0F : lead & 0x07;
    bool ok = extra >= 0 && i + extra < text.size();
    for (int k = 1; ok && k <= extra; ++k) {
      const auto c = static_cast<unsigned char>(text[i + k]);
      if ((c >> 6) != 0x2) ok = false;
      cp = (cp << 6) | (c & 0x3F);
    }
    if (!ok) {
      // Undecodable bytes count as one symbol each.
      out.push_back(0x110000u + lead);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += static_cast<std::size_t>(extra) + 1;
  }
  return out;
}

}  // namespace

std::size_t levenshtein(std::string_view a, std::string_view b) {
  const std::u32string s = code_points(a), t = code_points(b);
  std::vector<std::size_t> prev(t.size() + 1), cur(t.size() + 1);
  for (std::size_t j = 0; j <= t.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= s.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= t.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[t.size()];
}

std::string normalize_transcript(std::string_view text) {
  const auto space = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
  };
  std::size_t begin = 0, end = text.size();
  while (begin < end && space(text[begin])) ++begin;
  while (end > begin && space(text[end - 1])) --end;
  std::string out(text.substr(begin, end - begin));
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

double ned(const TranscriptPair& pair) {
  const std::string p = normalize_transcript(pair.predicted);
  const std::string g = normalize_transcript(pair.ground_truth);
  const std::size_t longest = std::max(code_points(p).size(), code_points(g).size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(p, g)) / static_cast<double>(longest);
}

bool exact_match(const TranscriptPair& pair) {
  return normalize_transcript(pair.predicted) == normalize_transcript(pair.ground_truth);
}

double word_acc(std::span<const TranscriptPair> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::EmptyBatch, "word accuracy over an empty batch");
  std::size_t hits = 0;
  for (const auto& p : pairs) hits += exact_match(p) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

}  // namespace fontsynth
