#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "olw/errors.hpp"
#include "olw/text_util.hpp"

namespace olw {

// ---------------------------------------------------------------------------
// resources
// ---------------------------------------------------------------------------

// Maps contracted surface forms ("don't") to expansions ("do not").
// Keys are lowercase and must contain an apostrophe; values must not.
struct ContractionMap {
  std::unordered_map<std::string, std::string> entries;

  bool empty() const { return entries.empty(); }

  static ContractionMap from_pairs(
      const std::vector<std::pair<std::string, std::string>>& pairs) {
    ContractionMap map;
    for (const auto& [surface, expansion] : pairs) {
      std::string key = to_lower(surface);
      if (key.find('\'') == std::string::npos) {
        throw data_error("contraction key lacks an apostrophe: " + surface);
      }
      if (expansion.find('\'') != std::string::npos) {
        throw data_error("contraction expansion contains an apostrophe: " + expansion);
      }
      map.entries.emplace(std::move(key), expansion);
    }
    if (map.empty()) throw data_error("contraction map is empty");
    return map;
  }
};

// Maps inflected forms to lemmas. Construction resolves chains (a->b, b->c
// becomes a->c) so every stored lemma is a fixed point; cycles are rejected.
struct LemmaLexicon {
  std::unordered_map<std::string, std::string> entries;

  static LemmaLexicon from_pairs(
      const std::vector<std::pair<std::string, std::string>>& pairs) {
    LemmaLexicon lex;
    for (const auto& [form, lemma] : pairs) {
      lex.entries[to_lower(form)] = to_lower(lemma);
    }
    // Resolve chains to fixed points.
    for (auto& [form, lemma] : lex.entries) {
      std::unordered_set<std::string> seen{form};
      std::string cur = lemma;
      while (true) {
        auto it = lex.entries.find(cur);
        if (it == lex.entries.end() || it->second == cur) break;
        if (!seen.insert(cur).second) {
          throw data_error("lemma lexicon contains a cycle through: " + cur);
        }
        cur = it->second;
      }
      lemma = cur;
    }
    return lex;
  }
};

inline std::string lemmatize(const std::string& token, const LemmaLexicon& lexicon) {
  auto it = lexicon.entries.find(token);
  return it == lexicon.entries.end() ? token : it->second;
}

// ---------------------------------------------------------------------------
// edit distance and spelling
// ---------------------------------------------------------------------------

// Optimal string alignment distance: insertions, deletions, substitutions,
// and adjacent transpositions, with no substring edited twice.
inline int damerau_levenshtein(std::string_view a, std::string_view b) {
  const std::size_t n = a.size(), m = b.size();
  if (n == 0) return static_cast<int>(m);
  if (m == 0) return static_cast<int>(n);

  std::vector<int> prev2(m + 1), prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      int cost = a[i - 1] == b[j - 1] ? 0 : 1;
      int best = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        best = std::min(best, prev2[j - 2] + 1);
      }
      cur[j] = best;
    }
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return prev[m];
}

// Symmetric-delete spelling dictionary: the delete index maps every string
// obtainable by removing up to max_edit_distance characters from a dictionary
// word back to the set of source words, so correction candidates can be found
// without scanning the whole dictionary.
struct SpellDictionary {
  std::unordered_map<std::string, long long> words;
  std::unordered_map<std::string, std::vector<std::string>> delete_index;
  int max_edit_distance = 3;

  bool contains(const std::string& w) const { return words.count(w) > 0; }
};

namespace detail {

inline void collect_deletes(const std::string& word, int remaining,
                            std::set<std::string>& out) {
  out.insert(word);
  if (remaining == 0 || word.empty()) return;
  for (std::size_t i = 0; i < word.size(); ++i) {
    std::string shorter = word.substr(0, i) + word.substr(i + 1);
    if (!out.count(shorter)) collect_deletes(shorter, remaining - 1, out);
  }
}

}  // namespace detail

inline SpellDictionary build_delete_index(
    const std::map<std::string, long long>& words, int max_edit_distance) {
  if (max_edit_distance < 0) {
    throw config_error("build_delete_index: max_edit_distance must be >= 0");
  }
  if (max_edit_distance > 4) {
    throw config_error(
        "build_delete_index: max_edit_distance > 4 would explode the index");
  }
  SpellDictionary dict;
  dict.max_edit_distance = max_edit_distance;
  for (const auto& [word, freq] : words) {
    if (freq < 0) throw data_error("negative frequency for word: " + word);
    dict.words[word] = freq;
    std::set<std::string> variants;
    detail::collect_deletes(word, max_edit_distance, variants);
    for (const auto& v : variants) dict.delete_index[v].push_back(word);
  }
  for (auto& [variant, sources] : dict.delete_index) {
    std::sort(sources.begin(), sources.end());
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  }
  return dict;
}

// Returns the dictionary word nearest to `token` (optimal string alignment
// distance <= max_edit_distance), breaking ties by higher corpus frequency
// and then lexicographic order. In-dictionary tokens and tokens with no
// candidate in range come back unchanged.
inline std::string correct_spelling(const std::string& token,
                                    const SpellDictionary& dict) {
  if (dict.contains(token)) return token;

  std::set<std::string> query_deletes;
  detail::collect_deletes(token, dict.max_edit_distance, query_deletes);

  std::set<std::string> candidates;
  for (const auto& variant : query_deletes) {
    auto it = dict.delete_index.find(variant);
    if (it == dict.delete_index.end()) continue;
    candidates.insert(it->second.begin(), it->second.end());
  }

  int best_dist = dict.max_edit_distance + 1;
  long long best_freq = -1;
  const std::string* best = nullptr;
  for (const auto& cand : candidates) {  // std::set: lexicographic order
    int d = damerau_levenshtein(token, cand);
    if (d > dict.max_edit_distance) continue;
    long long freq = dict.words.at(cand);
    if (d < best_dist || (d == best_dist && freq > best_freq)) {
      best_dist = d;
      best_freq = freq;
      best = &cand;
    }
  }
  return best ? *best : token;
}

// ---------------------------------------------------------------------------
// noise stripping
// ---------------------------------------------------------------------------

namespace detail {

inline std::size_t find_url_marker(std::string_view token) {
  std::size_t best = std::string_view::npos;
  for (std::string_view marker : {"http://", "https://", "www."}) {
    std::size_t pos = token.find(marker);
    if (pos != std::string_view::npos && pos < best) best = pos;
  }
  return best;
}

// remove_user_url drops the literal @USER / URL placeholder tokens;
// remove_tags_links drops @handles, #hashtags, and hyperlinks.
inline std::string strip_noise_impl(std::string_view text, bool remove_user_url,
                                    bool remove_tags_links) {
  std::vector<std::string> kept;
  for (auto& token : split_whitespace(text)) {
    if (remove_user_url && (token == "@USER" || token == "URL")) continue;
    if (remove_tags_links) {
      if (token[0] == '@' || token[0] == '#') continue;
      std::size_t url = find_url_marker(token);
      if (url != std::string_view::npos) {
        if (url == 0) continue;
        token = token.substr(0, url);
      }
    }
    kept.push_back(std::move(token));
  }
  return join(kept);
}

}  // namespace detail

// Removes @USER/URL placeholders, @handles, #hashtags, and hyperlinks.
// Remaining tokens keep their order; whitespace collapses to single spaces.
inline std::string strip_noise(std::string_view text) {
  return detail::strip_noise_impl(text, true, true);
}

// Replaces every whitespace token whose lowercase form is a contraction key
// with its expansion; everything else passes through untouched.
inline std::string expand_contractions(std::string_view text,
                                       const ContractionMap& map) {
  std::vector<std::string> out;
  for (auto& token : split_whitespace(text)) {
    auto it = map.entries.find(to_lower(token));
    out.push_back(it == map.entries.end() ? std::move(token) : it->second);
  }
  return join(out);
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

struct PipelineConfig {
  bool remove_user_url = true;
  bool remove_tags_links = true;
  bool expand_contractions = true;
  bool correct_spelling = true;
  bool lemmatize = true;
  bool lowercase = true;
  int max_edit_distance = 3;
};

struct PipelineResources {
  ContractionMap contractions;
  SpellDictionary spelling;
  LemmaLexicon lemmas;
};

// Runs the enabled cleanup steps in order: noise stripping, contraction
// expansion, per-token spell correction, per-token lemmatization, and
// lowercasing, then splits on whitespace. Dictionary lookups are
// case-insensitive so the result is the same as if lowercasing ran first.
// Tokens containing digits are never spell-corrected.
inline std::vector<std::string> preprocess(const std::string& text,
                                           const PipelineConfig& cfg,
                                           const PipelineResources& res) {
  std::string s = detail::strip_noise_impl(text, cfg.remove_user_url,
                                           cfg.remove_tags_links);
  if (cfg.expand_contractions) s = expand_contractions(s, res.contractions);

  std::vector<std::string> tokens = split_whitespace(s);
  for (std::string& token : tokens) {
    if (cfg.correct_spelling && !contains_digit(token)) {
      std::string low = to_lower(token);
      std::string corrected = correct_spelling(low, res.spelling);
      if (corrected != low) token = corrected;
    }
    if (cfg.lemmatize) {
      std::string lemma = lemmatize(to_lower(token), res.lemmas);
      if (lemma != to_lower(token)) token = lemma;
    }
    if (cfg.lowercase) token = to_lower(token);
  }
  return tokens;
}

// ---------------------------------------------------------------------------
// resource file loaders
// ---------------------------------------------------------------------------
// All loaders consume UTF-8 text, skip blank lines and lines starting with
// '#'. Contractions and lemmas are `surface<TAB>replacement`; the frequency
// dictionary is `word<SPACE>frequency`.

namespace detail {

inline std::vector<std::string> read_data_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open resource file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline bool skippable(const std::string& line) {
  std::string t = trim(line);
  return t.empty() || t[0] == '#';
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>> load_tab_pairs(
    const std::string& path) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::size_t lineno = 0;
  for (const auto& line : detail::read_data_lines(path)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    auto fields = split_on(line, '\t');
    if (fields.size() != 2 || fields[0].empty() || fields[1].empty()) {
      throw data_error(path + ":" + std::to_string(lineno) +
                       ": expected `surface<TAB>replacement`");
    }
    pairs.emplace_back(fields[0], fields[1]);
  }
  return pairs;
}

inline ContractionMap load_contractions(const std::string& path) {
  return ContractionMap::from_pairs(load_tab_pairs(path));
}

inline LemmaLexicon load_lemmas(const std::string& path) {
  return LemmaLexicon::from_pairs(load_tab_pairs(path));
}

inline std::map<std::string, long long> load_word_frequencies(
    const std::string& path) {
  std::map<std::string, long long> words;
  std::size_t lineno = 0;
  for (const auto& line : detail::read_data_lines(path)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    auto fields = split_whitespace(line);
    if (fields.size() != 2) {
      throw data_error(path + ":" + std::to_string(lineno) +
                       ": expected `word frequency`");
    }
    try {
      words[to_lower(fields[0])] = std::stoll(fields[1]);
    } catch (const std::exception&) {
      throw data_error(path + ":" + std::to_string(lineno) +
                       ": frequency is not an integer: " + fields[1]);
    }
  }
  return words;
}

inline PipelineResources load_pipeline_resources(const std::string& dir,
                                                 int max_edit_distance = 3) {
  namespace fs = std::filesystem;
  PipelineResources res;
  res.contractions = load_contractions((fs::path(dir) / "contractions.tsv").string());
  res.lemmas = load_lemmas((fs::path(dir) / "lemmas.tsv").string());
  res.spelling = build_delete_index(
      load_word_frequencies((fs::path(dir) / "wordfreq.txt").string()),
      max_edit_distance);
  return res;
}

}  // namespace olw
