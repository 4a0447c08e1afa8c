#pragma once

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "olw/errors.hpp"
#include "olw/text_util.hpp"

namespace olw {

// One row of the annotated tweet file. Absent tier labels ("NULL" in the
// file) are stored as empty strings.
struct TweetRecord {
  std::string id;
  std::string text;
  std::string subtask_a;  // NOT | OFF
  std::string subtask_b;  // TIN | UNT | ""
  std::string subtask_c;  // IND | GRP | OTH | ""
};

enum class Subtask { a, b, c };

inline Subtask subtask_from_string(const std::string& s) {
  std::string t = to_lower(s);
  if (t == "a") return Subtask::a;
  if (t == "b") return Subtask::b;
  if (t == "c") return Subtask::c;
  throw config_error("unknown subtask '" + s + "' (expected a, b or c)");
}

inline std::string to_string(Subtask s) {
  switch (s) {
    case Subtask::a: return "a";
    case Subtask::b: return "b";
    default: return "c";
  }
}

// Class index order fixes the integer encoding used everywhere downstream.
inline std::vector<std::string> subtask_class_names(Subtask s) {
  switch (s) {
    case Subtask::a: return {"NOT", "OFF"};
    case Subtask::b: return {"TIN", "UNT"};
    default: return {"IND", "GRP", "OTH"};
  }
}

inline int label_index(Subtask s, const std::string& label) {
  auto names = subtask_class_names(s);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == label) return static_cast<int>(i);
  }
  throw data_error("label '" + label + "' is not valid for subtask " + to_string(s));
}

namespace detail {

inline void validate_record(const TweetRecord& r) {
  if (r.id.empty()) throw data_error("record with empty id");
  if (r.text.empty()) throw data_error("record " + r.id + " has empty tweet text");
  if (r.subtask_a != "NOT" && r.subtask_a != "OFF") {
    throw data_error("record " + r.id + " has invalid subtask_a label '" +
                     r.subtask_a + "'");
  }
  if (!r.subtask_b.empty() && r.subtask_b != "TIN" && r.subtask_b != "UNT") {
    throw data_error("record " + r.id + " has invalid subtask_b label '" +
                     r.subtask_b + "'");
  }
  if (!r.subtask_c.empty() && r.subtask_c != "IND" && r.subtask_c != "GRP" &&
      r.subtask_c != "OTH") {
    throw data_error("record " + r.id + " has invalid subtask_c label '" +
                     r.subtask_c + "'");
  }
  // Tier labels form a hierarchy: b applies only to offensive tweets and c
  // only to targeted insults.
  if (!r.subtask_b.empty() && r.subtask_a != "OFF") {
    throw data_error("record " + r.id + " has a subtask_b label but is not OFF");
  }
  if (!r.subtask_c.empty() && r.subtask_b != "TIN") {
    throw data_error("record " + r.id + " has a subtask_c label but is not TIN");
  }
}

}  // namespace detail

inline std::vector<TweetRecord> parse_olid_tsv(std::istream& in,
                                               const std::string& origin) {
  static const std::string kHeader = "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c";
  std::string line;
  if (!std::getline(in, line)) {
    throw data_error(origin + ": file is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) {
    throw data_error(origin + ": unexpected header '" + line + "'");
  }
  std::vector<TweetRecord> records;
  std::unordered_set<std::string> seen_ids;
  long long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_on(line, '\t');
    if (fields.size() != 5) {
      throw data_error(origin + ":" + std::to_string(line_no) + ": expected 5 " +
                       "tab-separated fields, got " + std::to_string(fields.size()));
    }
    TweetRecord r;
    r.id = fields[0];
    r.text = fields[1];
    r.subtask_a = fields[2];
    r.subtask_b = fields[3] == "NULL" ? "" : fields[3];
    r.subtask_c = fields[4] == "NULL" ? "" : fields[4];
    detail::validate_record(r);
    if (!seen_ids.insert(r.id).second) {
      throw data_error(origin + ": duplicate id '" + r.id + "'");
    }
    records.push_back(std::move(r));
  }
  return records;
}

inline std::vector<TweetRecord> ingest_olid_tsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open dataset file: " + path);
  return parse_olid_tsv(in, path);
}

// Concatenates several ingested files, rejecting ids that appear in more
// than one of them.
inline std::vector<TweetRecord> merge_datasets(
    const std::vector<std::vector<TweetRecord>>& parts) {
  std::vector<TweetRecord> out;
  std::unordered_set<std::string> seen;
  for (const auto& part : parts) {
    for (const auto& r : part) {
      if (!seen.insert(r.id).second) {
        throw data_error("duplicate id '" + r.id + "' across combined datasets");
      }
      out.push_back(r);
    }
  }
  return out;
}

struct LabeledTweet {
  std::string id;
  std::string text;
  int label = 0;
};

// Keeps only records carrying a label for the requested tier, in file order.
inline std::vector<LabeledTweet> select_for_subtask(
    const std::vector<TweetRecord>& records, Subtask s) {
  std::vector<LabeledTweet> out;
  for (const auto& r : records) {
    const std::string* label = nullptr;
    switch (s) {
      case Subtask::a: label = &r.subtask_a; break;
      case Subtask::b: label = &r.subtask_b; break;
      case Subtask::c: label = &r.subtask_c; break;
    }
    if (label->empty()) continue;
    out.push_back({r.id, r.text, label_index(s, *label)});
  }
  return out;
}

}  // namespace olw
