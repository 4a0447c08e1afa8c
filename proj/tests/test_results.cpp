#include <catch2/catch_amalgamated.hpp>

#include <olw/errors.hpp>
#include <olw/nn/variant.hpp>
#include <olw/results.hpp>

#include <map>
#include <string>
#include <vector>

#include "support/helpers.hpp"

using Catch::Matchers::ContainsSubstring;

namespace {

// First column of each rendered markdown row, skipping header and separator.
std::vector<std::string> row_labels(const std::string& markdown) {
  auto lines = testutil::split_lines(markdown);
  std::vector<std::string> labels;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    auto end = lines[i].find(" |", 2);
    labels.push_back(lines[i].substr(2, end - 2));
  }
  return labels;
}

}  // namespace

TEST_CASE("results store round-trips cells and keeps insertion order") {
  testutil::TempDir tmp;
  auto store = olw::ResultsStore::open(tmp.str());
  CHECK(store.ids().empty());
  CHECK_FALSE(store.has("subtask_a/CNN"));

  std::map<std::string, std::string> cell{
      {"status", "ok"}, {"mean.accuracy", "0.75"}, {"mean.macro_f1", "0.7333"}};
  store.put("subtask_a/CNN", cell);
  store.put("subtask_a/LSTM", {{"status", "ok"}});
  store.put("epochs/BiGRU-CNN/5", {{"status", "ok"}, {"macro_f1", "0.5"}});

  CHECK(store.ids() == std::vector<std::string>{"subtask_a/CNN", "subtask_a/LSTM",
                                                "epochs/BiGRU-CNN/5"});
  CHECK(store.has("subtask_a/CNN"));
  CHECK(store.get("subtask_a/CNN") == cell);

  SECTION("cell files are sorted key = value text") {
    auto text = testutil::read_file(tmp.file("cells/subtask_a__CNN.txt"));
    CHECK(text == "mean.accuracy = 0.75\nmean.macro_f1 = 0.7333\nstatus = ok\n");
  }
  SECTION("reopening from disk restores ids, order, and contents") {
    auto again = olw::ResultsStore::open(tmp.str());
    CHECK(again.ids() == store.ids());
    CHECK(again.get("epochs/BiGRU-CNN/5") ==
          std::map<std::string, std::string>{{"status", "ok"}, {"macro_f1", "0.5"}});
  }
  SECTION("duplicate cell ids are rejected") {
    REQUIRE_THROWS_AS(store.put("subtask_a/CNN", cell), olw::config_error);
    REQUIRE_THROWS_WITH(store.put("subtask_a/CNN", cell),
                        ContainsSubstring("already has cell"));
  }
  SECTION("unknown cell ids are rejected") {
    REQUIRE_THROWS_WITH(store.get("subtask_a/GRU"),
                        ContainsSubstring("has no cell 'subtask_a/GRU'"));
  }
}

TEST_CASE("cell ids sanitize to flat file names") {
  CHECK(olw::ResultsStore::sanitize("subtask_a/CNN-LSTM") == "subtask_a__CNN-LSTM");
  CHECK(olw::ResultsStore::sanitize("dropout/BiGRU-CNN/0.35") ==
        "dropout__BiGRU-CNN__0.35");
  CHECK(olw::ResultsStore::sanitize("a b%c") == "a_b_c");

  testutil::TempDir tmp;
  auto store = olw::ResultsStore::open(tmp.str());
  store.put("a/b", {{"status", "ok"}});
  REQUIRE_THROWS_WITH(store.put("a__b", {{"status", "ok"}}),
                      ContainsSubstring("collides with 'a/b'"));
}

TEST_CASE("table lookups fall back to n/a") {
  testutil::TempDir tmp;
  auto store = olw::ResultsStore::open(tmp.str());
  store.put("ok", {{"status", "ok"}, {"macro_f1", "0.65"}});
  store.put("failed", {{"status", "failed"}, {"macro_f1", "0.65"}, {"error", "boom"}});
  store.put("bare", {{"macro_f1", "0.65"}});

  CHECK(olw::detail::cell_value(store, "ok", "macro_f1", false) == "0.6500");
  CHECK(olw::detail::cell_value(store, "ok", "macro_f1", true) == "65.00%");
  CHECK(olw::detail::cell_value(store, "ok", "accuracy", false) == "n/a");
  CHECK(olw::detail::cell_value(store, "failed", "macro_f1", false) == "n/a");
  CHECK(olw::detail::cell_value(store, "absent", "macro_f1", false) == "n/a");
  CHECK(olw::detail::cell_value(store, "bare", "macro_f1", false) == "0.6500");
}

TEST_CASE("formatters fix the table cell texture") {
  CHECK(olw::detail::format_percent(0.75) == "75.00%");
  CHECK(olw::detail::format_percent(1.0) == "100.00%");
  CHECK(olw::detail::format_percent(0.333333333) == "33.33%");
  CHECK(olw::detail::format_f1(2.0 / 3.0) == "0.6667");
  CHECK(olw::detail::format_f1(0.5) == "0.5000");
}

TEST_CASE("tables render the fixed row and column structure") {
  testutil::TempDir tmp;
  auto store = olw::ResultsStore::open(tmp.str());

  SECTION("table 2 lists all thirteen variants in grid order") {
    auto md = olw::render_table(store, 2, "md");
    auto lines = testutil::split_lines(md);
    REQUIRE(lines.size() == 15);
    CHECK(lines[0] == "| Models (Subtask A) | Avg Acc | Avg Macro F1 |");
    CHECK(lines[1] == "| --- | --- | --- |");
    CHECK(lines[2] == "| CNN | n/a | n/a |");
    CHECK(lines[14] == "| BiGRU-CNN | n/a | n/a |");
    std::vector<std::string> expect;
    for (auto v : olw::nn::all_variants()) expect.push_back(olw::nn::to_string(v));
    CHECK(row_labels(md) == expect);
  }
  SECTION("tables 3 and 4 cross models with balance strategies") {
    for (int table : {3, 4}) {
      INFO("table " << table);
      auto md = olw::render_table(store, table, "md");
      auto lines = testutil::split_lines(md);
      REQUIRE(lines.size() == 6);
      std::string subtask = table == 3 ? "B" : "C";
      CHECK(lines[0] == "| Models (Subtask " + subtask +
                            ") | Imbalanced Data Acc | Imbalanced Data Macro F1 |"
                            " SMOTE Acc | SMOTE Macro F1 | Class Weights Acc |"
                            " Class Weights Macro F1 |");
      CHECK(row_labels(md) == std::vector<std::string>{"BiLSTM-CNN", "BiGRU-CNN",
                                                       "BiLSTM", "BiGRU"});
    }
  }
  SECTION("table 5 sweeps epochs") {
    auto md = olw::render_table(store, 5, "md");
    auto lines = testutil::split_lines(md);
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "| Epochs | BiLSTM-CNN | BiGRU-CNN |");
    CHECK(row_labels(md) == std::vector<std::string>{"5", "10", "20"});
  }
  SECTION("table 6 sweeps dropout rates") {
    auto md = olw::render_table(store, 6, "md");
    REQUIRE(testutil::split_lines(md).size() == 6);
    CHECK(row_labels(md) ==
          std::vector<std::string>{"20%", "35%", "50%", "No Dropout"});
  }
  SECTION("table 7 sweeps embedding tables") {
    auto md = olw::render_table(store, 7, "md");
    auto lines = testutil::split_lines(md);
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "| Embeddings | BiLSTM-CNN | BiGRU-CNN |");
    CHECK(row_labels(md) ==
          std::vector<std::string>{"T - 100d", "T - 200d", "CC - 300d", "No Embs"});
  }
}

TEST_CASE("stored results flow into rendered cells") {
  testutil::TempDir tmp;
  auto store = olw::ResultsStore::open(tmp.str());
  store.put("subtask_a/CNN", {{"status", "ok"},
                              {"mean.accuracy", "0.7512"},
                              {"mean.macro_f1", "0.73453"}});
  store.put("subtask_a/LSTM", {{"status", "failed"}, {"error", "exploded"}});
  auto lines = testutil::split_lines(olw::render_table(store, 2, "md"));
  CHECK(lines[2] == "| CNN | 75.12% | 0.7345 |");
  CHECK(lines[3] == "| LSTM | n/a | n/a |");

  store.put("epochs/BiGRU-CNN/10", {{"status", "ok"}, {"macro_f1", "0.6"}});
  auto t5 = testutil::split_lines(olw::render_table(store, 5, "md"));
  CHECK(t5[3] == "| 10 | n/a | 0.6000 |");

  store.put("dropout/BiLSTM-CNN/none", {{"status", "ok"}, {"macro_f1", "0.71"}});
  auto t6 = testutil::split_lines(olw::render_table(store, 6, "md"));
  CHECK(t6[5] == "| No Dropout | 0.7100 | n/a |");

  store.put("embeddings/BiLSTM-CNN/twitter-100d",
            {{"status", "ok"}, {"macro_f1", "0.72"}});
  auto t7 = testutil::split_lines(olw::render_table(store, 7, "md"));
  CHECK(t7[2] == "| T - 100d | 0.7200 | n/a |");

  store.put("imbalance_b/BiLSTM/smote", {{"status", "ok"},
                                         {"accuracy", "0.8"},
                                         {"macro_f1", "0.55"}});
  auto t3 = testutil::split_lines(olw::render_table(store, 3, "md"));
  CHECK(t3[4] == "| BiLSTM | n/a | n/a | 80.00% | 0.5500 | n/a | n/a |");
}

TEST_CASE("csv output quotes fields that need it") {
  olw::detail::TableData t;
  t.header = {"Models (Subtask A)", "plain"};
  t.rows = {{"a,b", "say \"hi\""}, {"simple", "1.0"}};
  CHECK(olw::detail::render(t, "csv") ==
        "Models (Subtask A),plain\n"
        "\"a,b\",\"say \"\"hi\"\"\"\n"
        "simple,1.0\n");

  testutil::TempDir tmp;
  auto store = olw::ResultsStore::open(tmp.str());
  auto lines = testutil::split_lines(olw::render_table(store, 5, "csv"));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "Epochs,BiLSTM-CNN,BiGRU-CNN");
  CHECK(lines[1] == "5,n/a,n/a");
}

TEST_CASE("render_table validates its arguments") {
  testutil::TempDir tmp;
  auto store = olw::ResultsStore::open(tmp.str());
  REQUIRE_THROWS_WITH(olw::render_table(store, 1, "md"),
                      ContainsSubstring("table must be between 2 and 7, got 1"));
  REQUIRE_THROWS_WITH(olw::render_table(store, 8, "md"), ContainsSubstring("got 8"));
  REQUIRE_THROWS_WITH(olw::render_table(store, 2, "html"),
                      ContainsSubstring("unknown table format 'html'"));
}

TEST_CASE("corrupt store files are reported") {
  testutil::TempDir tmp;
  {
    auto store = olw::ResultsStore::open(tmp.str());
    store.put("a", {{"status", "ok"}});
  }
  SECTION("malformed index line") {
    testutil::write_file(tmp.file("index.tsv"), "no-tab-here\n");
    REQUIRE_THROWS_WITH(olw::ResultsStore::open(tmp.str()),
                        ContainsSubstring("malformed line"));
  }
  SECTION("malformed cell line") {
    testutil::write_file(tmp.file("cells/a.txt"), "status ok\n");
    auto store = olw::ResultsStore::open(tmp.str());
    REQUIRE_THROWS_WITH(store.get("a"), ContainsSubstring("malformed cell line"));
  }
}
