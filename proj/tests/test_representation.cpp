#include <olw/preprocess.hpp>
#include <olw/representation.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "support/helpers.hpp"

#include <string>
#include <vector>

using Catch::Matchers::ContainsSubstring;

TEST_CASE("vocabulary ranks by frequency with lexicographic ties", "[representation]") {
  std::vector<std::vector<std::string>> corpus{
      {"bird", "cat", "cat", "dog"},
      {"dog", "cat", "ant", "dog"},
  };
  auto vocab = olw::build_vocabulary(corpus, 100, 1);

  // cat and dog tie at 3, ant and bird tie at 1.
  REQUIRE(vocab.index_to_token ==
          std::vector<std::string>{"<pad>", "<unk>", "cat", "dog", "ant", "bird"});
  CHECK(vocab.size() == 6);
  CHECK(vocab.index_of("cat") == 2);
  CHECK(vocab.index_of("never-seen") == olw::Vocabulary::unk_index);
  CHECK(vocab.index_of("<pad>") == 0);
  CHECK(vocab.index_of("<unk>") == 1);

  // Ordering is a function of counts, not document order.
  std::vector<std::vector<std::string>> shuffled{
      {"dog", "cat", "ant", "dog"},
      {"bird", "cat", "cat", "dog"},
  };
  CHECK(olw::build_vocabulary(shuffled, 100, 1).index_to_token ==
        vocab.index_to_token);
}

TEST_CASE("vocabulary honours the cap and the frequency floor", "[representation]") {
  std::vector<std::vector<std::string>> corpus{
      {"a", "a", "a", "b", "b", "c"},
  };
  // The cap includes both sentinels.
  auto capped = olw::build_vocabulary(corpus, 3, 1);
  CHECK(capped.index_to_token == std::vector<std::string>{"<pad>", "<unk>", "a"});

  auto floored = olw::build_vocabulary(corpus, 100, 2);
  CHECK(floored.index_to_token ==
        std::vector<std::string>{"<pad>", "<unk>", "a", "b"});

  // Sentinel spellings in the corpus are ignored rather than recounted.
  std::vector<std::vector<std::string>> weird{{"<pad>", "<unk>", "x"}};
  auto vocab = olw::build_vocabulary(weird, 100, 1);
  CHECK(vocab.index_to_token == std::vector<std::string>{"<pad>", "<unk>", "x"});

  REQUIRE_THROWS_AS(olw::build_vocabulary(corpus, 1, 1), olw::config_error);
  REQUIRE_THROWS_AS(olw::build_vocabulary(corpus, 10, 0), olw::config_error);
}

TEST_CASE("vocabulary hash tracks content", "[representation]") {
  std::vector<std::vector<std::string>> corpus{{"a", "b"}};
  auto v1 = olw::build_vocabulary(corpus, 10, 1);
  auto v2 = olw::build_vocabulary({{"a", "c"}}, 10, 1);
  auto v3 = olw::build_vocabulary({{"b", "a"}}, 10, 1);
  CHECK(v1.hash() != v2.hash());
  CHECK(v1.hash() == v3.hash());
}

TEST_CASE("encoding truncates and post-pads", "[representation]") {
  auto vocab = olw::build_vocabulary({{"hello", "world"}}, 10, 1);
  CHECK(olw::encode({"hello", "world"}, vocab, 4) ==
        std::vector<int>{2, 3, 0, 0});
  CHECK(olw::encode({"hello", "stranger", "world"}, vocab, 4) ==
        std::vector<int>{2, 1, 3, 0});
  CHECK(olw::encode({"hello", "world", "again", "and", "again"}, vocab, 3) ==
        std::vector<int>{2, 3, 1});
  CHECK(olw::encode({}, vocab, 3) == std::vector<int>{0, 0, 0});
  REQUIRE_THROWS_AS(olw::encode({"hello"}, vocab, 0), olw::config_error);
}

TEST_CASE("embedding files parse with first-wins duplicates", "[representation]") {
  testutil::TempDir tmp;
  auto path = tmp.file("vectors.txt");
  testutil::write_file(path,
                       "cat 0.5 -0.25 1\n"
                       "\n"
                       "dog 1e-1 2.5e2 -3\r\n"
                       "cat 9 9 9\n");
  auto table = olw::load_embeddings(path, 3);
  REQUIRE(table.size() == 2);
  CHECK(table.at("cat") == std::vector<double>{0.5, -0.25, 1.0});
  CHECK(table.at("dog") == std::vector<double>{0.1, 250.0, -3.0});

  testutil::write_file(path, "cat 0.5 -0.25\n");
  REQUIRE_THROWS_WITH(olw::load_embeddings(path, 3),
                      ContainsSubstring(":1: expected 3 values, got 2"));

  testutil::write_file(path, "cat 0.5 abc 1\n");
  REQUIRE_THROWS_WITH(olw::load_embeddings(path, 3),
                      ContainsSubstring("non-numeric field: abc"));

  REQUIRE_THROWS_WITH(olw::load_embeddings(tmp.file("absent.txt"), 3),
                      ContainsSubstring("cannot open embedding file"));
}

TEST_CASE("embedding matrices copy hits and draw misses reproducibly",
          "[representation]") {
  auto vocab = olw::build_vocabulary({{"cat", "cat", "dog", "dog", "bird"}}, 10, 1);
  // index_to_token: <pad> <unk> cat dog bird (cat/dog tie at 2 -> lexicographic).
  olw::EmbeddingTable table{{"cat", {1.0, 2.0}}, {"dog", {3.0, 4.0}}};

  auto build = olw::build_embedding_matrix(vocab, table, 2, 42);
  const auto& m = build.matrix;
  REQUIRE(m.vocab_size == 5);
  REQUIRE(m.dim == 2);

  CHECK(m.at(0, 0) == 0.0);
  CHECK(m.at(0, 1) == 0.0);
  CHECK(m.at(2, 0) == 1.0);
  CHECK(m.at(2, 1) == 2.0);
  CHECK(m.at(3, 0) == 3.0);
  CHECK(m.at(3, 1) == 4.0);

  // unk and bird fall back to small uniform draws, never zero rows.
  for (int row : {1, 4}) {
    double norm = 0.0;
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(m.at(row, j)) <= 0.05);
      norm += std::abs(m.at(row, j));
    }
    CHECK(norm > 0.0);
  }

  // Two of three content tokens were found.
  CHECK(build.coverage == Catch::Approx(2.0 / 3.0).margin(1e-12));

  auto same = olw::build_embedding_matrix(vocab, table, 2, 42);
  CHECK(same.matrix.values == m.values);
  auto other = olw::build_embedding_matrix(vocab, table, 2, 43);
  CHECK(other.matrix.values != m.values);

  olw::EmbeddingTable bad{{"cat", {1.0}}};
  REQUIRE_THROWS_AS(olw::build_embedding_matrix(vocab, bad, 2, 42),
                    olw::config_error);
}

TEST_CASE("bundled pretrained vectors align with the fixture dictionary",
          "[representation]") {
  auto table = olw::load_embeddings(OLW_SOURCE_DIR "/data/glove/twitter-100d.txt", 100);
  REQUIRE_FALSE(table.empty());
  auto words = olw::load_word_frequencies(OLW_SOURCE_DIR "/data/wordfreq.txt");

  std::vector<std::vector<std::string>> corpus;
  for (const auto& [w, f] : words) corpus.push_back({w});
  auto vocab = olw::build_vocabulary(corpus, 20000, 1);
  auto build = olw::build_embedding_matrix(vocab, table, 100, 1);
  // The bundled vectors deliberately miss a slice of the dictionary.
  CHECK(build.coverage > 0.5);
  CHECK(build.coverage < 1.0);
}
