// Minimal end-to-end walkthrough: clean a handful of tweets, train a tiny
// CNN on them, and print the evaluation report. Everything is built in
// memory so the program runs without any data files.

#include <iostream>
#include <string>
#include <vector>

#include "olw/balance.hpp"
#include "olw/metrics.hpp"
#include "olw/nn/adam.hpp"
#include "olw/nn/model.hpp"
#include "olw/preprocess.hpp"
#include "olw/representation.hpp"
#include "olw/rng.hpp"
#include "olw/text_util.hpp"

int main() {
  // --- 1. preprocessing resources, built inline instead of loaded from disk
  olw::PipelineResources res;
  res.contractions = olw::ContractionMap::from_pairs({
      {"don't", "do not"},
      {"you're", "you are"},
      {"can't", "can not"},
  });
  res.lemmas = olw::LemmaLexicon::from_pairs({
      {"dogs", "dog"},
      {"hates", "hate"},
      {"loved", "love"},
  });
  res.spelling = olw::build_delete_index(
      {{"idiot", 900}, {"love", 800}, {"hate", 750}, {"great", 600},
       {"terrible", 500}, {"you", 2000}, {"are", 1900}, {"not", 1800},
       {"do", 1700}, {"dog", 400}, {"day", 350}, {"a", 3000}, {"an", 1200},
       {"what", 1100}, {"person", 300}, {"this", 1600}, {"is", 2100}},
      2);

  olw::PipelineConfig cfg;  // all six steps enabled by default

  const std::string raw = "@USER you're an idiiot URL #angry";
  std::cout << "raw:    " << raw << "\n";
  std::cout << "tokens: " << olw::join(olw::preprocess(raw, cfg, res), " ")
            << "\n\n";

  // --- 2. a tiny labelled corpus (0 = friendly, 1 = hostile)
  std::vector<std::string> texts = {
      "@USER what a great day URL",       "loved this dog so much",
      "you're a great person",            "I love dogs",
      "what a terrible day",              "@USER you're an idiiot",
      "I don't hate you",                 "this dog hates you URL",
      "great great great",                "hate hate hate",
      "such a lovely dog",                "terrible terrible person",
  };
  std::vector<int> labels = {0, 0, 0, 0, 1, 1, 0, 1, 0, 1, 0, 1};

  std::vector<std::vector<std::string>> token_lists;
  for (const auto& t : texts) token_lists.push_back(olw::preprocess(t, cfg, res));

  // --- 3. vocabulary, random embeddings, fixed-length encoding
  const int max_len = 8;
  olw::Vocabulary vocab = olw::build_vocabulary(token_lists, 200, 1);
  olw::EmbeddingBuild emb =
      olw::build_embedding_matrix(vocab, {}, /*dim=*/16, /*seed=*/7);

  std::vector<int> tokens;
  for (const auto& toks : token_lists) {
    std::vector<int> row = olw::encode(toks, vocab, max_len);
    tokens.insert(tokens.end(), row.begin(), row.end());
  }

  // --- 4. a small CNN, Adam, weighted cross-entropy
  olw::nn::ModelSpec spec;
  spec.variant = olw::nn::Variant::CNN;
  spec.embedding_dim = 16;
  spec.conv_filters = 8;
  spec.kernel_size = 2;
  spec.pool_size = 2;
  spec.dense_units = 8;
  spec.num_classes = 2;
  spec.spatial_dropout_rate = 0.0;  // deterministic toy run
  spec.seed = 42;

  olw::nn::Model model(spec, emb.matrix);
  olw::nn::AdamState adam(model.params(), {});
  olw::ClassWeightTable weights =
      olw::class_weights(labels, spec.num_classes);

  olw::Rng dropout_rng(1);
  const int batch = static_cast<int>(labels.size());
  for (int epoch = 1; epoch <= 60; ++epoch) {
    double loss = olw::nn::train_step(model, adam, tokens, batch, max_len,
                                      labels, weights.weights, dropout_rng);
    if (epoch % 20 == 0) {
      std::cout << "epoch " << epoch << "  loss " << loss << "\n";
    }
  }

  // --- 5. evaluate on the training set (a toy sanity check, not science)
  std::vector<int> preds = model.predict(tokens, batch, max_len);
  olw::EvaluationReport rep = olw::report(labels, preds, spec.num_classes);
  std::cout << "\n" << olw::to_key_values(rep, {"friendly", "hostile"});
  return 0;
}
