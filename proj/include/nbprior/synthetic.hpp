#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "nbprior/corpus.hpp"

namespace nbprior::synthetic {

/// Generator for labelled test corpora. Every document belongs to one topic:
/// the target topic (category members and hidden positives) or one of
/// `other_topics` background topics. A topic is a Zipf distribution over a
/// random subset of the vocabulary; each token draw comes from the document's
/// topic with probability topic_share and otherwise from a Zipf distribution
/// over the whole vocabulary, so classes overlap without being identical.
struct Config {
  std::size_t vocab = 2000;
  std::size_t members = 200;       // labelled topic documents (the category)
  std::size_t pool = 20000;        // unlabelled documents
  double hidden_fraction = 0.01;   // share of the pool drawn from the topic
  std::size_t topic_vocab = 300;
  std::size_t other_topics = 50;
  double topic_share = 0.1;        // per-draw chance a topic document uses the topic
  double zipf_exponent = 1.0;
  // Token draws per document: log-normal around median_draws, clamped.
  double median_draws = 150.0;
  double length_sigma = 1.0;
  std::size_t min_draws = 50;
  std::size_t max_draws = 4000;
  std::size_t shard_count = 1;
  std::string category = "Target";
  std::uint64_t seed = 0;
};

struct SyntheticCorpus {
  corpus::Corpus corpus;
  corpus::CategoryIndex categories;
  std::vector<DocId> hidden_positives;  // ascending
};

SyntheticCorpus generate(const Config& config);

}  // namespace nbprior::synthetic
