#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nbprior/corpus.hpp"

namespace nbprior::model {

enum class Label : std::uint8_t { negative, positive };

/// Pseudo-counts of the negative and positive class priors.
struct Hyperparameters {
  double lambda_neg = 1.0;
  double lambda_pos = 1.0;

  double lambda(Label c) const { return c == Label::positive ? lambda_pos : lambda_neg; }

  /// Throws nbprior::Error unless both values are finite and positive.
  void validate() const;

  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

using FeatureId = std::uint32_t;

struct TrainingCase {
  Label label;
  std::vector<FeatureId> features;  // case tokens intersected with the model features
};

/// Class-conditional document frequencies over the union of the positive
/// training documents' tokens. Tokens never seen in a positive document are
/// not features and are never counted, not even for negatives.
class CountModel {
 public:
  std::size_t n_pos() const noexcept { return n_pos_; }
  std::size_t n_neg() const noexcept { return n_neg_; }
  std::size_t n_total() const noexcept { return n_pos_ + n_neg_; }
  std::size_t n(Label c) const noexcept { return c == Label::positive ? n_pos_ : n_neg_; }

  std::size_t feature_count() const noexcept { return features_.size(); }
  /// Sorted ascending; FeatureId is the position in this list.
  const std::vector<std::string>& features() const noexcept { return features_; }
  std::optional<FeatureId> feature_id(std::string_view token) const;

  std::uint32_t count(FeatureId f, Label c) const {
    return c == Label::positive ? pos_count_[f] : neg_count_[f];
  }

  /// Training documents in build order: positives first, then negatives.
  const std::vector<TrainingCase>& cases() const noexcept { return cases_; }

  /// Feature ids of the tokens in `tokens` that are model features, ascending.
  std::vector<FeatureId> encode(const TokenSet& tokens) const;

  /// Text manifest: counts, then one "token<TAB>pos<TAB>neg" line per feature.
  void write_manifest(std::ostream& out) const;

  friend CountModel build_counts(std::span<const corpus::Document* const> positives,
                                 std::span<const corpus::Document* const> negatives,
                                 const std::vector<std::string>* frozen_features);

 private:
  std::size_t n_pos_ = 0;
  std::size_t n_neg_ = 0;
  std::vector<std::string> features_;
  std::unordered_map<std::string, FeatureId> index_;
  std::vector<std::uint32_t> pos_count_;
  std::vector<std::uint32_t> neg_count_;
  std::vector<TrainingCase> cases_;
};

/// Throws nbprior::Error when positives is empty or an id appears on both sides.
/// With `frozen_features` set, that sorted list is used as the feature set
/// instead of the positive-token union.
CountModel build_counts(std::span<const corpus::Document* const> positives,
                        std::span<const corpus::Document* const> negatives,
                        const std::vector<std::string>* frozen_features = nullptr);
CountModel build_counts(std::span<const corpus::Document> positives,
                        std::span<const corpus::Document> negatives);

struct Posterior {
  double p_pos = 0.5;
  double log_odds = 0.0;

  double p_neg() const { return 1.0 - p_pos; }
};

/// (lambda_c + n(token, c)) / (lambda_c + n(c)); throws if token is not a feature.
double cond_prob(const CountModel& model, std::string_view token, Label c,
                 const Hyperparameters& hp);

/// (lambda_c + n(c)) / (lambda_pos + lambda_neg + N)
double class_prior(const CountModel& model, Label c, const Hyperparameters& hp);

/// Posterior over the case tokens that are model features. Tokens outside the
/// feature set are ignored, and absent features are not penalised.
Posterior score(const CountModel& model, const TokenSet& case_tokens, const Hyperparameters& hp);
Posterior score_features(const CountModel& model, std::span<const FeatureId> features,
                         const Hyperparameters& hp);

/// Posterior of training case `index` under the model with that case removed:
/// its class count, N and each of its feature counts drop by one. The feature
/// set itself stays as built.
Posterior loo_score(const CountModel& model, std::size_t index, const Hyperparameters& hp);

/// Leave-one-out posteriors of every training case, in case order. Same
/// values as calling loo_score for each index.
std::vector<Posterior> loo_scores(const CountModel& model, const Hyperparameters& hp);

/// Positive iff p_pos > 0.5; an exact tie is negative.
Label classify(const Posterior& posterior);
Label classify(const CountModel& model, const TokenSet& case_tokens, const Hyperparameters& hp);

/// Precomputed log terms for one hyperparameter pair, used to score many
/// documents against the same model.
class Scorer {
 public:
  Scorer(const CountModel& model, const Hyperparameters& hp);

  Posterior operator()(std::span<const FeatureId> features) const;
  Posterior operator()(const TokenSet& tokens) const;

 private:
  const CountModel* model_;
  double prior_pos_;
  double prior_neg_;
  std::vector<double> term_pos_;  // log p(feature | +) per feature
  std::vector<double> term_neg_;
};

}  // namespace nbprior::model
