#include "nbprior/nb_model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_set>

#include "nbprior/error.hpp"

namespace nbprior::model {

namespace {

// Normalises two class log scores into a posterior. The max-subtraction keeps
// exp() in range; the fix-up keeps p_pos > 1/2 exactly when log_odds > 0 even
// when the difference is below double resolution after exp().
Posterior normalise(double log_pos, double log_neg) {
  Posterior post;
  post.log_odds = log_pos - log_neg;
  const double m = std::max(log_pos, log_neg);
  const double a = std::exp(log_pos - m);
  const double b = std::exp(log_neg - m);
  post.p_pos = a / (a + b);
  if (post.log_odds > 0 && post.p_pos <= 0.5) post.p_pos = std::nextafter(0.5, 1.0);
  if (post.log_odds <= 0 && post.p_pos > 0.5) post.p_pos = 0.5;
  return post;
}

double log_term(double lambda, double count) { return std::log(lambda + count); }

// Shared by loo_score and loo_scores so both produce identical bits.
template <typename LogPos, typename LogNeg>
Posterior held_out_posterior(const CountModel& model, const TrainingCase& held,
                             const Hyperparameters& hp, LogPos&& log_pos, LogNeg&& log_neg) {
  const bool pos = held.label == Label::positive;
  const std::size_t np = model.n_pos() - (pos ? 1 : 0);
  const std::size_t nn = model.n_neg() - (pos ? 0 : 1);
  const double log_total = std::log(hp.lambda_pos + hp.lambda_neg + double(model.n_total() - 1));
  const double class_pos = log_pos(np);
  const double class_neg = log_neg(nn);
  double sp = class_pos - log_total;
  double sn = class_neg - log_total;
  for (FeatureId f : held.features) {
    const std::size_t cp = model.count(f, Label::positive) - (pos ? 1 : 0);
    const std::size_t cn = model.count(f, Label::negative) - (pos ? 0 : 1);
    sp += log_pos(cp) - class_pos;
    sn += log_neg(cn) - class_neg;
  }
  return normalise(sp, sn);
}

}  // namespace

void Hyperparameters::validate() const {
  if (!(std::isfinite(lambda_neg) && lambda_neg > 0 && std::isfinite(lambda_pos) && lambda_pos > 0))
    throw Error("hyperparameters must be finite and positive");
}

std::optional<FeatureId> CountModel::feature_id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<FeatureId> CountModel::encode(const TokenSet& tokens) const {
  std::vector<FeatureId> out;
  for (const auto& t : tokens) {
    auto it = index_.find(t);
    if (it != index_.end()) out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void CountModel::write_manifest(std::ostream& out) const {
  out << "n_pos\t" << n_pos_ << "\nn_neg\t" << n_neg_ << "\nfeatures\t" << features_.size()
      << "\n";
  for (std::size_t f = 0; f < features_.size(); ++f)
    out << features_[f] << '\t' << pos_count_[f] << '\t' << neg_count_[f] << '\n';
}

CountModel build_counts(std::span<const corpus::Document* const> positives,
                        std::span<const corpus::Document* const> negatives,
                        const std::vector<std::string>* frozen_features) {
  if (positives.empty()) throw Error("cannot build a model without positive documents");
  std::unordered_set<DocId> pos_ids;
  for (const auto* doc : positives) pos_ids.insert(doc->id);
  for (const auto* doc : negatives)
    if (pos_ids.count(doc->id))
      throw Error("document " + std::to_string(doc->id) + " is both positive and negative");

  CountModel m;
  if (frozen_features) {
    m.features_ = *frozen_features;
  } else {
    for (const auto* doc : positives)
      m.features_.insert(m.features_.end(), doc->tokens.begin(), doc->tokens.end());
  }
  std::sort(m.features_.begin(), m.features_.end());
  m.features_.erase(std::unique(m.features_.begin(), m.features_.end()), m.features_.end());
  m.index_.reserve(m.features_.size());
  for (std::size_t f = 0; f < m.features_.size(); ++f)
    m.index_.emplace(m.features_[f], static_cast<FeatureId>(f));
  m.pos_count_.assign(m.features_.size(), 0);
  m.neg_count_.assign(m.features_.size(), 0);

  m.n_pos_ = positives.size();
  m.n_neg_ = negatives.size();
  m.cases_.reserve(positives.size() + negatives.size());
  auto add = [&](const corpus::Document& doc, Label label) {
    TrainingCase c{label, m.encode(doc.tokens)};
    auto& counts = label == Label::positive ? m.pos_count_ : m.neg_count_;
    for (FeatureId f : c.features) ++counts[f];
    m.cases_.push_back(std::move(c));
  };
  for (const auto* doc : positives) add(*doc, Label::positive);
  for (const auto* doc : negatives) add(*doc, Label::negative);
  return m;
}

CountModel build_counts(std::span<const corpus::Document> positives,
                        std::span<const corpus::Document> negatives) {
  std::vector<const corpus::Document*> p, n;
  for (const auto& d : positives) p.push_back(&d);
  for (const auto& d : negatives) n.push_back(&d);
  return build_counts(p, n);
}

double cond_prob(const CountModel& model, std::string_view token, Label c,
                 const Hyperparameters& hp) {
  const auto f = model.feature_id(token);
  if (!f) throw Error("token '" + std::string(token) + "' is not a model feature");
  const double lambda = hp.lambda(c);
  return (lambda + model.count(*f, c)) / (lambda + double(model.n(c)));
}

double class_prior(const CountModel& model, Label c, const Hyperparameters& hp) {
  return (hp.lambda(c) + double(model.n(c))) /
         (hp.lambda_pos + hp.lambda_neg + double(model.n_total()));
}

Posterior score_features(const CountModel& model, std::span<const FeatureId> features,
                         const Hyperparameters& hp) {
  hp.validate();
  const double log_total = std::log(hp.lambda_pos + hp.lambda_neg + double(model.n_total()));
  const double class_pos = log_term(hp.lambda_pos, double(model.n_pos()));
  const double class_neg = log_term(hp.lambda_neg, double(model.n_neg()));
  double sp = class_pos - log_total;
  double sn = class_neg - log_total;
  for (FeatureId f : features) {
    sp += log_term(hp.lambda_pos, model.count(f, Label::positive)) - class_pos;
    sn += log_term(hp.lambda_neg, model.count(f, Label::negative)) - class_neg;
  }
  return normalise(sp, sn);
}

Posterior score(const CountModel& model, const TokenSet& case_tokens, const Hyperparameters& hp) {
  const auto features = model.encode(case_tokens);
  return score_features(model, features, hp);
}

Posterior loo_score(const CountModel& model, std::size_t index, const Hyperparameters& hp) {
  if (index >= model.cases().size())
    throw Error("held-out index " + std::to_string(index) + " out of range (" +
                std::to_string(model.cases().size()) + " training cases)");
  hp.validate();
  return held_out_posterior(
      model, model.cases()[index], hp,
      [&](std::size_t n) { return log_term(hp.lambda_pos, double(n)); },
      [&](std::size_t n) { return log_term(hp.lambda_neg, double(n)); });
}

std::vector<Posterior> loo_scores(const CountModel& model, const Hyperparameters& hp) {
  hp.validate();
  std::vector<double> lp(model.n_pos() + 1), ln(model.n_neg() + 1);
  for (std::size_t n = 0; n < lp.size(); ++n) lp[n] = log_term(hp.lambda_pos, double(n));
  for (std::size_t n = 0; n < ln.size(); ++n) ln[n] = log_term(hp.lambda_neg, double(n));
  std::vector<Posterior> out;
  out.reserve(model.cases().size());
  for (const auto& held : model.cases())
    out.push_back(held_out_posterior(
        model, held, hp, [&](std::size_t n) { return lp[n]; },
        [&](std::size_t n) { return ln[n]; }));
  return out;
}

Label classify(const Posterior& posterior) {
  return posterior.p_pos > 0.5 ? Label::positive : Label::negative;
}

Label classify(const CountModel& model, const TokenSet& case_tokens, const Hyperparameters& hp) {
  return classify(score(model, case_tokens, hp));
}

Scorer::Scorer(const CountModel& model, const Hyperparameters& hp) : model_(&model) {
  hp.validate();
  const double log_total = std::log(hp.lambda_pos + hp.lambda_neg + double(model.n_total()));
  const double class_pos = log_term(hp.lambda_pos, double(model.n_pos()));
  const double class_neg = log_term(hp.lambda_neg, double(model.n_neg()));
  prior_pos_ = class_pos - log_total;
  prior_neg_ = class_neg - log_total;
  term_pos_.resize(model.feature_count());
  term_neg_.resize(model.feature_count());
  for (FeatureId f = 0; f < model.feature_count(); ++f) {
    term_pos_[f] = log_term(hp.lambda_pos, model.count(f, Label::positive)) - class_pos;
    term_neg_[f] = log_term(hp.lambda_neg, model.count(f, Label::negative)) - class_neg;
  }
}

Posterior Scorer::operator()(std::span<const FeatureId> features) const {
  double sp = prior_pos_;
  double sn = prior_neg_;
  for (FeatureId f : features) {
    sp += term_pos_[f];
    sn += term_neg_[f];
  }
  return normalise(sp, sn);
}

Posterior Scorer::operator()(const TokenSet& tokens) const {
  const auto features = model_->encode(tokens);
  return (*this)(features);
}

}  // namespace nbprior::model
