#include "nbprior/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "nbprior/error.hpp"
#include "nbprior/random.hpp"

namespace nbprior::synthetic {

namespace {

std::vector<double> zipf_cdf(std::size_t n, double exponent) {
  std::vector<double> cdf(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    total += 1.0 / std::pow(double(r + 1), exponent);
    cdf[r] = total;
  }
  for (auto& c : cdf) c /= total;
  return cdf;
}

std::size_t draw(const std::vector<double>& cdf, Rng& rng) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), rng.uniform());
  return std::min<std::size_t>(std::size_t(it - cdf.begin()), cdf.size() - 1);
}

// Box-Muller on two unit draws; one normal per call.
double standard_normal(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

std::string word(std::size_t w) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "w%04zu", w);
  return buf;
}

}  // namespace

SyntheticCorpus generate(const Config& c) {
  if (c.vocab == 0 || c.topic_vocab == 0 || c.topic_vocab > c.vocab)
    throw Error("synthetic vocabulary sizes are inconsistent");
  if (c.min_draws == 0 || c.min_draws > c.max_draws || !(c.median_draws > 0) ||
      !(c.length_sigma >= 0))
    throw Error("bad document length settings");
  if (c.members == 0) throw Error("synthetic corpus needs at least one member");

  Rng rng(c.seed);
  const auto background = zipf_cdf(c.vocab, c.zipf_exponent);
  const auto topic = zipf_cdf(c.topic_vocab, c.zipf_exponent);

  // Topic 0 is the target; the rest are background topics.
  std::vector<std::vector<std::size_t>> topic_words(1 + c.other_topics);
  for (auto& words : topic_words) {
    std::vector<std::size_t> perm(c.vocab);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = 0; i < c.topic_vocab; ++i)
      std::swap(perm[i], perm[i + rng.below(perm.size() - i)]);
    words.assign(perm.begin(), perm.begin() + c.topic_vocab);
  }

  const auto hidden = std::size_t(std::llround(double(c.pool) * c.hidden_fraction));
  const std::size_t total = c.members + c.pool;
  std::vector<DocId> ids(total);
  std::iota(ids.begin(), ids.end(), DocId{1});
  for (std::size_t i = 0; i + 1 < ids.size(); ++i)
    std::swap(ids[i], ids[i + rng.below(ids.size() - i)]);

  SyntheticCorpus out{corpus::Corpus(c.shard_count), {}, {}};
  for (std::size_t i = 0; i < total; ++i) {
    const bool is_member = i < c.members;
    const bool is_hidden = !is_member && i < c.members + hidden;
    const bool target = is_member || is_hidden;
    const bool on_topic = target || c.other_topics > 0;
    const std::size_t t = target ? 0 : (c.other_topics > 0 ? 1 + rng.below(c.other_topics) : 0);
    const double length = c.median_draws * std::exp(c.length_sigma * standard_normal(rng));
    const auto draws = std::clamp<std::size_t>(std::size_t(std::llround(length)), c.min_draws,
                                               c.max_draws);
    corpus::Document doc;
    doc.id = ids[i];
    char title[32];
    std::snprintf(title, sizeof(title), "Document %06llu", static_cast<unsigned long long>(doc.id));
    doc.title = title;
    for (std::size_t d = 0; d < draws; ++d) {
      const bool from_topic = on_topic && rng.uniform() < c.topic_share;
      const std::size_t w = from_topic ? topic_words[t][draw(topic, rng)] : draw(background, rng);
      doc.tokens.push_back(word(w));
    }
    std::sort(doc.tokens.begin(), doc.tokens.end());
    doc.tokens.erase(std::unique(doc.tokens.begin(), doc.tokens.end()), doc.tokens.end());
    if (is_member) out.categories.add(c.category, doc.id);
    if (is_hidden) out.hidden_positives.push_back(doc.id);
    out.corpus.add(std::move(doc));
  }
  std::sort(out.hidden_positives.begin(), out.hidden_positives.end());
  return out;
}

}  // namespace nbprior::synthetic
