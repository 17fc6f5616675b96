#pragma once

// Independent reference implementations used by the unit and acceptance
// tests. Nothing here calls into the library's model or search code.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "nbprior/corpus.hpp"
#include "nbprior/prior_search.hpp"

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;
using Tokens = std::set<std::string>;

inline Rational exact(double v) { return Rational(v); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

struct Fixture {
  std::vector<Tokens> pos;
  std::vector<Tokens> neg;
};

/// Tokens seen in any positive document.
inline Tokens positive_union(const Fixture& f) {
  Tokens u;
  for (const auto& d : f.pos) u.insert(d.begin(), d.end());
  return u;
}

inline std::size_t doc_freq(const std::vector<Tokens>& docs, const std::string& t) {
  return std::size_t(std::count_if(docs.begin(), docs.end(), [&](const Tokens& d) { return d.count(t) != 0; }));
}

/// p(+ | case) computed as a plain product of rationals over the case tokens
/// that fall in `features`.
inline Rational posterior(const Fixture& f, const Tokens& features, const Tokens& case_tokens,
                          double lambda_neg, double lambda_pos) {
  const Rational ln = exact(lambda_neg), lp = exact(lambda_pos);
  const Rational np(f.pos.size()), nn(f.neg.size());
  Rational p_pos = (lp + np) / (lp + ln + np + nn);
  Rational p_neg = (ln + nn) / (lp + ln + np + nn);
  for (const auto& t : case_tokens) {
    if (!features.count(t)) continue;
    p_pos *= (lp + Rational(doc_freq(f.pos, t))) / (lp + np);
    p_neg *= (ln + Rational(doc_freq(f.neg, t))) / (ln + nn);
  }
  return p_pos / (p_pos + p_neg);
}

inline Rational posterior(const Fixture& f, const Tokens& case_tokens, double lambda_neg,
                          double lambda_pos) {
  return posterior(f, positive_union(f), case_tokens, lambda_neg, lambda_pos);
}

/// Held-out posterior by rebuilding from scratch without case `index`
/// (positives first, then negatives), keeping the full-model feature set.
inline Rational retrain_loo(const Fixture& f, std::size_t index, double lambda_neg,
                            double lambda_pos) {
  const Tokens features = positive_union(f);
  Fixture rest = f;
  Tokens held;
  if (index < f.pos.size()) {
    held = f.pos[index];
    rest.pos.erase(rest.pos.begin() + std::ptrdiff_t(index));
  } else {
    held = f.neg[index - f.pos.size()];
    rest.neg.erase(rest.neg.begin() + std::ptrdiff_t(index - f.pos.size()));
  }
  return posterior(rest, features, held, lambda_neg, lambda_pos);
}

inline std::vector<nbprior::corpus::Document> documents(const std::vector<Tokens>& docs,
                                                        nbprior::DocId first_id) {
  std::vector<nbprior::corpus::Document> out;
  for (const auto& d : docs)
    out.push_back({first_id++, "doc", nbprior::TokenSet(d.begin(), d.end())});
  return out;
}

/// Random fixture over a small vocabulary "t0".."t{vocab-1}".
inline Fixture random_fixture(std::mt19937_64& rng, std::size_t n_pos, std::size_t n_neg,
                              std::size_t vocab, double density) {
  std::bernoulli_distribution keep(density);
  auto doc = [&] {
    Tokens d;
    for (std::size_t t = 0; t < vocab; ++t)
      if (keep(rng)) d.insert("t" + std::to_string(t));
    return d;
  };
  Fixture f;
  for (std::size_t i = 0; i < n_pos; ++i) f.pos.push_back(doc());
  for (std::size_t i = 0; i < n_neg; ++i) f.neg.push_back(doc());
  return f;
}

// --- search surfaces ---------------------------------------------------------

using nbprior::search::Cell;
using nbprior::search::CellScore;

/// Peak 1 at (px, py), falling off with squared distance on each axis.
struct Unimodal {
  double px, py, sx = 1.0, sy = 1.0;
  CellScore operator()(Cell c) const {
    const double dx = (double(c.x) - px) / sx, dy = (double(c.y) - py) / sy;
    return {1.0 / (1.0 + dx * dx + dy * dy), 0.5};
  }
};

/// Two separated peaks of different heights; the score is the larger bump.
struct TwoBump {
  double ax, ay, ah, aw;
  double bx, by, bh, bw;
  CellScore operator()(Cell c) const {
    auto bump = [&](double x0, double y0, double h, double w) {
      const double dx = double(c.x) - x0, dy = double(c.y) - y0;
      return h / (1.0 + (dx * dx + dy * dy) / (w * w));
    };
    return {std::max(bump(ax, ay, ah, aw), bump(bx, by, bh, bw)), 0.5};
  }
};

/// Exhaustive lexicographic argmax over the whole grid; ties to smaller (x, y).
template <class F>
std::pair<Cell, CellScore> brute_force_argmax(const F& f) {
  Cell best{0, 0};
  CellScore best_score = f(best);
  for (int x = 0; x < int(nbprior::search::kGridSize); ++x)
    for (int y = 0; y < int(nbprior::search::kGridSize); ++y) {
      const Cell c{std::uint16_t(x), std::uint16_t(y)};
      const CellScore s = f(c);
      if (s.ppv > best_score.ppv ||
          (s.ppv == best_score.ppv && s.sensitivity > best_score.sensitivity)) {
        best = c;
        best_score = s;
      }
    }
  return {best, best_score};
}

/// True when no in-bounds cell at Chebyshev distance <= 2 scores strictly
/// higher (lexicographically) than `c`, evaluated directly on the surface.
template <class F>
bool is_local_max(const F& f, Cell c) {
  const CellScore s = f(c);
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) {
      const int x = c.x + i, y = c.y + j;
      if (x < 0 || y < 0 || x >= int(nbprior::search::kGridSize) ||
          y >= int(nbprior::search::kGridSize))
        continue;
      const CellScore n = f(Cell{std::uint16_t(x), std::uint16_t(y)});
      if (n.ppv > s.ppv || (n.ppv == s.ppv && n.sensitivity > s.sensitivity)) return false;
    }
  return true;
}

}  // namespace oracle
