#include "rstknn/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rstknn/errors.hpp"

namespace rstknn {

TermVector::TermVector(std::initializer_list<Term> terms) {
  for (const auto& [term, weight] : terms) set(term, weight);
}

TermVector::TermVector(const std::map<std::string, double>& terms) {
  for (const auto& [term, weight] : terms) set(term, weight);
}

void TermVector::set(const std::string& term, double weight) {
  if (!std::isfinite(weight) || weight < 0.0)
    throw std::invalid_argument("term weight must be finite and nonnegative: " + term);
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                             [](const Term& t, const std::string& key) { return t.first < key; });
  const bool present = it != terms_.end() && it->first == term;
  if (weight == 0.0) {
    if (present) terms_.erase(it);
  } else if (present) {
    it->second = weight;
  } else {
    terms_.insert(it, Term{term, weight});
  }
}

double TermVector::get(const std::string& term) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term,
                             [](const Term& t, const std::string& key) { return t.first < key; });
  return (it != terms_.end() && it->first == term) ? it->second : 0.0;
}

double TermVector::norm2() const {
  double s = 0.0;
  for (const auto& [term, w] : terms_) s += w * w;
  return s;
}

TermVector TermVector::intersect(const TermVector& a, const TermVector& b) {
  TermVector out;
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  while (i != a.terms_.end() && j != b.terms_.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      out.terms_.emplace_back(i->first, std::min(i->second, j->second));
      ++i;
      ++j;
    }
  }
  return out;
}

TermVector TermVector::unite(const TermVector& a, const TermVector& b) {
  TermVector out;
  auto i = a.terms_.begin();
  auto j = b.terms_.begin();
  while (i != a.terms_.end() || j != b.terms_.end()) {
    if (j == b.terms_.end() || (i != a.terms_.end() && i->first < j->first)) {
      out.terms_.push_back(*i++);
    } else if (i == a.terms_.end() || j->first < i->first) {
      out.terms_.push_back(*j++);
    } else {
      out.terms_.emplace_back(i->first, std::max(i->second, j->second));
      ++i;
      ++j;
    }
  }
  return out;
}

double dot(const TermVector& a, const TermVector& b) {
  // Merge in lexicographic term order; the product sequence is the same
  // whichever argument comes first, so dot(a, b) == dot(b, a) exactly.
  double s = 0.0;
  auto ta = a.terms();
  auto tb = b.terms();
  auto i = ta.begin();
  auto j = tb.begin();
  while (i != ta.end() && j != tb.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

void SimParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidParams("alpha must lie in [0, 1]");
  if (k < 1) throw InvalidParams("k must be >= 1");
}

double euclidean_dist(const Point& p, const Point& q) {
  const double dx = p.x - q.x;
  const double dy = p.y - q.y;
  return std::sqrt(dx * dx + dy * dy);
}

double extended_jaccard(const TermVector& u, const TermVector& v) {
  if (u.empty() && v.empty()) return 0.0;
  const double uv = dot(u, v);
  return uv / (u.norm2() + v.norm2() - uv);
}

NormStats compute_norm_stats(std::span<const STObject> dataset) {
  if (dataset.size() < 2)
    throw DatasetTooSmall("normalization needs at least 2 objects, got " +
                          std::to_string(dataset.size()));
  NormStats s;
  s.phi_s = s.phi_t = std::numeric_limits<double>::infinity();
  s.psi_s = s.psi_t = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t j = i + 1; j < dataset.size(); ++j) {
      const double d = euclidean_dist(dataset[i].loc, dataset[j].loc);
      const double t = extended_jaccard(dataset[i].vct, dataset[j].vct);
      s.phi_s = std::min(s.phi_s, d);
      s.psi_s = std::max(s.psi_s, d);
      s.phi_t = std::min(s.phi_t, t);
      s.psi_t = std::max(s.psi_t, t);
    }
  }
  return s;
}

NormStats norm_stats_or_degenerate(std::span<const STObject> dataset) {
  return dataset.size() < 2 ? NormStats::degenerate() : compute_norm_stats(dataset);
}

double combine_similarity(double dist, double text_sim, const SimParams& params,
                          const NormStats& stats) {
  const double spatial =
      stats.psi_s == stats.phi_s ? 1.0 : 1.0 - (dist - stats.phi_s) / (stats.psi_s - stats.phi_s);
  const double textual =
      stats.psi_t == stats.phi_t ? 1.0 : (text_sim - stats.phi_t) / (stats.psi_t - stats.phi_t);
  return params.alpha * spatial + (1.0 - params.alpha) * textual;
}

double sim_st(const Point& loc1, const TermVector& vct1, const Point& loc2,
              const TermVector& vct2, const SimParams& params, const NormStats& stats) {
  return combine_similarity(euclidean_dist(loc1, loc2), extended_jaccard(vct1, vct2), params,
                            stats);
}

double sim_st(const STObject& a, const STObject& b, const SimParams& params,
              const NormStats& stats) {
  return sim_st(a.loc, a.vct, b.loc, b.vct, params, stats);
}

double sim_st(const STObject& a, const QueryObject& q, const SimParams& params,
              const NormStats& stats) {
  return sim_st(a.loc, a.vct, q.loc, q.vct, params, stats);
}

double fdim_ratio(double x, double x_prime) {
  if (!(x > 0.0) || !(x_prime > 0.0)) throw NonPositiveInput("fdim_ratio needs x, x' > 0");
  return std::min(x, x_prime) / std::max(x, x_prime);
}

}  // namespace rstknn
