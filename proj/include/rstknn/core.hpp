#pragma once

#include <initializer_list>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rstknn {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Sparse nonnegative term -> weight mapping.
///
/// Terms are kept in lexicographic order, which is the canonical order for
/// every dot product in the library. Zero weights are never stored.
class TermVector {
 public:
  using Term = std::pair<std::string, double>;

  TermVector() = default;
  TermVector(std::initializer_list<Term> terms);
  explicit TermVector(const std::map<std::string, double>& terms);

  /// Sets a term's weight; a weight of 0 erases it. Throws on negative or
  /// non-finite weights.
  void set(const std::string& term, double weight);
  double get(const std::string& term) const;

  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::span<const Term> terms() const { return terms_; }

  double norm2() const;

  /// Coordinatewise minimum (terms absent from either side drop out).
  static TermVector intersect(const TermVector& a, const TermVector& b);
  /// Coordinatewise maximum.
  static TermVector unite(const TermVector& a, const TermVector& b);

  friend bool operator==(const TermVector&, const TermVector&) = default;

 private:
  std::vector<Term> terms_;
};

double dot(const TermVector& a, const TermVector& b);

struct STObject {
  std::string id;
  Point loc;
  TermVector vct;
};

struct QueryObject {
  Point loc;
  TermVector vct;
};

/// Dataset-level normalization constants: min/max pairwise distance and
/// min/max pairwise Extended Jaccard over database objects only.
struct NormStats {
  double phi_s = 0.0;
  double psi_s = 0.0;
  double phi_t = 0.0;
  double psi_t = 0.0;

  /// Stats for which both normalized components are the constant 1.
  static NormStats degenerate() { return {}; }
};

struct SimParams {
  double alpha = 0.5;
  int k = 1;

  /// Throws InvalidParams unless 0 <= alpha <= 1 and k >= 1.
  void validate() const;
};

double euclidean_dist(const Point& p, const Point& q);

/// u.v / (|u|^2 + |v|^2 - u.v); 0 when both vectors are empty.
double extended_jaccard(const TermVector& u, const TermVector& v);

/// Exhaustive O(n^2) scan. Throws DatasetTooSmall for fewer than 2 objects.
NormStats compute_norm_stats(std::span<const STObject> dataset);

/// compute_norm_stats for >= 2 objects, NormStats::degenerate() otherwise.
NormStats norm_stats_or_degenerate(std::span<const STObject> dataset);

/// Combines a distance and a textual similarity into the normalized
/// spatio-textual score. Not clamped. A component whose range collapses
/// (psi == phi) contributes the constant 1.
double combine_similarity(double dist, double text_sim, const SimParams& params,
                          const NormStats& stats);

double sim_st(const Point& loc1, const TermVector& vct1, const Point& loc2,
              const TermVector& vct2, const SimParams& params, const NormStats& stats);
double sim_st(const STObject& a, const STObject& b, const SimParams& params,
              const NormStats& stats);
double sim_st(const STObject& a, const QueryObject& q, const SimParams& params,
              const NormStats& stats);

/// min(x, x') / max(x, x'). Throws NonPositiveInput unless both are > 0.
double fdim_ratio(double x, double x_prime);

}  // namespace rstknn
