#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "rstknn/core.hpp"
#include "rstknn/iur_tree.hpp"

namespace rstknn {

/// One contribution-list tuple. `m` is the number of points of `entry` that
/// count as neighbors of every point of the owner: |entry| - 1 when the entry
/// overlaps the owner (tree ancestor-or-equal either way), |entry| otherwise.
struct NNTuple {
  Entry entry;
  std::size_t count = 0;  // |entry|
  std::size_t m = 0;
  double min_sim = 0.0;
  double max_sim = 0.0;
  bool overlaps_owner = false;
};

/// Lower and upper NN-lists of one entry, kept as a single keyed tuple store
/// so the two views can never disagree on membership. The lower view sorts by
/// min_sim descending, the upper view by max_sim descending; ties go to the
/// smaller entry.
class NNLists {
 public:
  NNLists() = default;
  NNLists(Entry owner, bool owner_is_point) : owner_(owner), owner_is_point_(owner_is_point) {}

  Entry owner() const { return owner_; }
  bool owner_is_point() const { return owner_is_point_; }

  std::span<const NNTuple> tuples() const { return tuples_; }
  bool empty() const { return tuples_.empty(); }
  const NNTuple* find(Entry e) const;

  void upsert(const NNTuple& t);
  bool erase(Entry e);
  template <class Pred>
  std::size_t erase_if(Pred pred) {
    return std::erase_if(tuples_, pred);
  }

  std::vector<NNTuple> lower_view() const;
  std::vector<NNTuple> upper_view() const;

  /// Sum of m over all tuples.
  std::size_t coverage() const;
  /// Sum of |entry| over all tuples.
  std::size_t covered_objects() const;

 private:
  Entry owner_;
  bool owner_is_point_ = false;
  std::vector<NNTuple> tuples_;  // sorted by entry
};

/// Everything a bound computation needs besides the two entries.
struct BoundContext {
  const IurTree& tree;
  SimParams params;
  NormStats stats;
};

NNLists make_lists(Entry owner);

/// Upserts (E, |E| - 1, min_st(E,E), max_st(E,E)) after removing any proper
/// ancestor of E. Throws NotInternalNode when the owner is an object.
void add_self(NNLists& lists, const BoundContext& ctx);

/// Removes proper ancestors (and proper descendants) of `b`, then upserts b's
/// tuple with bounds computed directly against the owner.
void update_nn_list(NNLists& lists, Entry b, const BoundContext& ctx);

/// Copy of the parent's tuples owned by `child`, with m recomputed for
/// overlap with the child.
NNLists inherit(const NNLists& parent_lists, Entry child, const IurTree& tree);

/// Drops the tuples of the owner itself and of its parent.
void strip_self_and_parent(NNLists& lists, const IurTree& tree);

/// Cumulative-m walk over the lower view; the min_sim of the first tuple at
/// which the running sum reaches k, or nothing when coverage < k.
std::optional<double> knn_lower(const NNLists& lists, int k);

/// True when every dataset object is accounted for: the tuples cover all n
/// objects (a point owner may leave only itself uncovered) and sum(m) == n-1.
bool is_complete(const NNLists& lists, std::size_t n);

/// Cumulative-m walk over the upper view, only for complete lists. A complete
/// list with fewer than k neighbors yields -infinity: every owned point has
/// fewer than k other objects, so any query is among its k nearest.
std::optional<double> knn_upper(const NNLists& lists, int k, std::size_t n);

/// knn_upper without the completeness gate (legacy behavior).
std::optional<double> knn_upper_ungated(const NNLists& lists, int k);

enum class Decision { Hit, Drop, Undecided };

const char* to_string(Decision d);

/// Drop when max_st(E,Q) <= lower; else Hit when min_st(E,Q) > upper. Ties
/// go to the database points.
Decision decide(double min_st_q, double max_st_q, std::optional<double> lower,
                std::optional<double> upper);

struct HitOrDropProbe {
  double min_st_q = 0.0;
  double max_st_q = 0.0;
  std::optional<double> lower;
  std::optional<double> upper;
  Decision decision = Decision::Undecided;
};

/// Evaluates the accept/prune test for the owner of `lists`. With
/// `completeness_gate` off, the upper bound is taken from whatever the list
/// covers.
HitOrDropProbe is_hit_or_drop(const QueryObject& q, const NNLists& lists, const BoundContext& ctx,
                              bool completeness_gate = true);

/// No tuple's entry is an ancestor of another tuple's entry.
bool is_non_overlapping(const NNLists& lists, const IurTree& tree);

}  // namespace rstknn
