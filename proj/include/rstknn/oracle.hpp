#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rstknn/core.hpp"
#include "rstknn/engine.hpp"
#include "rstknn/iur_tree.hpp"

namespace rstknn {

/// Similarity of `dataset[index]` to its k-th nearest other object; -infinity
/// when fewer than k other objects exist.
double kth_nn_sim(std::size_t index, std::span<const STObject> dataset, int k,
                  const SimParams& params, const NormStats& stats);

/// Objects o with sim_st(o, Q) strictly above their k-th neighbor similarity.
/// Ids in lexicographic order.
std::vector<std::string> rknn_bruteforce(std::span<const STObject> dataset, const QueryObject& q,
                                         const SimParams& params, const NormStats& stats);

/// Bound functions under test; defaults are the library's own.
struct BoundFns {
  std::function<double(const GroupView&, const GroupView&)> min_t = rstknn::min_t;
  std::function<double(const GroupView&, const GroupView&)> max_t = rstknn::max_t;
  std::function<double(const GroupView&, const GroupView&, const SimParams&, const NormStats&)>
      min_st = rstknn::min_st;
  std::function<double(const GroupView&, const GroupView&, const SimParams&, const NormStats&)>
      max_st = rstknn::max_st;
};

struct SandwichReport {
  std::size_t pairs_checked = 0;  // one per pair and bound family (st, t)
  std::size_t violations = 0;
  std::vector<std::string> details;  // first few violations, human readable

  bool ok() const { return violations == 0; }
};

/// For every pair of entries (nodes and objects, self-pairs included) and
/// every entry/query pair, checks min_st <= sim_st <= max_st and
/// min_t <= EJ <= max_t over all contained object pairs. O(n^2) per pair.
SandwichReport check_bound_sandwich(const IurTree& tree, const QueryObject& q,
                                    const SimParams& params, const NormStats& stats,
                                    const BoundFns& fns = {});

/// True iff fdim dominates coordinatewise (fdim(p_i, p1_i) >= fdim(p_i, p2_i))
/// while EJ(p, p1) < EJ(p, p2), i.e. the vectors refute the claim that EJ
/// preserves fdim ordering. Vectors are dense, positive, equal length.
bool fdim_ordering_refutation_check(std::span<const double> p, std::span<const double> p1,
                                    std::span<const double> p2);
/// The check on p = <100,30>, p' = <1,40>, p'' = <1,50>.
bool fdim_ordering_refutation_check();

/// Dense positive vector -> TermVector with terms "t0", "t1", ...
TermVector dense_terms(std::span<const double> weights);

// ---------------------------------------------------------------------------
// Random instances

struct RandomConfig {
  std::size_t n_min = 2;
  std::size_t n_max = 16;
  int vocab = 8;
  int coord_max = 128;
  int weight_max = 10;
  int max_terms = 3;
  std::vector<int> fanouts{2, 4};
  std::vector<int> ks{1, 2, 3, 4};
  std::vector<double> alphas{0.0, 0.4, 0.7, 1.0};
};

struct Instance {
  std::vector<STObject> objects;
  QueryObject query;
  SimParams params;
  int fanout = IurTree::kDefaultFanout;
  std::string layout;  // explicit topology; empty means STR bulk load
};

TermVector random_terms(std::mt19937_64& rng, int vocab, int max_terms, int weight_max);
/// n objects with ids o0.. (zero-padded to a common width), integer
/// coordinates in [0, coord_max]^2 and integer weights in [1, weight_max].
std::vector<STObject> random_dataset(std::mt19937_64& rng, std::size_t n, int vocab,
                                     const RandomConfig& cfg = {});
std::vector<STObject> generate_dataset(std::uint64_t seed, std::size_t n, int vocab);
/// Deterministic instance for (seed, trial).
Instance random_instance(std::uint64_t seed, std::uint64_t trial, const RandomConfig& cfg = {});

IurTree build_tree(const Instance& inst);
NormStats instance_stats(const Instance& inst);

struct Counterexample {
  Instance instance;
  std::uint64_t trial = 0;
  std::vector<std::string> mode_result;
  std::vector<std::string> oracle_result;
};

/// Runs `mode` against rknn_bruteforce on random instances and returns the
/// first mismatch, by trial index.
std::optional<Counterexample> counterexample_search(Mode mode, std::uint64_t seed,
                                                    std::size_t trials,
                                                    const RandomConfig& cfg = {});

}  // namespace rstknn
