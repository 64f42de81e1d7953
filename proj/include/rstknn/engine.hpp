#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "rstknn/core.hpp"
#include "rstknn/iur_tree.hpp"
#include "rstknn/nn_bounds.hpp"

namespace rstknn {

/// Correct is the FIFO traversal with locality (self-addition) and a
/// completeness-gated accept test. The two legacy modes are older variants
/// that are unsound on purpose:
///   Faulty2011 - max_st-priority traversal, no self-addition, ungated accept.
///   Faulty2014 - as Faulty2011 but with self-addition; accept still ungated.
enum class Mode { Correct, Faulty2011, Faulty2014 };

const char* to_string(Mode m);
/// Accepts "correct", "faulty2011", "faulty2014". Throws InvalidParams.
Mode parse_mode(const std::string& name);

struct TraceEvent {
  int step = 0;
  std::string action;
  std::string decision;  // "hit" | "drop" | "undecided"
  std::vector<std::string> u;
  std::vector<std::string> col;
  std::vector<std::string> rol;
  std::vector<std::string> pel;
};

struct RunStats {
  std::size_t hit_or_drop_evaluations = 0;
  // Evaluations made right after an entry's lists were brought up to date
  // (post mutual-update in the main loop, post full update in verification).
  std::size_t completeness_checks = 0;
  std::size_t completeness_failures = 0;
  std::size_t overcount_violations = 0;
  std::size_t overlap_violations = 0;
  std::size_t partition_violations = 0;
  std::size_t duplicate_queue_entries = 0;
};

struct DecisionRecord {
  Entry owner;
  const NNLists* lists = nullptr;
  HitOrDropProbe probe;
  bool verification = false;  // raised inside final verification
  bool checkpoint = false;    // counted as a completeness checkpoint
};

struct EngineOptions {
  /// Enqueue children in reverse stored order (FIFO-indifference checks).
  bool reverse_children = false;
  /// Check list and partition invariants at every step (O(n) per step).
  bool verify_invariants = true;
  /// Called for every accept/prune evaluation.
  std::function<void(const DecisionRecord&)> on_decision;
};

/// Mutable traversal state; one per run, never shared.
struct EngineState {
  explicit EngineState(const IurTree& tree);

  const IurTree* tree;
  std::deque<Entry> queue;              // U
  std::vector<Entry> col;               // candidate objects
  std::vector<std::uint32_t> rol;       // accepted object indices, discovery order
  std::vector<Entry> rol_entries;       // entries accepted whole
  std::vector<Entry> pel;               // pruned entries
  std::vector<NNLists> lists;           // dense by IurTree::dense_index
  std::vector<TraceEvent> trace;
  RunStats stats;

  NNLists& lists_of(Entry e) { return lists[tree->dense_index(e)]; }
  void record(const std::string& action, Decision d);
  /// Every object is under exactly one entry of U, COL, ROL, PEL.
  bool partition_holds() const;
};

struct QueryResult {
  std::vector<std::string> ids;          // lexicographic order
  std::vector<std::uint32_t> objects;    // object indices, same order as ids
  std::vector<TraceEvent> trace;
  RunStats stats;
};

/// Resolves every object in COL against all other objects. Point-to-point
/// bounds are exact, so each candidate is decided in one pass and COL ends
/// empty.
void final_verification(EngineState& state, const QueryObject& q, const BoundContext& ctx,
                        const EngineOptions& options = {});

QueryResult rstknn_query(const IurTree& tree, const QueryObject& q, const SimParams& params,
                         const NormStats& stats, Mode mode = Mode::Correct,
                         const EngineOptions& options = {});

QueryResult faulty2011_query(const IurTree& tree, const QueryObject& q, const SimParams& params,
                             const NormStats& stats, const EngineOptions& options = {});
QueryResult faulty2014_query(const IurTree& tree, const QueryObject& q, const SimParams& params,
                             const NormStats& stats, const EngineOptions& options = {});

/// Objects under the entry, ordered by id.
std::vector<std::string> subtree_object_ids(Entry e, const IurTree& tree);

namespace detail {
QueryResult finish(EngineState& state);
void observe(EngineState& state, const EngineOptions& options, const NNLists& lists,
             const HitOrDropProbe& probe, bool verification, bool checkpoint);
void apply_decision(EngineState& state, Entry e, Decision d);
}  // namespace detail

}  // namespace rstknn
