// Legacy traversals with known soundness bugs. Both use a max_st-priority
// queue. Each child of the dequeued node inherits the parent's lists and is
// tested, then updated against COL, ROL and U with a mutual update of
// queued/candidate entries, stopping as soon as it is decided. Neither gates the accept test on list completeness, and the 2011
// variant never adds a node to its own lists.

#include <algorithm>

#include "rstknn/engine.hpp"

namespace rstknn {

namespace {

class LegacyRun {
 public:
  LegacyRun(const IurTree& tree, const QueryObject& q, const BoundContext& ctx,
            const EngineOptions& options, bool self_addition)
      : tree_(tree), q_(q), ctx_(ctx), options_(options), self_addition_(self_addition),
        state_(tree) {}

  QueryResult run() {
    std::vector<Entry> queue{tree_.root()};
    while (!queue.empty()) {
      auto best = std::min_element(queue.begin(), queue.end(), [&](Entry a, Entry b) {
        const double pa = priority(a), pb = priority(b);
        if (pa != pb) return pa > pb;
        return a < b;
      });
      const Entry parent = *best;
      queue.erase(best);
      sync_queue(queue);

      action_ = "Dequeue " + tree_.label(parent);
      Decision last = Decision::Undecided;
      for (Entry child : children_of(parent)) last = process_child(child, parent, queue);
      sync_queue(queue);
      state_.record(action_, last);
      if (options_.verify_invariants && !state_.partition_holds())
        ++state_.stats.partition_violations;
    }
    final_verification(state_, q_, ctx_, options_);
    return detail::finish(state_);
  }

 private:
  double priority(Entry e) {
    return max_st(tree_.view(e), GroupView::of(q_), ctx_.params, ctx_.stats);
  }

  std::vector<Entry> children_of(Entry e) const {
    auto kids = tree_.children(e);
    if (options_.reverse_children) std::reverse(kids.begin(), kids.end());
    return kids;
  }

  void sync_queue(const std::vector<Entry>& queue) {
    state_.queue.assign(queue.begin(), queue.end());
  }

  HitOrDropProbe evaluate(const NNLists& lists) {
    HitOrDropProbe p = is_hit_or_drop(q_, lists, ctx_, false);
    detail::observe(state_, options_, lists, p, false, false);
    return p;
  }

  Decision process_child(Entry e, Entry parent, std::vector<Entry>& queue) {
    NNLists& lists = state_.lists_of(e);
    lists = inherit(state_.lists_of(parent), e, tree_);
    HitOrDropProbe probe = evaluate(lists);

    if (probe.decision == Decision::Undecided) {
      if (self_addition_ && e.is_node()) add_self(lists, ctx_);

      std::vector<Entry> others;
      others.insert(others.end(), state_.col.begin(), state_.col.end());
      others.insert(others.end(), state_.rol_entries.begin(), state_.rol_entries.end());
      others.insert(others.end(), queue.begin(), queue.end());
      if (self_addition_) {
        // the 2014 variant visits neighbors by decreasing max_st
        const GroupView ev = tree_.view(e);
        std::stable_sort(others.begin(), others.end(), [&](Entry a, Entry b) {
          return max_st(ev, tree_.view(a), ctx_.params, ctx_.stats) >
                 max_st(ev, tree_.view(b), ctx_.params, ctx_.stats);
        });
      }

      bool decided = false;
      for (Entry other : others) {
        const bool in_queue = std::find(queue.begin(), queue.end(), other) != queue.end();
        const bool in_col = std::find(state_.col.begin(), state_.col.end(), other) != state_.col.end();
        const bool in_rol = std::find(state_.rol_entries.begin(), state_.rol_entries.end(), other) !=
                            state_.rol_entries.end();
        if (!in_queue && !in_col && !in_rol) continue;  // decided meanwhile

        update_nn_list(lists, other, ctx_);
        probe = evaluate(lists);
        if (probe.decision != Decision::Undecided) {
          decided = true;
          break;
        }
        if (in_queue || in_col) {
          NNLists& other_lists = state_.lists_of(other);
          update_nn_list(other_lists, e, ctx_);
          const HitOrDropProbe op = evaluate(other_lists);
          if (op.decision != Decision::Undecided) {
            if (in_queue) std::erase(queue, other);
            if (in_col) std::erase(state_.col, other);
            detail::apply_decision(state_, other, op.decision);
            action_ += (op.decision == Decision::Hit ? ", Accept " : ", Prune ") + tree_.label(other);
          }
        }
      }
      if (!decided) probe = evaluate(lists);
    }

    const std::string label = tree_.label(e);
    switch (probe.decision) {
      case Decision::Hit:
        action_ += ", Accept " + label;
        break;
      case Decision::Drop:
        action_ += ", Prune " + label;
        break;
      case Decision::Undecided:
        if (e.is_node()) {
          queue.push_back(e);
          action_ += ", Enqueue " + label;
        } else {
          state_.col.push_back(e);
          action_ += ", Candidate " + label;
        }
        break;
    }
    detail::apply_decision(state_, e, probe.decision);
    return probe.decision;
  }

  const IurTree& tree_;
  const QueryObject& q_;
  const BoundContext& ctx_;
  const EngineOptions& options_;
  bool self_addition_;
  EngineState state_;
  std::string action_;
};

}  // namespace

QueryResult faulty2011_query(const IurTree& tree, const QueryObject& q, const SimParams& params,
                             const NormStats& stats, const EngineOptions& options) {
  params.validate();
  const BoundContext ctx{tree, params, stats};
  return LegacyRun(tree, q, ctx, options, false).run();
}

QueryResult faulty2014_query(const IurTree& tree, const QueryObject& q, const SimParams& params,
                             const NormStats& stats, const EngineOptions& options) {
  params.validate();
  const BoundContext ctx{tree, params, stats};
  return LegacyRun(tree, q, ctx, options, true).run();
}

}  // namespace rstknn
