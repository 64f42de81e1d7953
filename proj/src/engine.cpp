#include "rstknn/engine.hpp"

#include <algorithm>
#include <stdexcept>

#include "rstknn/errors.hpp"

namespace rstknn {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Correct:
      return "correct";
    case Mode::Faulty2011:
      return "faulty2011";
    case Mode::Faulty2014:
      return "faulty2014";
  }
  return "correct";
}

Mode parse_mode(const std::string& name) {
  if (name == "correct") return Mode::Correct;
  if (name == "faulty2011") return Mode::Faulty2011;
  if (name == "faulty2014") return Mode::Faulty2014;
  throw InvalidParams("unknown mode: " + name);
}

EngineState::EngineState(const IurTree& t) : tree(&t) {
  lists.reserve(t.entry_count());
  for (std::uint32_t i = 0; i < t.nodes().size(); ++i) lists.push_back(make_lists(Entry::node(i)));
  for (std::uint32_t i = 0; i < t.size(); ++i) lists.push_back(make_lists(Entry::object(i)));
}

void EngineState::record(const std::string& action, Decision d) {
  TraceEvent ev;
  ev.step = static_cast<int>(trace.size()) + 1;
  ev.action = action;
  ev.decision = to_string(d);
  for (Entry e : queue) ev.u.push_back(tree->label(e));
  for (Entry e : col) ev.col.push_back(tree->label(e));
  for (auto o : rol) ev.rol.push_back(tree->object(o).id);
  for (Entry e : pel) ev.pel.push_back(tree->label(e));
  trace.push_back(std::move(ev));
}

bool EngineState::partition_holds() const {
  std::vector<int> seen(tree->size(), 0);
  auto mark = [&](Entry e) {
    for (auto o : tree->subtree_objects(e)) ++seen[o];
  };
  for (Entry e : queue) mark(e);
  for (Entry e : col) mark(e);
  for (auto o : rol) ++seen[o];
  for (Entry e : pel) mark(e);
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

std::vector<std::string> subtree_object_ids(Entry e, const IurTree& tree) {
  std::vector<std::string> out;
  for (auto o : tree.subtree_objects(e)) out.push_back(tree.object(o).id);
  return out;
}

namespace detail {

void observe(EngineState& state, const EngineOptions& options, const NNLists& lists,
             const HitOrDropProbe& probe, bool verification, bool checkpoint) {
  const std::size_t n = state.tree->size();
  ++state.stats.hit_or_drop_evaluations;
  if (checkpoint) {
    ++state.stats.completeness_checks;
    if (!is_complete(lists, n)) ++state.stats.completeness_failures;
  }
  if (options.verify_invariants) {
    if (lists.coverage() > n - 1) ++state.stats.overcount_violations;
    if (!is_non_overlapping(lists, *state.tree)) ++state.stats.overlap_violations;
  }
  if (options.on_decision) options.on_decision({lists.owner(), &lists, probe, verification, checkpoint});
}

void apply_decision(EngineState& state, Entry e, Decision d) {
  if (d == Decision::Hit) {
    state.rol_entries.push_back(e);
    for (auto o : state.tree->subtree_objects(e)) state.rol.push_back(o);
  } else if (d == Decision::Drop) {
    state.pel.push_back(e);
  }
}

QueryResult finish(EngineState& state) {
  QueryResult r;
  r.objects = state.rol;
  std::sort(r.objects.begin(), r.objects.end(), [&](std::uint32_t a, std::uint32_t b) {
    return state.tree->object(a).id < state.tree->object(b).id;
  });
  for (auto o : r.objects) r.ids.push_back(state.tree->object(o).id);
  r.trace = std::move(state.trace);
  r.stats = state.stats;
  return r;
}

}  // namespace detail

void final_verification(EngineState& state, const QueryObject& q, const BoundContext& ctx,
                        const EngineOptions& options) {
  const IurTree& tree = *state.tree;
  std::vector<std::uint32_t> pel_points;
  for (Entry e : state.pel) {
    for (auto o : tree.subtree_objects(e)) pel_points.push_back(o);
  }

  const std::vector<Entry> candidates = state.col;
  for (Entry o : candidates) {
    NNLists& lists = state.lists_of(o);
    for (auto r : state.rol) update_nn_list(lists, Entry::object(r), ctx);
    for (auto p : pel_points) update_nn_list(lists, Entry::object(p), ctx);
    for (Entry c : state.col) {
      if (c != o) update_nn_list(lists, c, ctx);
    }
    const HitOrDropProbe probe = is_hit_or_drop(q, lists, ctx, true);
    detail::observe(state, options, lists, probe, true, true);

    if (probe.decision == Decision::Undecided)
      throw std::logic_error("final verification left " + tree.label(o) + " undecided");
    std::erase(state.col, o);
    detail::apply_decision(state, o, probe.decision);
    if (probe.decision == Decision::Drop) pel_points.push_back(o.index);

    const char* verb = probe.decision == Decision::Hit ? "Accept " : "Prune ";
    state.record("Verify " + tree.label(o) + ", " + verb + tree.label(o), probe.decision);
    if (options.verify_invariants && !state.partition_holds()) ++state.stats.partition_violations;
  }
}

namespace {

QueryResult correct_query(const IurTree& tree, const QueryObject& q, const BoundContext& ctx,
                          const EngineOptions& options) {
  EngineState state(tree);
  state.queue.push_back(tree.root());

  while (!state.queue.empty()) {
    const Entry e = state.queue.front();
    state.queue.pop_front();
    NNLists& lists = state.lists_of(e);

    strip_self_and_parent(lists, tree);
    if (e.is_node()) add_self(lists, ctx);
    for (Entry other : state.queue) {
      update_nn_list(lists, other, ctx);
      update_nn_list(state.lists_of(other), e, ctx);
    }

    const HitOrDropProbe probe = is_hit_or_drop(q, lists, ctx, true);
    detail::observe(state, options, lists, probe, false, true);

    const std::string label = tree.label(e);
    std::string action = "Dequeue " + label;
    switch (probe.decision) {
      case Decision::Hit:
        action += ", Accept " + label;
        break;
      case Decision::Drop:
        action += ", Prune " + label;
        break;
      case Decision::Undecided:
        if (e.is_node()) {
          auto kids = tree.children(e);
          if (options.reverse_children) std::reverse(kids.begin(), kids.end());
          for (Entry c : kids) {
            state.lists_of(c) = inherit(lists, c, tree);
            if (options.verify_invariants &&
                std::find(state.queue.begin(), state.queue.end(), c) != state.queue.end())
              ++state.stats.duplicate_queue_entries;
            state.queue.push_back(c);
            action += ", Enqueue " + tree.label(c);
          }
        } else {
          state.col.push_back(e);
          action += ", Candidate " + label;
        }
        break;
    }
    detail::apply_decision(state, e, probe.decision);
    state.record(action, probe.decision);
    if (options.verify_invariants && !state.partition_holds()) ++state.stats.partition_violations;
  }

  final_verification(state, q, ctx, options);
  return detail::finish(state);
}

}  // namespace

QueryResult rstknn_query(const IurTree& tree, const QueryObject& q, const SimParams& params,
                         const NormStats& stats, Mode mode, const EngineOptions& options) {
  params.validate();
  const BoundContext ctx{tree, params, stats};
  switch (mode) {
    case Mode::Faulty2011:
      return faulty2011_query(tree, q, params, stats, options);
    case Mode::Faulty2014:
      return faulty2014_query(tree, q, params, stats, options);
    case Mode::Correct:
      break;
  }
  return correct_query(tree, q, ctx, options);
}

}  // namespace rstknn
