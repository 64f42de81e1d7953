#include "rstknn/nn_bounds.hpp"

#include <algorithm>
#include <limits>

#include "rstknn/errors.hpp"

namespace rstknn {

const NNTuple* NNLists::find(Entry e) const {
  auto it = std::lower_bound(tuples_.begin(), tuples_.end(), e,
                             [](const NNTuple& t, Entry key) { return t.entry < key; });
  return (it != tuples_.end() && it->entry == e) ? &*it : nullptr;
}

void NNLists::upsert(const NNTuple& t) {
  auto it = std::lower_bound(tuples_.begin(), tuples_.end(), t.entry,
                             [](const NNTuple& x, Entry key) { return x.entry < key; });
  if (it != tuples_.end() && it->entry == t.entry) {
    *it = t;
  } else {
    tuples_.insert(it, t);
  }
}

bool NNLists::erase(Entry e) {
  return erase_if([e](const NNTuple& t) { return t.entry == e; }) > 0;
}

std::vector<NNTuple> NNLists::lower_view() const {
  std::vector<NNTuple> v(tuples_.begin(), tuples_.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const NNTuple& a, const NNTuple& b) { return a.min_sim > b.min_sim; });
  return v;
}

std::vector<NNTuple> NNLists::upper_view() const {
  std::vector<NNTuple> v(tuples_.begin(), tuples_.end());
  std::stable_sort(v.begin(), v.end(),
                   [](const NNTuple& a, const NNTuple& b) { return a.max_sim > b.max_sim; });
  return v;
}

std::size_t NNLists::coverage() const {
  std::size_t s = 0;
  for (const auto& t : tuples_) s += t.m;
  return s;
}

std::size_t NNLists::covered_objects() const {
  std::size_t s = 0;
  for (const auto& t : tuples_) s += t.count;
  return s;
}

NNLists make_lists(Entry owner) { return NNLists(owner, owner.is_object()); }

namespace {

NNTuple make_tuple(Entry owner, Entry b, const BoundContext& ctx) {
  const GroupView a_view = ctx.tree.view(owner);
  const GroupView b_view = ctx.tree.view(b);
  NNTuple t;
  t.entry = b;
  t.count = ctx.tree.count(b);
  t.overlaps_owner = ctx.tree.overlaps(owner, b);
  t.m = t.overlaps_owner ? t.count - 1 : t.count;
  t.min_sim = min_st(a_view, b_view, ctx.params, ctx.stats);
  t.max_sim = max_st(a_view, b_view, ctx.params, ctx.stats);
  return t;
}

}  // namespace

void add_self(NNLists& lists, const BoundContext& ctx) {
  const Entry self = lists.owner();
  if (!self.is_node()) throw NotInternalNode("add_self needs an index node owner");
  lists.erase_if([&](const NNTuple& t) { return ctx.tree.is_proper_ancestor(t.entry, self); });
  lists.upsert(make_tuple(self, self, ctx));
}

void update_nn_list(NNLists& lists, Entry b, const BoundContext& ctx) {
  lists.erase_if([&](const NNTuple& t) {
    return ctx.tree.is_proper_ancestor(t.entry, b) || ctx.tree.is_proper_ancestor(b, t.entry);
  });
  lists.upsert(make_tuple(lists.owner(), b, ctx));
}

NNLists inherit(const NNLists& parent_lists, Entry child, const IurTree& tree) {
  NNLists out = make_lists(child);
  for (NNTuple t : parent_lists.tuples()) {
    t.overlaps_owner = tree.overlaps(child, t.entry);
    t.m = t.overlaps_owner ? t.count - 1 : t.count;
    out.upsert(t);
  }
  return out;
}

void strip_self_and_parent(NNLists& lists, const IurTree& tree) {
  const Entry self = lists.owner();
  const auto parent = tree.parent(self);
  lists.erase_if([&](const NNTuple& t) { return t.entry == self || (parent && t.entry == *parent); });
}

namespace {

std::optional<double> cumulative_walk(const std::vector<NNTuple>& view, int k, bool use_min) {
  std::size_t cum = 0;
  for (const auto& t : view) {
    cum += t.m;
    if (cum >= static_cast<std::size_t>(k)) return use_min ? t.min_sim : t.max_sim;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> knn_lower(const NNLists& lists, int k) {
  return cumulative_walk(lists.lower_view(), k, true);
}

bool is_complete(const NNLists& lists, std::size_t n) {
  if (n == 0) return false;
  if (lists.coverage() != n - 1) return false;
  std::size_t covered = lists.covered_objects();
  if (lists.owner_is_point()) {
    const bool owner_covered = std::any_of(lists.tuples().begin(), lists.tuples().end(),
                                           [](const NNTuple& t) { return t.overlaps_owner; });
    if (!owner_covered) ++covered;
  }
  return covered == n;
}

std::optional<double> knn_upper(const NNLists& lists, int k, std::size_t n) {
  if (!is_complete(lists, n)) return std::nullopt;
  if (lists.coverage() < static_cast<std::size_t>(k))
    return -std::numeric_limits<double>::infinity();
  return cumulative_walk(lists.upper_view(), k, false);
}

std::optional<double> knn_upper_ungated(const NNLists& lists, int k) {
  return cumulative_walk(lists.upper_view(), k, false);
}

const char* to_string(Decision d) {
  switch (d) {
    case Decision::Hit:
      return "hit";
    case Decision::Drop:
      return "drop";
    case Decision::Undecided:
      break;
  }
  return "undecided";
}

Decision decide(double min_st_q, double max_st_q, std::optional<double> lower,
                std::optional<double> upper) {
  if (lower && max_st_q <= *lower) return Decision::Drop;
  if (upper && min_st_q > *upper) return Decision::Hit;
  return Decision::Undecided;
}

HitOrDropProbe is_hit_or_drop(const QueryObject& q, const NNLists& lists, const BoundContext& ctx,
                              bool completeness_gate) {
  const GroupView e = ctx.tree.view(lists.owner());
  const GroupView qv = GroupView::of(q);
  HitOrDropProbe p;
  p.min_st_q = min_st(e, qv, ctx.params, ctx.stats);
  p.max_st_q = max_st(e, qv, ctx.params, ctx.stats);
  p.lower = knn_lower(lists, ctx.params.k);
  p.upper = completeness_gate ? knn_upper(lists, ctx.params.k, ctx.tree.size())
                              : knn_upper_ungated(lists, ctx.params.k);
  p.decision = decide(p.min_st_q, p.max_st_q, p.lower, p.upper);
  return p;
}

bool is_non_overlapping(const NNLists& lists, const IurTree& tree) {
  const auto ts = lists.tuples();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      if (tree.overlaps(ts[i].entry, ts[j].entry)) return false;
    }
  }
  return true;
}

}  // namespace rstknn
