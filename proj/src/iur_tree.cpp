#include "rstknn/iur_tree.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <functional>
#include <stdexcept>

#include "rstknn/errors.hpp"

namespace rstknn {

void Mbr::expand(const Mbr& other) {
  lo.x = std::min(lo.x, other.lo.x);
  lo.y = std::min(lo.y, other.lo.y);
  hi.x = std::max(hi.x, other.hi.x);
  hi.y = std::max(hi.y, other.hi.y);
}

bool Mbr::contains(const Point& p) const {
  return lo.x <= p.x && p.x <= hi.x && lo.y <= p.y && p.y <= hi.y;
}

double Mbr::diagonal() const { return euclidean_dist(lo, hi); }

double min_dist(const Mbr& a, const Mbr& b) {
  const double dx = std::max({0.0, a.lo.x - b.hi.x, b.lo.x - a.hi.x});
  const double dy = std::max({0.0, a.lo.y - b.hi.y, b.lo.y - a.hi.y});
  return std::sqrt(dx * dx + dy * dy);
}

double max_dist(const Mbr& a, const Mbr& b) {
  const double dx = std::max(std::abs(a.hi.x - b.lo.x), std::abs(b.hi.x - a.lo.x));
  const double dy = std::max(std::abs(a.hi.y - b.lo.y), std::abs(b.hi.y - a.lo.y));
  return std::sqrt(dx * dx + dy * dy);
}

double min_t(const GroupView& e, const GroupView& f) {
  if (e.union_vct->empty() && f.union_vct->empty()) return 0.0;
  const double num = dot(*e.int_vct, *f.int_vct);
  const double den = e.union_vct->norm2() + f.union_vct->norm2() - num;
  if (den <= 0.0) return 0.0;
  return std::clamp(num / den, 0.0, 1.0);
}

double max_t(const GroupView& e, const GroupView& f) {
  const double num = dot(*e.union_vct, *f.union_vct);
  const double den = e.int_vct->norm2() + f.int_vct->norm2() - num;
  if (den <= 0.0) return 1.0;
  return std::clamp(num / den, 0.0, 1.0);
}

double min_st(const GroupView& e, const GroupView& f, const SimParams& params,
              const NormStats& stats) {
  if (e.is_point && f.is_point)
    return sim_st(e.mbr.lo, *e.int_vct, f.mbr.lo, *f.int_vct, params, stats);
  return combine_similarity(max_dist(e.mbr, f.mbr), min_t(e, f), params, stats);
}

double max_st(const GroupView& e, const GroupView& f, const SimParams& params,
              const NormStats& stats) {
  if (e.is_point && f.is_point)
    return sim_st(e.mbr.lo, *e.int_vct, f.mbr.lo, *f.int_vct, params, stats);
  return combine_similarity(min_dist(e.mbr, f.mbr), max_t(e, f), params, stats);
}

// ---------------------------------------------------------------------------
// Layout parsing

namespace {

class LayoutParser {
 public:
  explicit LayoutParser(std::string_view text) : text_(text) {}

  Layout parse() {
    skip_space();
    Layout root = group();
    skip_space();
    if (pos_ != text_.size()) fail("trailing characters");
    return root;
  }

 private:
  Layout group() {
    expect('(');
    Layout out;
    for (;;) {
      skip_space();
      if (peek() == '(') {
        out.children.push_back(group());
      } else {
        out.object_ids.push_back(ident());
      }
      skip_space();
      if (peek() == ')') break;
      expect(',');
    }
    expect(')');
    if (out.children.empty() && out.object_ids.empty()) fail("empty group");
    if (!out.children.empty() && !out.object_ids.empty())
      fail("a group holds either objects or groups, not both");
    return out;
  }

  std::string ident() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delim(text_[pos_])) ++pos_;
    if (pos_ == start) fail("expected object id");
    return std::string(text_.substr(start, pos_ - start));
  }

  static bool is_delim(char c) {
    return c == '(' || c == ')' || c == ',' || std::isspace(static_cast<unsigned char>(c));
  }
  char peek() const {
    if (pos_ >= text_.size()) fail("unexpected end of layout");
    return text_[pos_];
  }
  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("layout: " + msg + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

Point center(const Mbr& m) { return {(m.lo.x + m.hi.x) / 2.0, (m.lo.y + m.hi.y) / 2.0}; }

// One Sort-Tile-Recursive pass: partitions items into groups of <= fanout.
std::vector<std::vector<std::uint32_t>> str_tile(std::vector<std::uint32_t> items,
                                                 const std::vector<Point>& centers,
                                                 std::size_t fanout) {
  const std::size_t n = items.size();
  const std::size_t leaves = (n + fanout - 1) / fanout;
  const auto slabs = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaves))));
  const std::size_t slab_size = slabs * fanout;

  auto by_x = [&](std::uint32_t a, std::uint32_t b) {
    const Point &pa = centers[a], &pb = centers[b];
    if (pa.x != pb.x) return pa.x < pb.x;
    if (pa.y != pb.y) return pa.y < pb.y;
    return a < b;
  };
  auto by_y = [&](std::uint32_t a, std::uint32_t b) {
    const Point &pa = centers[a], &pb = centers[b];
    if (pa.y != pb.y) return pa.y < pb.y;
    if (pa.x != pb.x) return pa.x < pb.x;
    return a < b;
  };

  std::sort(items.begin(), items.end(), by_x);
  std::vector<std::vector<std::uint32_t>> groups;
  for (std::size_t s = 0; s < n; s += slab_size) {
    auto first = items.begin() + static_cast<std::ptrdiff_t>(s);
    auto last = items.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + slab_size));
    std::sort(first, last, by_y);
    for (auto it = first; it < last; it += static_cast<std::ptrdiff_t>(
                                         std::min<std::size_t>(fanout, last - it))) {
      groups.emplace_back(it, it + static_cast<std::ptrdiff_t>(
                                       std::min<std::size_t>(fanout, last - it)));
    }
  }
  return groups;
}

}  // namespace

Layout Layout::parse(std::string_view text) { return LayoutParser(text).parse(); }

// ---------------------------------------------------------------------------
// IurTree

std::unordered_map<std::string, std::uint32_t> IurTree::index_ids(
    const std::vector<STObject>& objects) {
  if (objects.empty()) throw EmptyDataset("cannot build an index over zero objects");
  std::unordered_map<std::string, std::uint32_t> ids;
  for (std::uint32_t i = 0; i < objects.size(); ++i) {
    if (!ids.emplace(objects[i].id, i).second)
      throw std::invalid_argument("duplicate object id: " + objects[i].id);
  }
  return ids;
}

IurTree IurTree::build(std::vector<STObject> objects, int fanout) {
  if (fanout < 2) throw std::invalid_argument("fanout must be >= 2");
  index_ids(objects);
  const auto f = static_cast<std::size_t>(fanout);

  std::vector<Draft> drafts;
  std::vector<Mbr> draft_mbr;

  std::vector<Point> centers;
  std::vector<std::uint32_t> items;
  for (std::uint32_t i = 0; i < objects.size(); ++i) {
    centers.push_back(objects[i].loc);
    items.push_back(i);
  }
  for (auto& group : str_tile(items, centers, f)) {
    Mbr m = Mbr::of(objects[group.front()].loc);
    for (auto o : group) m.expand(Mbr::of(objects[o].loc));
    drafts.push_back({{}, std::move(group)});
    draft_mbr.push_back(m);
  }

  std::vector<std::uint32_t> level(drafts.size());
  for (std::uint32_t i = 0; i < level.size(); ++i) level[i] = i;
  while (level.size() > 1) {
    centers.assign(drafts.size(), Point{});
    for (auto d : level) centers[d] = center(draft_mbr[d]);
    std::vector<std::uint32_t> next;
    for (auto& group : str_tile(level, centers, f)) {
      Mbr m = draft_mbr[group.front()];
      for (auto c : group) m.expand(draft_mbr[c]);
      next.push_back(static_cast<std::uint32_t>(drafts.size()));
      drafts.push_back({std::move(group), {}});
      draft_mbr.push_back(m);
    }
    level = std::move(next);
  }
  return IurTree(std::move(objects), drafts, level.front());
}

IurTree IurTree::from_layout(std::vector<STObject> objects, const Layout& layout) {
  const auto ids = index_ids(objects);
  std::vector<Draft> drafts;
  std::vector<bool> seen(objects.size(), false);

  std::function<std::uint32_t(const Layout&)> add = [&](const Layout& g) -> std::uint32_t {
    Draft d;
    for (const auto& child : g.children) d.children.push_back(add(child));
    for (const auto& id : g.object_ids) {
      auto it = ids.find(id);
      if (it == ids.end()) throw std::invalid_argument("layout names unknown object: " + id);
      if (seen[it->second]) throw std::invalid_argument("layout repeats object: " + id);
      seen[it->second] = true;
      d.objects.push_back(it->second);
    }
    if (d.children.empty() && d.objects.empty())
      throw std::invalid_argument("layout contains an empty node");
    drafts.push_back(std::move(d));
    return static_cast<std::uint32_t>(drafts.size() - 1);
  };
  const std::uint32_t root = add(layout);
  for (std::uint32_t i = 0; i < objects.size(); ++i) {
    if (!seen[i]) throw std::invalid_argument("layout omits object: " + objects[i].id);
  }
  return IurTree(std::move(objects), drafts, root);
}

IurTree::IurTree(std::vector<STObject> objects, const std::vector<Draft>& drafts,
                 std::uint32_t root)
    : objects_(std::move(objects)), id_index_(index_ids(objects_)) {
  // Breadth-first renumbering.
  std::vector<std::uint32_t> order{root};
  std::vector<std::uint32_t> new_id(drafts.size(), 0);
  for (std::size_t head = 0; head < order.size(); ++head) {
    new_id[order[head]] = static_cast<std::uint32_t>(head);
    for (auto c : drafts[order[head]].children) order.push_back(c);
  }
  nodes_.resize(order.size());
  object_leaf_.assign(objects_.size(), 0);
  for (std::uint32_t id = 0; id < order.size(); ++id) {
    const Draft& d = drafts[order[id]];
    IurNode& n = nodes_[id];
    n.id = id;
    for (auto c : d.children) {
      n.children.push_back(new_id[c]);
      nodes_[new_id[c]].parent = id;
    }
    n.objects = d.objects;
    for (auto o : d.objects) object_leaf_[o] = id;
  }

  object_dfs_.assign(objects_.size(), 0);
  std::size_t cursor = 0;
  std::function<void(std::uint32_t, int)> walk = [&](std::uint32_t id, int depth) {
    IurNode& n = nodes_[id];
    n.depth = depth;
    n.dfs_begin = cursor;
    for (auto o : n.objects) object_dfs_[o] = cursor++;
    for (auto c : n.children) walk(c, depth + 1);
    n.dfs_end = cursor;
    finalize_node(id);
  };
  walk(0, 0);
}

void IurTree::finalize_node(std::uint32_t id) {
  IurNode& n = nodes_[id];
  bool first = true;
  auto absorb = [&](const Mbr& mbr, const TermVector& iv, const TermVector& uv,
                    std::size_t count) {
    if (first) {
      n.mbr = mbr;
      n.int_vct = iv;
      n.union_vct = uv;
      n.count = count;
      first = false;
    } else {
      n.mbr.expand(mbr);
      n.int_vct = TermVector::intersect(n.int_vct, iv);
      n.union_vct = TermVector::unite(n.union_vct, uv);
      n.count += count;
    }
  };
  for (auto o : n.objects) {
    const STObject& obj = objects_[o];
    absorb(Mbr::of(obj.loc), obj.vct, obj.vct, 1);
  }
  for (auto c : n.children) {
    const IurNode& child = nodes_[c];
    absorb(child.mbr, child.int_vct, child.union_vct, child.count);
  }
}

std::optional<std::uint32_t> IurTree::find_object(const std::string& id) const {
  auto it = id_index_.find(id);
  if (it == id_index_.end()) return std::nullopt;
  return it->second;
}

std::size_t IurTree::count(Entry e) const {
  return e.is_node() ? nodes_.at(e.index).count : 1;
}

GroupView IurTree::view(Entry e) const {
  if (e.is_object()) return GroupView::of(objects_.at(e.index));
  const IurNode& n = nodes_.at(e.index);
  return {n.mbr, &n.int_vct, &n.union_vct, n.count, false};
}

std::optional<Entry> IurTree::parent(Entry e) const {
  if (e.is_object()) return Entry::node(object_leaf_.at(e.index));
  const auto& p = nodes_.at(e.index).parent;
  if (!p) return std::nullopt;
  return Entry::node(*p);
}

std::vector<Entry> IurTree::children(Entry e) const {
  std::vector<Entry> out;
  if (e.is_object()) return out;
  const IurNode& n = nodes_.at(e.index);
  for (auto c : n.children) out.push_back(Entry::node(c));
  for (auto o : n.objects) out.push_back(Entry::object(o));
  return out;
}

int IurTree::depth(Entry e) const {
  if (e.is_object()) return nodes_.at(object_leaf_.at(e.index)).depth + 1;
  return nodes_.at(e.index).depth;
}

std::pair<std::size_t, std::size_t> IurTree::dfs_range(Entry e) const {
  if (e.is_object()) return {object_dfs_.at(e.index), object_dfs_.at(e.index) + 1};
  const IurNode& n = nodes_.at(e.index);
  return {n.dfs_begin, n.dfs_end};
}

bool IurTree::is_ancestor_or_equal(Entry ancestor, Entry e) const {
  if (ancestor == e) return true;
  if (ancestor.is_object()) return false;
  // Subtree ranges are nested or disjoint; depth separates single-child chains.
  const auto [ab, ae] = dfs_range(ancestor);
  const auto [eb, ee] = dfs_range(e);
  return ab <= eb && ee <= ae && depth(ancestor) < depth(e);
}

bool IurTree::is_proper_ancestor(Entry ancestor, Entry e) const {
  return ancestor != e && is_ancestor_or_equal(ancestor, e);
}

bool IurTree::overlaps(Entry a, Entry b) const {
  return is_ancestor_or_equal(a, b) || is_ancestor_or_equal(b, a);
}

std::vector<std::uint32_t> IurTree::subtree_objects(Entry e) const {
  std::vector<std::uint32_t> out;
  std::deque<Entry> todo{e};
  while (!todo.empty()) {
    Entry cur = todo.front();
    todo.pop_front();
    if (cur.is_object()) {
      out.push_back(cur.index);
    } else {
      for (auto c : children(cur)) todo.push_back(c);
    }
  }
  std::sort(out.begin(), out.end(), [&](std::uint32_t a, std::uint32_t b) {
    return objects_[a].id < objects_[b].id;
  });
  return out;
}

std::string IurTree::label(Entry e) const {
  if (e.is_object()) return objects_.at(e.index).id;
  return e.index == 0 ? "Root" : "N" + std::to_string(e.index);
}

}  // namespace rstknn
