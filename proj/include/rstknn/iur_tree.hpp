#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "rstknn/core.hpp"

namespace rstknn {

struct Mbr {
  Point lo;
  Point hi;

  static Mbr of(const Point& p) { return {p, p}; }
  void expand(const Mbr& other);
  bool contains(const Point& p) const;
  double diagonal() const;

  friend bool operator==(const Mbr&, const Mbr&) = default;
};

/// Minimum L2 distance between any point of a and any point of b (0 on overlap).
double min_dist(const Mbr& a, const Mbr& b);
/// Maximum L2 distance between any point of a and any point of b.
double max_dist(const Mbr& a, const Mbr& b);

/// A traversal unit: an index node or a single database object.
/// Nodes order before objects; ties by index. This is the "entry id" order
/// used for every deterministic tie-break.
struct Entry {
  enum class Kind : std::uint8_t { Node = 0, Object = 1 };

  Kind kind = Kind::Node;
  std::uint32_t index = 0;

  static Entry node(std::uint32_t i) { return {Kind::Node, i}; }
  static Entry object(std::uint32_t i) { return {Kind::Object, i}; }
  bool is_node() const { return kind == Kind::Node; }
  bool is_object() const { return kind == Kind::Object; }

  friend auto operator<=>(const Entry&, const Entry&) = default;
};

/// Operand of the group bounds. An object (or the query) is a degenerate
/// group: point MBR, int = union = its vector, count 1.
struct GroupView {
  Mbr mbr;
  const TermVector* int_vct = nullptr;
  const TermVector* union_vct = nullptr;
  std::size_t count = 1;
  bool is_point = false;

  static GroupView point(const Point& loc, const TermVector& vct) {
    return {Mbr::of(loc), &vct, &vct, 1, true};
  }
  static GroupView of(const QueryObject& q) { return point(q.loc, q.vct); }
  static GroupView of(const STObject& o) { return point(o.loc, o.vct); }
};

/// Lower bound on EJ over all member pairs, clamped to [0, 1].
double min_t(const GroupView& e, const GroupView& f);
/// Upper bound on EJ over all member pairs, clamped to [0, 1]; 1 when the
/// denominator is not positive.
double max_t(const GroupView& e, const GroupView& f);

/// Lower bound on sim_st over member pairs (max_dist + min_t). For two
/// points this is exactly sim_st.
double min_st(const GroupView& e, const GroupView& f, const SimParams& params,
              const NormStats& stats);
/// Upper bound on sim_st over member pairs (min_dist + max_t).
double max_st(const GroupView& e, const GroupView& f, const SimParams& params,
              const NormStats& stats);

struct IurNode {
  std::uint32_t id = 0;
  Mbr mbr;
  TermVector int_vct;
  TermVector union_vct;
  std::size_t count = 0;
  std::vector<std::uint32_t> children;  // node ids, internal nodes only
  std::vector<std::uint32_t> objects;   // object indices, leaves only
  std::optional<std::uint32_t> parent;
  int depth = 0;
  // Half-open range of this subtree in depth-first object order.
  std::size_t dfs_begin = 0;
  std::size_t dfs_end = 0;

  bool is_leaf() const { return children.empty(); }
};

/// Nested node layout for building a tree with a fixed topology, e.g.
/// "((P0,P1),((P2,P3),(P4,P5)))". A group holds either object ids or groups.
struct Layout {
  std::vector<std::string> object_ids;
  std::vector<Layout> children;

  static Layout parse(std::string_view text);
};

/// Static R-tree over STObjects whose nodes carry intersection/union term
/// vectors and subtree object counts. Immutable after construction.
///
/// Node ids are assigned breadth-first from the root (root = 0), children in
/// stored order.
class IurTree {
 public:
  static constexpr int kDefaultFanout = 4;

  /// Sort-Tile-Recursive bulk load. Throws EmptyDataset on no objects and
  /// std::invalid_argument on duplicate ids or fanout < 2.
  static IurTree build(std::vector<STObject> objects, int fanout = kDefaultFanout);
  /// Tree with an explicit topology; every object must appear exactly once.
  static IurTree from_layout(std::vector<STObject> objects, const Layout& layout);

  const std::vector<STObject>& objects() const { return objects_; }
  const std::vector<IurNode>& nodes() const { return nodes_; }
  std::size_t size() const { return objects_.size(); }
  Entry root() const { return Entry::node(0); }
  const IurNode& node(std::uint32_t id) const { return nodes_.at(id); }
  const STObject& object(std::uint32_t index) const { return objects_.at(index); }
  std::optional<std::uint32_t> find_object(const std::string& id) const;

  std::size_t count(Entry e) const;
  GroupView view(Entry e) const;
  std::optional<Entry> parent(Entry e) const;
  std::vector<Entry> children(Entry e) const;
  int depth(Entry e) const;

  bool is_ancestor_or_equal(Entry ancestor, Entry e) const;
  bool is_proper_ancestor(Entry ancestor, Entry e) const;
  /// Ancestor-or-equal in either direction.
  bool overlaps(Entry a, Entry b) const;

  /// Object indices under the entry, ordered by object id.
  std::vector<std::uint32_t> subtree_objects(Entry e) const;
  /// "Root", "N<id>" for other nodes, the object id for objects.
  std::string label(Entry e) const;

  /// Total number of entries (nodes + objects) and a dense index over them.
  std::size_t entry_count() const { return nodes_.size() + objects_.size(); }
  std::size_t dense_index(Entry e) const {
    return e.is_node() ? e.index : nodes_.size() + e.index;
  }

 private:
  struct Draft {
    std::vector<std::uint32_t> children;
    std::vector<std::uint32_t> objects;
  };

  IurTree(std::vector<STObject> objects, const std::vector<Draft>& drafts, std::uint32_t root);
  static std::unordered_map<std::string, std::uint32_t> index_ids(
      const std::vector<STObject>& objects);

  void finalize_node(std::uint32_t id);
  std::pair<std::size_t, std::size_t> dfs_range(Entry e) const;

  std::vector<STObject> objects_;
  std::vector<IurNode> nodes_;
  std::vector<std::uint32_t> object_leaf_;
  std::vector<std::size_t> object_dfs_;
  std::unordered_map<std::string, std::uint32_t> id_index_;
};

}  // namespace rstknn
