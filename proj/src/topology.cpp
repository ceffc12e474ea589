#include "landscape/topology.hpp"

#include <algorithm>
#include <numeric>

#include "landscape/error.hpp"

namespace landscape {

std::string adjacency_name(Adjacency a) { return a == Adjacency::kAxis ? "axis" : "full"; }

Adjacency parse_adjacency(const std::string& name) {
  if (name == "axis") return Adjacency::kAxis;
  if (name == "full") return Adjacency::kFull;
  throw UsageError("unknown adjacency '" + name + "' (expected axis or full)");
}

std::string node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::kMinimum:
      return "minimum";
    case NodeKind::kSaddle:
      return "saddle";
    case NodeKind::kRoot:
      return "root";
  }
  return "unknown";
}

GridComplex::GridComplex(std::vector<std::size_t> shape, Adjacency adjacency)
    : shape_(std::move(shape)), adjacency_(adjacency) {
  const std::size_t n = shape_.size();
  if (n == 0) throw UsageError("grid complex needs at least one axis");
  if (n > kMaxDims) throw UsageError("grids with more than 16 axes are not supported");
  for (std::size_t k : shape_) size_ *= k;

  std::vector<long> strides(n, 1);
  for (std::size_t d = n - 1; d-- > 0;) strides[d] = strides[d + 1] * static_cast<long>(shape_[d + 1]);

  if (adjacency_ == Adjacency::kAxis) {
    for (std::size_t d = 0; d < n; ++d) {
      for (long step : {-1L, 1L}) {
        std::vector<long> delta(n, 0);
        delta[d] = step;
        offsets_.push_back(delta);
        linear_.push_back(step * strides[d]);
      }
    }
  } else {
    std::size_t combos = 1;
    for (std::size_t d = 0; d < n; ++d) combos *= 3;
    for (std::size_t c = 0; c < combos; ++c) {
      std::vector<long> delta(n);
      std::size_t rest = c;
      long lin = 0;
      bool zero = true;
      for (std::size_t d = n; d-- > 0;) {
        delta[d] = static_cast<long>(rest % 3) - 1;
        rest /= 3;
        lin += delta[d] * strides[d];
        zero = zero && delta[d] == 0;
      }
      if (zero) continue;
      offsets_.push_back(std::move(delta));
      linear_.push_back(lin);
    }
  }
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> MergeTree::children(std::size_t node) const {
  std::vector<std::size_t> out;
  for (const auto& e : edges) {
    if (e.parent == node) out.push_back(e.child);
  }
  return out;
}

std::optional<std::size_t> MergeTree::parent(std::size_t node) const {
  for (const auto& e : edges) {
    if (e.child == node) return e.parent;
  }
  return std::nullopt;
}

std::size_t MergeTree::minimum_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.kind == NodeKind::kMinimum; }));
}

std::size_t Barcode::finite_count() const {
  return static_cast<std::size_t>(
      std::count_if(pairs.begin(), pairs.end(), [](const PersistencePair& p) { return !p.essential; }));
}

const PersistencePair& Barcode::essential() const {
  for (const auto& p : pairs) {
    if (p.essential) return p;
  }
  throw UsageError("barcode has no essential pair");
}

std::size_t StableManifolds::weight(std::size_t minimum) const {
  const auto it = sizes.find(minimum);
  return it == sizes.end() ? 0 : it->second;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return a;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return a;
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

std::vector<std::size_t> filtration_order(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return precedes(values, a, b); });
  return order;
}

void sort_edges(MergeTree& tree) {
  std::sort(tree.edges.begin(), tree.edges.end(),
            [](const TreeEdge& a, const TreeEdge& b) { return a.child < b.child; });
}

}  // namespace

MergeTreeResult build_merge_tree(const LandscapeGrid& grid, Adjacency adjacency) {
  const auto& values = grid.values();
  const std::size_t n = values.size();
  if (n == 0) throw UsageError("cannot build a merge tree of an empty grid");

  const GridComplex complex(grid.shape(), adjacency);
  const auto order = filtration_order(values);

  MergeTreeResult result;
  MergeTree& tree = result.tree;
  Barcode& barcode = result.barcode;
  tree.adjacency = adjacency;
  tree.grid_digest = grid.digest();
  barcode.grid_digest = tree.grid_digest;

  DisjointSets sets(n);
  std::vector<bool> seen(n, false);
  // Indexed by union-find representative.
  std::vector<std::size_t> oldest_minimum(n), head_node(n);
  std::vector<std::size_t> roots;

  auto add_node = [&](std::size_t index, NodeKind kind) {
    const std::size_t id = tree.nodes.size();
    tree.nodes.push_back(TreeNode{id, index, values[index], kind});
    return id;
  };

  for (std::size_t v : order) {
    roots.clear();
    complex.for_each_neighbor(v, [&](std::size_t u) {
      if (seen[u]) roots.push_back(sets.find(u));
    });
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    seen[v] = true;

    if (roots.empty()) {
      oldest_minimum[v] = v;
      head_node[v] = add_node(v, NodeKind::kMinimum);
      continue;
    }
    if (roots.size() == 1) {
      const std::size_t r = roots.front();
      const std::size_t keep_min = oldest_minimum[r], keep_head = head_node[r];
      const std::size_t joined = sets.unite(r, v);
      oldest_minimum[joined] = keep_min;
      head_node[joined] = keep_head;
      continue;
    }

    // Saddle: the component with the earliest minimum survives.
    std::sort(roots.begin(), roots.end(), [&](std::size_t a, std::size_t b) {
      return precedes(values, oldest_minimum[a], oldest_minimum[b]);
    });
    const std::size_t saddle = add_node(v, NodeKind::kSaddle);
    const std::size_t survivor = oldest_minimum[roots.front()];
    for (std::size_t i = 0; i < roots.size(); ++i) {
      const std::size_t r = roots[i];
      const std::size_t child = head_node[r];
      tree.edges.push_back(TreeEdge{saddle, child, std::abs(values[v] - tree.nodes[child].value)});
      if (i > 0) {
        const std::size_t m = oldest_minimum[r];
        barcode.pairs.push_back(PersistencePair{m, v, survivor, values[m], values[v], values[v] - values[m], false});
      }
    }
    std::size_t joined = v;
    for (std::size_t r : roots) joined = sets.unite(joined, r);
    oldest_minimum[joined] = survivor;
    head_node[joined] = saddle;
  }

  const std::size_t top = order.back();
  const std::size_t rep = sets.find(top);
  const std::size_t global_min = oldest_minimum[rep];
  tree.root = add_node(top, NodeKind::kRoot);
  const std::size_t last_head = head_node[rep];
  tree.edges.push_back(TreeEdge{tree.root, last_head, std::abs(values[top] - tree.nodes[last_head].value)});
  sort_edges(tree);

  barcode.pairs.push_back(PersistencePair{global_min, std::nullopt, global_min, values[global_min], grid.f_max(),
                                          grid.f_max() - values[global_min], true});
  return result;
}

StableManifolds stable_manifolds(const LandscapeGrid& grid, Adjacency adjacency) {
  const auto& values = grid.values();
  const std::size_t n = values.size();
  if (n == 0) throw UsageError("cannot compute stable manifolds of an empty grid");
  const GridComplex complex(grid.shape(), adjacency);

  // Descent targets precede their sources, so one pass in filtration order
  // resolves every path.
  StableManifolds out;
  out.grid_digest = grid.digest();
  out.assignment.assign(n, 0);
  for (std::size_t v : filtration_order(values)) {
    std::size_t best = v;
    complex.for_each_neighbor(v, [&](std::size_t u) {
      if (precedes(values, u, best)) best = u;
    });
    out.assignment[v] = (best == v) ? v : out.assignment[best];
  }
  for (std::size_t m : out.assignment) ++out.sizes[m];
  return out;
}

SimplifiedTopology simplify(const MergeTree& tree, const Barcode& barcode, const StableManifolds& manifolds,
                            double tau) {
  if (!(tau >= 0.0)) throw UsageError("simplification threshold must be >= 0");
  if (tree.grid_digest != barcode.grid_digest || barcode.grid_digest != manifolds.grid_digest) {
    throw UsageError("tree, barcode and stable manifolds come from different grids");
  }

  std::vector<const PersistencePair*> doomed;
  for (const auto& p : barcode.pairs) {
    if (!p.essential && p.persistence < tau) doomed.push_back(&p);
  }
  if (doomed.empty()) return SimplifiedTopology{tree, barcode, manifolds};
  std::sort(doomed.begin(), doomed.end(), [](const PersistencePair* a, const PersistencePair* b) {
    if (a->persistence != b->persistence) return a->persistence < b->persistence;
    if (a->death != b->death) return a->death < b->death;
    return *a->saddle < *b->saddle;
  });

  // Mutable tree view.
  const std::size_t count = tree.nodes.size();
  std::vector<std::optional<std::size_t>> parent(count);
  std::vector<std::vector<std::size_t>> kids(count);
  for (const auto& e : tree.edges) {
    parent[e.child] = e.parent;
    kids[e.parent].push_back(e.child);
  }
  std::vector<bool> alive(count, true);
  std::map<std::size_t, std::size_t> minimum_node;
  for (const auto& node : tree.nodes) {
    if (node.kind == NodeKind::kMinimum) minimum_node[node.grid_index] = node.id;
  }

  std::map<std::size_t, std::size_t> absorbed_by;
  for (const PersistencePair* p : doomed) {
    absorbed_by[p->minimum] = p->survivor;
    const std::size_t leaf = minimum_node.at(p->minimum);
    alive[leaf] = false;
    const std::size_t up = *parent[leaf];
    auto& siblings = kids[up];
    siblings.erase(std::find(siblings.begin(), siblings.end(), leaf));
    if (tree.nodes[up].kind == NodeKind::kSaddle && siblings.size() == 1) {
      // Splice the saddle out: its last child hangs from the saddle's parent.
      const std::size_t only = siblings.front();
      const std::size_t grand = *parent[up];
      alive[up] = false;
      auto& grand_kids = kids[grand];
      *std::find(grand_kids.begin(), grand_kids.end(), up) = only;
      parent[only] = grand;
      kids[up].clear();
    }
  }

  SimplifiedTopology out;
  out.tree.adjacency = tree.adjacency;
  out.tree.grid_digest = tree.grid_digest;
  std::vector<std::size_t> remap(count, 0);
  for (const auto& node : tree.nodes) {
    if (!alive[node.id]) continue;
    remap[node.id] = out.tree.nodes.size();
    TreeNode copy = node;
    copy.id = out.tree.nodes.size();
    out.tree.nodes.push_back(copy);
  }
  out.tree.root = remap[tree.root];
  for (const auto& node : tree.nodes) {
    if (!alive[node.id] || !parent[node.id]) continue;
    const std::size_t up = *parent[node.id];
    out.tree.edges.push_back(TreeEdge{remap[up], remap[node.id], std::abs(tree.nodes[up].value - node.value)});
  }
  sort_edges(out.tree);

  out.barcode.grid_digest = barcode.grid_digest;
  for (const auto& p : barcode.pairs) {
    if (!absorbed_by.count(p.minimum)) out.barcode.pairs.push_back(p);
  }

  // Survivors are strictly older, so every chain ends at a kept minimum.
  auto resolve = [&](std::size_t m) {
    auto it = absorbed_by.find(m);
    while (it != absorbed_by.end()) {
      m = it->second;
      it = absorbed_by.find(m);
    }
    return m;
  };
  out.manifolds.grid_digest = manifolds.grid_digest;
  out.manifolds.assignment = manifolds.assignment;
  for (auto& m : out.manifolds.assignment) m = resolve(m);
  for (std::size_t m : out.manifolds.assignment) ++out.manifolds.sizes[m];
  return out;
}

// ---------------------------------------------------------------------------

nlohmann::json tree_to_json(const MergeTree& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes) {
    nodes.push_back({{"id", n.id}, {"grid_index", n.grid_index}, {"value", n.value}, {"kind", node_kind_name(n.kind)}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : tree.edges) {
    edges.push_back({{"parent", e.parent}, {"child", e.child}, {"persistence", e.weight}});
  }
  return nlohmann::json{{"adjacency", adjacency_name(tree.adjacency)},
                        {"grid_digest", tree.grid_digest},
                        {"root", tree.root},
                        {"nodes", std::move(nodes)},
                        {"edges", std::move(edges)}};
}

nlohmann::json barcode_to_json(const Barcode& barcode) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : barcode.pairs) {
    nlohmann::json saddle = p.saddle ? nlohmann::json(*p.saddle) : nlohmann::json(nullptr);
    pairs.push_back({{"minimum", p.minimum},
                     {"saddle", std::move(saddle)},
                     {"survivor", p.survivor},
                     {"birth", p.birth},
                     {"death", p.death},
                     {"persistence", p.persistence},
                     {"essential", p.essential}});
  }
  return nlohmann::json{{"grid_digest", barcode.grid_digest}, {"pairs", std::move(pairs)}};
}

nlohmann::json manifolds_to_json(const StableManifolds& manifolds) {
  nlohmann::json sizes = nlohmann::json::array();
  for (const auto& [m, w] : manifolds.sizes) sizes.push_back({{"minimum", m}, {"size", w}});
  return nlohmann::json{
      {"grid_digest", manifolds.grid_digest}, {"assignment", manifolds.assignment}, {"sizes", std::move(sizes)}};
}

}  // namespace landscape
