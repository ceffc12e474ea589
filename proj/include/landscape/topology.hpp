#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "landscape/sampler.hpp"

namespace landscape {

// axis: 2n face neighbours. full: all 3^n - 1 neighbours. No wraparound.
enum class Adjacency { kAxis, kFull };

std::string adjacency_name(Adjacency a);
Adjacency parse_adjacency(const std::string& name);

// Neighbour relation on the grid's index space.
class GridComplex {
 public:
  GridComplex(std::vector<std::size_t> shape, Adjacency adjacency);

  std::size_t size() const { return size_; }
  Adjacency adjacency() const { return adjacency_; }

  static constexpr std::size_t kMaxDims = 16;

  template <class Fn>
  void for_each_neighbor(std::size_t index, Fn&& fn) const {
    long coords[kMaxDims];
    std::size_t rest = index;
    for (std::size_t d = shape_.size(); d-- > 0;) {
      coords[d] = static_cast<long>(rest % shape_[d]);
      rest /= shape_[d];
    }
    for (std::size_t k = 0; k < offsets_.size(); ++k) {
      const long* delta = offsets_[k].data();
      bool inside = true;
      for (std::size_t d = 0; d < shape_.size(); ++d) {
        const long c = coords[d] + delta[d];
        if (c < 0 || c >= static_cast<long>(shape_[d])) {
          inside = false;
          break;
        }
      }
      if (inside) fn(static_cast<std::size_t>(static_cast<long>(index) + linear_[k]));
    }
  }

 private:
  std::vector<std::size_t> shape_;
  Adjacency adjacency_;
  std::size_t size_ = 1;
  std::vector<std::vector<long>> offsets_;
  std::vector<long> linear_;
};

enum class NodeKind { kMinimum, kSaddle, kRoot };

struct TreeNode {
  std::size_t id = 0;
  std::size_t grid_index = 0;
  double value = 0.0;
  NodeKind kind = NodeKind::kMinimum;
};

struct TreeEdge {
  std::size_t parent = 0;
  std::size_t child = 0;
  double weight = 0.0;  // |f(parent) - f(child)|
};

// Join tree of the sublevel filtration. Leaves are minima, interior nodes are
// saddles with at least two children, and a single root sits at f_max.
// Edges are sorted by child id.
struct MergeTree {
  std::vector<TreeNode> nodes;
  std::vector<TreeEdge> edges;
  std::size_t root = 0;
  Adjacency adjacency = Adjacency::kAxis;
  std::string grid_digest;

  std::vector<std::size_t> children(std::size_t node) const;
  std::optional<std::size_t> parent(std::size_t node) const;
  std::size_t minimum_count() const;
};

// Minima and saddles are identified by their grid linear index.
struct PersistencePair {
  std::size_t minimum = 0;
  std::optional<std::size_t> saddle;  // absent for the essential pair
  std::size_t survivor = 0;            // minimum of the component that absorbed this one
  double birth = 0.0;
  double death = 0.0;
  double persistence = 0.0;
  bool essential = false;
};

// One pair per minimum. Finite pairs appear in death order, the essential
// pair (death = f_max) last.
struct Barcode {
  std::vector<PersistencePair> pairs;
  std::string grid_digest;

  std::size_t finite_count() const;
  const PersistencePair& essential() const;
};

// Discrete steepest-descent basins: every grid index mapped to the minimum it
// flows to. `sizes` is keyed by minimum grid index and sums to N.
struct StableManifolds {
  std::vector<std::size_t> assignment;
  std::map<std::size_t, std::size_t> sizes;
  std::string grid_digest;

  std::size_t weight(std::size_t minimum) const;
};

struct MergeTreeResult {
  MergeTree tree;
  Barcode barcode;
};

struct SimplifiedTopology {
  MergeTree tree;
  Barcode barcode;
  StableManifolds manifolds;
};

// True when a comes before b in the filtration: by value, ties by index.
inline bool precedes(const std::vector<double>& values, std::size_t a, std::size_t b) {
  return values[a] < values[b] || (values[a] == values[b] && a < b);
}

// Union-find over the grid in ascending (value, index) order. A vertex with no
// earlier neighbour is a minimum; a vertex joining two or more components is
// a saddle where the younger components die (elder rule).
MergeTreeResult build_merge_tree(const LandscapeGrid& grid, Adjacency adjacency = Adjacency::kAxis);

// Each point repeatedly steps to its earliest neighbour (value, then index)
// until no neighbour precedes it.
StableManifolds stable_manifolds(const LandscapeGrid& grid, Adjacency adjacency = Adjacency::kAxis);

// Cancels every finite pair with persistence < tau, in ascending persistence
// (ties by saddle order). Cancelled branches are spliced out of the tree and
// their basins handed to the absorbing minimum. tau = 0 is the identity.
SimplifiedTopology simplify(const MergeTree& tree, const Barcode& barcode, const StableManifolds& manifolds, double tau);

nlohmann::json tree_to_json(const MergeTree& tree);
nlohmann::json barcode_to_json(const Barcode& barcode);
nlohmann::json manifolds_to_json(const StableManifolds& manifolds);

std::string node_kind_name(NodeKind k);

}  // namespace landscape
