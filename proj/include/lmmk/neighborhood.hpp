#pragma once

#include <vector>

#include "lmmk/compute.hpp"
#include "lmmk/matrix.hpp"

namespace lmmk {

struct NeighborhoodSpec {
  int k = 3;  // targets and impostors per anchor
  /// Give anchors of one-member classes an empty target list instead of
  /// throwing SingletonClass. Training never sets this.
  bool allow_singletons = false;
};

struct Triple {
  Index anchor;
  Index target;
  Index impostor;

  friend bool operator==(const Triple&, const Triple&) = default;
};

/// Targets and impostors per anchor, and the (anchor, target, impostor)
/// triples formed by their cross product in anchor-major order.
struct TripleSet {
  std::vector<NeighborList> targets;
  std::vector<NeighborList> impostors;
  std::vector<Triple> triples;

  std::size_t n_anchors() const noexcept { return targets.size(); }
};

/// Sample count per class id; index 0 unused.
std::vector<Index> class_sizes(const Labels& labels);

/// The k nearest same-label samples of every anchor, ties by ascending
/// index. Throws SingletonClass when a class has exactly one member (unless
/// spec.allow_singletons); a class with fewer than k+1 members yields all
/// its other members (with a warning).
std::vector<NeighborList> select_targets(const Matrix& distances, const Labels& labels,
                                         const NeighborhoodSpec& spec);

/// The k nearest differently-labeled samples of every anchor. Throws
/// SingleClassDataset when only one class is present.
std::vector<NeighborList> select_impostors(const Matrix& distances, const Labels& labels,
                                           const NeighborhoodSpec& spec);

TripleSet build_triples(std::vector<NeighborList> targets, std::vector<NeighborList> impostors);

/// select_targets + select_impostors + build_triples.
TripleSet make_triples(const Matrix& distances, const Labels& labels, const NeighborhoodSpec& spec);

}  // namespace lmmk
