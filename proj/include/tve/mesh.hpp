#pragma once

#include <array>
#include <functional>
#include <vector>

#include "tve/tensor.hpp"

namespace tve {

enum class BoundaryTag : unsigned {
  DirichletMech = 1u << 0,
  NeumannTraction = 1u << 1,
  RobinHeat = 1u << 2,
  DirichletHeat = 1u << 3,
  Free = 1u << 4,
};

using TagMask = unsigned;

inline TagMask tag_mask(BoundaryTag t) { return static_cast<TagMask>(t); }
inline bool has_tag(TagMask mask, BoundaryTag t) { return (mask & tag_mask(t)) != 0; }

struct BoundaryEdge {
  int n0 = -1;
  int n1 = -1;
  TagMask tags = 0;
};

struct Mesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 4>> elements;  // counter-clockwise
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<int> marker_nodes;  // flagged for visualization output only

  int node_count() const { return int(nodes.size()); }
  int element_count() const { return int(elements.size()); }
  int dof_count() const { return 2 * node_count(); }
};

// Structured grid on [0,length]x[0,height]; left edge DirichletMech+DirichletHeat,
// right edge NeumannTraction, top/bottom Free (zero-kappa Robin).
Mesh gen_rectangle(double length, double height, int nx, int ny);

// Structured polar grid, closed circumferentially; inner ring
// DirichletMech+DirichletHeat, outer ring DirichletMech+RobinHeat.
Mesh gen_annulus(double r_in, double r_out, int n_radial, int n_circum);

// Sorted, deduplicated node indices on edges carrying the tag.
std::vector<int> boundary_nodes(const Mesh& mesh, BoundaryTag tag);

// Reassign edge tags from the edge midpoint in reference coordinates.
void retag_boundary(Mesh& mesh, const std::function<TagMask(const Vec2& mid, TagMask old)>& fn);

}  // namespace tve
