#include "tve/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace tve {

namespace {

// Corner Jacobian determinants of the bilinear map; all four must be positive.
void check_element_orientation(const Mesh& mesh, int e) {
  static const double corners[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
  const auto& el = mesh.elements[e];
  for (const auto& c : corners) {
    const double xi = c[0], eta = c[1];
    const double dndxi[4] = {-(1 - eta) / 4, (1 - eta) / 4, (1 + eta) / 4, -(1 + eta) / 4};
    const double dndeta[4] = {-(1 - xi) / 4, -(1 + xi) / 4, (1 + xi) / 4, (1 - xi) / 4};
    Mat2 jac = Mat2::Zero();
    for (int a = 0; a < 4; ++a) {
      jac.col(0) += mesh.nodes[el[a]] * dndxi[a];
      jac.col(1) += mesh.nodes[el[a]] * dndeta[a];
    }
    if (!(jac.determinant() > 0.0))
      fail(ErrorCode::DegenerateElement, "element with nonpositive corner Jacobian");
  }
}

}  // namespace

Mesh gen_rectangle(double length, double height, int nx, int ny) {
  if (!(nx >= 1 && ny >= 1 && length > 0.0 && height > 0.0))
    fail(ErrorCode::InvalidDimensions, "gen_rectangle: need nx, ny >= 1 and positive size");
  Mesh mesh;
  auto node = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      mesh.nodes.push_back(Vec2(length * i / nx, height * j / ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      mesh.elements.push_back({node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)});

  const TagMask clamped = tag_mask(BoundaryTag::DirichletMech) | tag_mask(BoundaryTag::DirichletHeat);
  const TagMask traction = tag_mask(BoundaryTag::NeumannTraction);
  const TagMask free_edge = tag_mask(BoundaryTag::Free) | tag_mask(BoundaryTag::RobinHeat);
  for (int j = 0; j < ny; ++j) {
    mesh.boundary_edges.push_back({node(0, j), node(0, j + 1), clamped});
    mesh.boundary_edges.push_back({node(nx, j), node(nx, j + 1), traction});
  }
  for (int i = 0; i < nx; ++i) {
    mesh.boundary_edges.push_back({node(i, 0), node(i + 1, 0), free_edge});
    mesh.boundary_edges.push_back({node(i, ny), node(i + 1, ny), free_edge});
  }
  for (int e = 0; e < mesh.element_count(); ++e) check_element_orientation(mesh, e);
  return mesh;
}

Mesh gen_annulus(double r_in, double r_out, int n_radial, int n_circum) {
  if (!(r_in > 0.0 && r_out > r_in && n_radial >= 1 && n_circum >= 8))
    fail(ErrorCode::InvalidDimensions, "gen_annulus: need 0 < r_in < r_out, n_circum >= 8");
  Mesh mesh;
  auto node = [n_circum](int ring, int c) { return ring * n_circum + (c % n_circum); };
  for (int ring = 0; ring <= n_radial; ++ring) {
    const double r = r_in + (r_out - r_in) * ring / n_radial;
    for (int c = 0; c < n_circum; ++c) {
      const double phi = 2.0 * M_PI * c / n_circum;
      mesh.nodes.push_back(Vec2(r * std::cos(phi), r * std::sin(phi)));
    }
  }
  for (int ring = 0; ring < n_radial; ++ring)
    for (int c = 0; c < n_circum; ++c)
      mesh.elements.push_back(
          {node(ring, c), node(ring + 1, c), node(ring + 1, c + 1), node(ring, c + 1)});

  const TagMask inner = tag_mask(BoundaryTag::DirichletMech) | tag_mask(BoundaryTag::DirichletHeat);
  const TagMask outer = tag_mask(BoundaryTag::DirichletMech) | tag_mask(BoundaryTag::RobinHeat);
  for (int c = 0; c < n_circum; ++c) {
    mesh.boundary_edges.push_back({node(0, c), node(0, c + 1), inner});
    mesh.boundary_edges.push_back({node(n_radial, c), node(n_radial, c + 1), outer});
  }
  mesh.marker_nodes.push_back(node(n_radial, 0));
  for (int e = 0; e < mesh.element_count(); ++e) check_element_orientation(mesh, e);
  return mesh;
}

std::vector<int> boundary_nodes(const Mesh& mesh, BoundaryTag tag) {
  std::set<int> found;
  bool tag_seen = false;
  for (const auto& edge : mesh.boundary_edges) {
    if (has_tag(edge.tags, tag)) {
      tag_seen = true;
      found.insert(edge.n0);
      found.insert(edge.n1);
    }
  }
  if (!tag_seen) fail(ErrorCode::UnknownTag, "boundary_nodes: tag not present on this mesh");
  return std::vector<int>(found.begin(), found.end());
}

void retag_boundary(Mesh& mesh, const std::function<TagMask(const Vec2&, TagMask)>& fn) {
  for (auto& edge : mesh.boundary_edges) {
    const Vec2 mid = 0.5 * (mesh.nodes[edge.n0] + mesh.nodes[edge.n1]);
    edge.tags = fn(mid, edge.tags);
  }
}

}  // namespace tve
