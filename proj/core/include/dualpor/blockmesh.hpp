#pragma once

// Boundary-layer graded grids on the matrix block (0, L)^d, L = 1 - delta,
// and the tensor-product finite-volume geometry used by the block solvers.
//
// Lengths are in block units: the block of the periodic cell has unit edge.

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace dualpor {

/// Parameters of the Bakhvalov mapping.
struct GradingParams {
  double kappa = 0.5;  ///< layer width sigma = min(L/4, kappa * sqrt(diffusion_scale))
  double q = 0.3;      ///< fraction of the half-interval parameter range spent in the layer
};

struct GradedGrid1D {
  std::vector<double> nodes;
  double length = 0.0;
  double layer_width = 0.0;       ///< sigma; 0 for a uniform grid
  double grading_strength = 0.0;  ///< q of the mapping; 0 for a uniform grid

  std::size_t cells() const { return nodes.empty() ? 0 : nodes.size() - 1; }
  double spacing(std::size_t i) const { return nodes[i + 1] - nodes[i]; }
  double center(std::size_t i) const { return 0.5 * (nodes[i] + nodes[i + 1]); }
  double min_spacing() const;
  double max_spacing() const;
};

/// Uniform grid of n cells on [0, length].
GradedGrid1D uniform_grid(std::size_t n_cells, double length);

/// Symmetric Bakhvalov grid on [0, 1 - delta].
///
/// `diffusion_scale` is a * T_ref in squared block units, the squared
/// penetration depth of the boundary layer over the reference horizon.
/// The layer map x = -sigma ln((q - t)/q) is followed by its tangent line
/// from the point where the tangent passes through the midpoint.
GradedGrid1D bakhvalov_grid(std::size_t n_cells, double delta, double diffusion_scale,
                            const GradingParams& grading = {});

/// Same mapping with an explicit layer width and length.
GradedGrid1D bakhvalov_grid_explicit(std::size_t n_cells, double length, double layer_width,
                                     double q);

enum class MeshSymmetry {
  Full,    ///< the whole cube
  Octant,  ///< [0, L/2]^d with mirror (no-flux) planes at L/2
};

/// Interior face between two cells. `transmissibility` is area / center distance.
struct Connection {
  std::size_t a = 0;
  std::size_t b = 0;
  double transmissibility = 0.0;
};

/// Face on the Dirichlet boundary of the block.
struct BoundaryFace {
  std::size_t cell = 0;       ///< adjacent cell
  std::size_t next_cell = 0;  ///< next cell inward along the face normal
  double area = 0.0;
  double distance = 0.0;       ///< face to center of `cell`
  double next_distance = 0.0;  ///< face to center of `next_cell`
  int axis = 0;
};

/// Tensor-product cell-centered mesh with lexicographic indexing
/// (axis 0 fastest).
class BlockMesh {
 public:
  /// Full mesh from per-axis grids; all axes must share one length.
  static BlockMesh tensor(const std::vector<GradedGrid1D>& axes);

  /// Tensor mesh of d copies of `axis`, optionally reduced by symmetry.
  /// Octant mode keeps the lower half of each axis (even cell count required).
  static BlockMesh cube(const GradedGrid1D& axis, int dimension,
                        MeshSymmetry symmetry = MeshSymmetry::Full);

  int dimension() const { return dimension_; }
  MeshSymmetry symmetry() const { return symmetry_; }
  std::size_t cell_count() const { return volumes_.size(); }
  const std::vector<GradedGrid1D>& axes() const { return axes_; }
  const std::vector<double>& volumes() const { return volumes_; }
  const std::vector<Connection>& connections() const { return connections_; }
  const std::vector<BoundaryFace>& boundary_faces() const { return boundary_faces_; }

  /// Volume of the discretized region.
  double mesh_volume() const { return mesh_volume_; }
  /// Volume of the full block L^d represented by the mesh.
  double block_volume() const { return block_volume_; }
  /// Edge length of the full block.
  double edge_length() const { return length_; }

 private:
  void build();

  int dimension_ = 0;
  MeshSymmetry symmetry_ = MeshSymmetry::Full;
  double length_ = 0.0;
  std::vector<GradedGrid1D> axes_;
  std::vector<double> volumes_;
  std::vector<Connection> connections_;
  std::vector<BoundaryFace> boundary_faces_;
  double mesh_volume_ = 0.0;
  double block_volume_ = 0.0;
};

/// Writes the per-axis node lists as plain text:
///   dimension <d>
///   symmetry <full|octant>
///   axis <i> <node count>
///   <one node coordinate per line>
void write_mesh_dump(std::ostream& os, const BlockMesh& mesh);
void write_mesh_dump(const std::string& path, const BlockMesh& mesh);

}  // namespace dualpor
