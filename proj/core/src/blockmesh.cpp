#include "dualpor/blockmesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "dualpor/errors.hpp"

namespace dualpor {

double GradedGrid1D::min_spacing() const {
  double h = length;
  for (std::size_t i = 0; i < cells(); ++i) h = std::min(h, spacing(i));
  return h;
}

double GradedGrid1D::max_spacing() const {
  double h = 0.0;
  for (std::size_t i = 0; i < cells(); ++i) h = std::max(h, spacing(i));
  return h;
}

GradedGrid1D uniform_grid(std::size_t n_cells, double length) {
  if (n_cells == 0) throw ParameterError("grid needs at least one cell");
  if (!(length > 0.0)) throw ParameterError("grid length must be positive");
  GradedGrid1D g;
  g.length = length;
  g.nodes.resize(n_cells + 1);
  for (std::size_t i = 0; i <= n_cells; ++i) {
    g.nodes[i] = length * static_cast<double>(i) / static_cast<double>(n_cells);
  }
  // mirrored assignment keeps the grid exactly symmetric
  for (std::size_t i = 0; i <= n_cells / 2; ++i) g.nodes[n_cells - i] = length - g.nodes[i];
  g.nodes.front() = 0.0;
  g.nodes.back() = length;
  return g;
}

GradedGrid1D bakhvalov_grid_explicit(std::size_t n_cells, double length, double layer_width,
                                     double q) {
  if (n_cells < 2 || n_cells % 2 != 0) {
    throw ParameterError("graded grid needs an even number of cells");
  }
  if (!(length > 0.0)) throw ParameterError("grid length must be positive");
  if (layer_width < 0.0 || q < 0.0 || q >= 0.5) {
    throw ParameterError("layer width must be >= 0 and q in [0, 0.5)");
  }
  if (layer_width == 0.0 || q == 0.0 || layer_width / q >= length) {
    return uniform_grid(n_cells, length);
  }

  const double c = layer_width;
  const double half = 0.5 * length;
  auto layer = [&](double t) { return t > 0.0 ? -c * std::log((q - t) / q) : 0.0; };

  double tau = 0.0;
  bool converged = false;
  for (int it = 0; it < 500; ++it) {
    const double next = q - c * (0.5 - tau) / (half - layer(tau));
    if (!(next >= 0.0 && next < q)) break;
    if (std::abs(next - tau) <= 1e-15 * q) {
      tau = next;
      converged = true;
      break;
    }
    tau = next;
  }
  if (!converged) throw ParameterError("graded grid: tangent point iteration failed");

  const double x_tau = layer(tau);
  const double slope = c / (q - tau);

  GradedGrid1D g;
  g.length = length;
  g.layer_width = layer_width;
  g.grading_strength = q;
  g.nodes.assign(n_cells + 1, 0.0);
  const std::size_t mid = n_cells / 2;
  for (std::size_t i = 0; i < mid; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n_cells);
    const double x = t <= tau ? layer(t) : x_tau + slope * (t - tau);
    g.nodes[i] = x;
    g.nodes[n_cells - i] = length - x;
  }
  g.nodes[mid] = half;
  for (std::size_t i = 0; i < n_cells; ++i) {
    if (!(g.nodes[i + 1] > g.nodes[i])) {
      throw ParameterError("graded grid: layer parameters give non-monotone nodes");
    }
  }
  return g;
}

GradedGrid1D bakhvalov_grid(std::size_t n_cells, double delta, double diffusion_scale,
                            const GradingParams& grading) {
  if (n_cells < 8 || n_cells % 2 != 0) {
    throw ParameterError("graded grid needs an even cell count >= 8");
  }
  if (!(delta > 0.0 && delta < 0.5)) throw ParameterError("delta must lie in (0, 0.5)");
  if (diffusion_scale < 0.0 || grading.kappa < 0.0) {
    throw ParameterError("diffusion scale and kappa must be non-negative");
  }
  const double length = 1.0 - delta;
  const double sigma = std::min(0.25 * length, grading.kappa * std::sqrt(diffusion_scale));
  return bakhvalov_grid_explicit(n_cells, length, sigma, grading.q);
}

BlockMesh BlockMesh::tensor(const std::vector<GradedGrid1D>& axes) {
  if (axes.empty() || axes.size() > 3) throw ParameterError("block mesh dimension must be 1..3");
  for (const auto& a : axes) {
    if (a.cells() < 2) throw ParameterError("block mesh axes need at least two cells");
    if (a.length != axes.front().length) {
      throw ParameterError("block mesh axes must share one edge length");
    }
  }
  BlockMesh m;
  m.dimension_ = static_cast<int>(axes.size());
  m.symmetry_ = MeshSymmetry::Full;
  m.length_ = axes.front().length;
  m.axes_ = axes;
  m.build();
  return m;
}

BlockMesh BlockMesh::cube(const GradedGrid1D& axis, int dimension, MeshSymmetry symmetry) {
  if (dimension < 1 || dimension > 3) throw ParameterError("block mesh dimension must be 1..3");
  if (symmetry == MeshSymmetry::Full) {
    return tensor(std::vector<GradedGrid1D>(static_cast<std::size_t>(dimension), axis));
  }
  const std::size_t n = axis.cells();
  if (n < 4 || n % 2 != 0) throw ParameterError("octant mesh needs an even cell count >= 4");
  GradedGrid1D half = axis;
  half.nodes.resize(n / 2 + 1);
  BlockMesh m;
  m.dimension_ = dimension;
  m.symmetry_ = MeshSymmetry::Octant;
  m.length_ = axis.length;
  m.axes_.assign(static_cast<std::size_t>(dimension), half);
  m.build();
  return m;
}

void BlockMesh::build() {
  const std::size_t d = axes_.size();
  std::size_t n[3] = {1, 1, 1};
  for (std::size_t a = 0; a < d; ++a) n[a] = axes_[a].cells();
  const std::size_t total = n[0] * n[1] * n[2];
  auto index = [&](std::size_t i, std::size_t j, std::size_t k) {
    return i + n[0] * (j + n[1] * k);
  };

  auto width = [&](std::size_t axis, std::size_t i) { return axes_[axis].spacing(i); };
  auto ext = [&](std::size_t axis, std::size_t i) { return axis < d ? width(axis, i) : 1.0; };

  volumes_.assign(total, 0.0);
  connections_.clear();
  boundary_faces_.clear();

  const bool octant = symmetry_ == MeshSymmetry::Octant;

  for (std::size_t k = 0; k < n[2]; ++k) {
    for (std::size_t j = 0; j < n[1]; ++j) {
      for (std::size_t i = 0; i < n[0]; ++i) {
        const std::size_t c = index(i, j, k);
        const std::size_t ijk[3] = {i, j, k};
        volumes_[c] = ext(0, i) * ext(1, j) * ext(2, k);
        for (std::size_t a = 0; a < d; ++a) {
          double area = 1.0;
          for (std::size_t b = 0; b < d; ++b) {
            if (b != a) area *= width(b, ijk[b]);
          }
          const auto& g = axes_[a];
          const std::size_t p = ijk[a];
          std::size_t up[3] = {i, j, k};
          std::size_t down[3] = {i, j, k};
          if (p + 1 < n[a]) {
            up[a] = p + 1;
            Connection conn;
            conn.a = c;
            conn.b = index(up[0], up[1], up[2]);
            conn.transmissibility = area / (g.center(p + 1) - g.center(p));
            connections_.push_back(conn);
          }
          if (p == 0) {
            up[a] = 1;
            BoundaryFace f;
            f.cell = c;
            f.next_cell = index(up[0], up[1], up[2]);
            f.area = area;
            f.distance = g.center(0) - g.nodes.front();
            f.next_distance = g.center(1) - g.nodes.front();
            f.axis = static_cast<int>(a);
            boundary_faces_.push_back(f);
          }
          if (!octant && p + 1 == n[a]) {
            down[a] = p - 1;
            BoundaryFace f;
            f.cell = c;
            f.next_cell = index(down[0], down[1], down[2]);
            f.area = area;
            f.distance = g.nodes.back() - g.center(p);
            f.next_distance = g.nodes.back() - g.center(p - 1);
            f.axis = static_cast<int>(a);
            boundary_faces_.push_back(f);
          }
        }
      }
    }
  }

  mesh_volume_ = 1.0;
  for (std::size_t a = 0; a < d; ++a) mesh_volume_ *= axes_[a].nodes.back() - axes_[a].nodes.front();
  block_volume_ = std::pow(length_, static_cast<double>(d));
}

void write_mesh_dump(std::ostream& os, const BlockMesh& mesh) {
  os << "dimension " << mesh.dimension() << '\n';
  os << "symmetry " << (mesh.symmetry() == MeshSymmetry::Full ? "full" : "octant") << '\n';
  os.precision(17);
  for (std::size_t a = 0; a < mesh.axes().size(); ++a) {
    const auto& nodes = mesh.axes()[a].nodes;
    os << "axis " << a << ' ' << nodes.size() << '\n';
    for (double x : nodes) os << x << '\n';
  }
}

void write_mesh_dump(const std::string& path, const BlockMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw RunError("cannot open mesh dump file " + path);
  write_mesh_dump(out, mesh);
}

}  // namespace dualpor
