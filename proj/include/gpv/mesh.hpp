#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace gpv {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Conforming triangular mesh of an elliptical domain.  Triangles are
/// stored counterclockwise with the newest-vertex-bisection convention:
/// the refinement edge is (v[0], v[1]) and the peak (newest vertex) is
/// v[2].  Immutable after construction; refinement produces a new mesh.
struct TriMesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::uint8_t> boundary_vertex;
  // Analytic domain the boundary tracks (semi-axes); refinement snaps new
  // boundary vertices back onto this ellipse.
  double ellipse_rx = 0.0;
  double ellipse_ry = 0.0;
  int generation = 0;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double triangle_diameter(int t) const;  // longest edge
  double total_area() const;
  double domain_diameter() const;
};

/// Key for an undirected edge.
inline std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

/// edge -> adjacent triangle indices (1 for boundary, 2 for interior).
using EdgeAdjacency =
    std::unordered_map<std::uint64_t, std::array<int, 2>>;

EdgeAdjacency build_edge_adjacency(const TriMesh& m);

/// Audit: positive areas, conformity (every edge in <= 2 triangles,
/// interior edges in exactly 2), boundary flags consistent with edge
/// adjacency.  Throws MeshError on violation.
void audit_mesh(const TriMesh& m);

/// Minimum interior angle over all triangles, in radians.
double min_angle(const TriMesh& m);

/// Triangulation of the ellipse with semi-axes (inflation*rx, inflation*ry)
/// built from concentric elliptical rings; the boundary polygon has nbseg
/// vertices.
TriMesh make_ellipse_mesh(double rx, double ry, int nbseg,
                          double inflation = 1.0);

/// Newest-vertex bisection of the marked triangles plus conforming
/// closure.  New boundary vertices are projected onto the analytic
/// ellipse.
TriMesh bisect_refine(const TriMesh& m, const std::vector<int>& marked);

/// Refine every triangle once (plus closure).
TriMesh uniform_refine(const TriMesh& m);

/// Locates query points in a mesh (uniform background grid over triangle
/// bounding boxes).
class PointLocator {
public:
  explicit PointLocator(const TriMesh& m);

  struct Hit {
    int triangle = -1;
    std::array<double, 3> bary{};  // clamped to the triangle
    double outside_distance = 0.0; // 0 when inside
  };

  /// Finds the triangle containing p, or the nearest triangle with the
  /// clamped barycentric coordinates of the closest point.
  Hit locate(const Vec2& p) const;

private:
  const TriMesh& mesh_;
  double cell_ = 0.0;
  double x0_ = 0.0, y0_ = 0.0;
  int nx_ = 0, ny_ = 0;
  std::vector<std::vector<int>> cells_;
};

/// 1D radial grid 0 = r_0 < r_1 < ... < r_M = r_max.
struct RadialMesh1D {
  std::vector<double> nodes;
};

RadialMesh1D make_radial_mesh(double r_max, int n);

/// Plain-text mesh serialization (GPV-MESH 1 format).
void save_mesh(const TriMesh& m, const std::string& path);
TriMesh load_mesh(const std::string& path);
void write_mesh(const TriMesh& m, std::ostream& os);
TriMesh read_mesh(std::istream& is);

}  // namespace gpv
