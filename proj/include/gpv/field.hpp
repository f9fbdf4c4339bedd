#pragma once

#include <Eigen/Sparse>
#include <array>
#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include "gpv/mesh.hpp"
#include "gpv/params.hpp"

namespace gpv {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

/// Complex-valued P1 finite element field, stored as separate real and
/// imaginary nodal vectors.
struct ComplexField {
  Vec re;
  Vec im;

  ComplexField() = default;
  explicit ComplexField(int n) : re(Vec::Zero(n)), im(Vec::Zero(n)) {}

  int size() const { return static_cast<int>(re.size()); }
  double density(int v) const { return re[v] * re[v] + im[v] * im[v]; }
  double phase(int v) const { return std::atan2(im[v], re[v]); }
  std::complex<double> value(int v) const { return {re[v], im[v]}; }
};

/// Symmetric quadrature rule on the reference triangle, in barycentric
/// coordinates.  Weights sum to 1 (multiply by the triangle area).
struct TriQuad {
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
};

/// Rules exact for polynomials up to the given total degree.
const TriQuad& tri_quad_degree2();
const TriQuad& tri_quad_degree4();
const TriQuad& tri_quad_degree6();

/// Assembled P1 matrices for one (mesh, parameter) pair.  All the
/// solvers share this cache; it is rebuilt whenever the mesh changes.
struct Discretization {
  const TriMesh* mesh = nullptr;
  ModelParams params;

  SpMat M;     // mass matrix
  SpMat K;     // stiffness matrix, int grad phi_i . grad phi_j
  SpMat Ra;    // antisymmetric rotation matrix (R - R^T)/2 with
               // R_ij = int phi_i (y dx - x dy) phi_j
  SpMat P;     // int C_trap phi_i phi_j (bare trap)
  SpMat Peff;  // int C_trap^eff phi_i phi_j (covariant trap)
  SpMat W;     // int (1 + C_Omega^2 r^2) phi_i phi_j (H_A metric weight)

  // Per-triangle physical quadrature weights for the degree-4 rule
  // (area times reference weight), used by the quartic terms.
  std::vector<std::array<double, 6>> quad4_w;

  Discretization() = default;
  Discretization(const TriMesh& m, const ModelParams& p);
};

/// Vertex values sampled from a scalar function of position.
template <class F>
Vec sample_vertices(const TriMesh& m, F&& f) {
  Vec v(m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i)
    v[i] = f(m.vertices[i].x, m.vertices[i].y);
  return v;
}

/// L2 inner product int (x_h y_h) of two real nodal vectors.
double l2_inner(const SpMat& M, const Vec& x, const Vec& y);

/// L2 norm of the complex field, sqrt(int |u|^2).
double l2_norm(const SpMat& M, const ComplexField& u);

/// Scale u in place so its L2 norm is exactly 1; returns the previous
/// norm.  Throws NumericError on a vanishing field.
double normalize(const SpMat& M, ComplexField& u);

/// L2 norm computed by direct quadrature on the mesh, without an
/// assembled mass matrix (exact for P1 fields).
double l2_norm_quad(const TriMesh& m, const ComplexField& u);

/// In-place variant of normalize backed by l2_norm_quad.
double normalize_quad(const TriMesh& m, ComplexField& u);

/// int C_g |u|^4 style quartic terms, evaluated with the degree-4 rule
/// (exact for P1 fields).
double quartic_integral(const Discretization& d, const ComplexField& u);

/// Cubic vectors c_r, c_i with c_r[i] = int |u|^2 u_r phi_i and likewise
/// for the imaginary part (the gradient of the quartic term, up to a
/// factor).
void cubic_vectors(const Discretization& d, const ComplexField& u, Vec& cr,
                   Vec& ci);

/// Zero the field on flagged boundary vertices (homogeneous Dirichlet).
void apply_dirichlet(const TriMesh& m, ComplexField& u);

/// Interpolate a field from one mesh onto another.  Destination points
/// inside the source mesh use barycentric interpolation; points within
/// 1e-8 of the domain diameter outside are clamped; boundary vertices of
/// the destination evaluate at the nearest source boundary point.  Any
/// other exterior point throws MeshError.
ComplexField transfer_field(const TriMesh& src_mesh, const ComplexField& src,
                            const TriMesh& dst_mesh);

/// Plain-text solution serialization (GPV-SOL 1 format).
void write_field(const ComplexField& u, std::ostream& os);
ComplexField read_field(std::istream& is);
void save_field(const ComplexField& u, const std::string& path);
ComplexField load_field(const std::string& path);

}  // namespace gpv
