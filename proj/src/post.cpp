#include "gpv/post.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "gpv/errors.hpp"

namespace gpv {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_pi(double a) {
  while (a > kPi) a -= 2.0 * kPi;
  while (a <= -kPi) a += 2.0 * kPi;
  return a;
}

}  // namespace

VortexReport detect_vortices(const TriMesh& m, const ComplexField& u,
                             double rho_min) {
  const int nt = m.num_triangles();
  const int nv = m.num_vertices();

  std::vector<double> phase(nv), density(nv);
  double peak = 0.0;
  for (int v = 0; v < nv; ++v) {
    phase[v] = u.phase(v);
    density[v] = u.density(v);
    peak = std::max(peak, density[v]);
  }

  VortexReport rep;
  rep.rho_min = rho_min;
  if (!(peak > 0.0)) return rep;

  // Per-triangle phase circulation.
  std::vector<int> winding(nt, 0);
  for (int t = 0; t < nt; ++t) {
    const auto& tr = m.triangles[t];
    double s = 0.0;
    for (int e = 0; e < 3; ++e)
      s += wrap_pi(phase[tr[(e + 1) % 3]] - phase[tr[e]]);
    if (std::abs(s) >= kPi)
      winding[t] = static_cast<int>(std::llround(s / (2.0 * kPi)));
  }

  // Cluster adjacent winding-carrying triangles.
  const auto adj = build_edge_adjacency(m);
  std::vector<std::vector<int>> tri_nbrs(nt);
  for (const auto& [key, pair] : adj) {
    if (pair[0] != -1 && pair[1] != -1) {
      tri_nbrs[pair[0]].push_back(pair[1]);
      tri_nbrs[pair[1]].push_back(pair[0]);
    }
  }
  std::vector<std::vector<int>> vert_tris(nv);
  for (int t = 0; t < nt; ++t)
    for (int k = 0; k < 3; ++k) vert_tris[m.triangles[t][k]].push_back(t);

  std::vector<std::uint8_t> seen(nt, 0);
  for (int t0 = 0; t0 < nt; ++t0) {
    if (winding[t0] == 0 || seen[t0]) continue;
    std::vector<int> cluster;
    std::queue<int> bfs;
    bfs.push(t0);
    seen[t0] = 1;
    while (!bfs.empty()) {
      const int t = bfs.front();
      bfs.pop();
      cluster.push_back(t);
      for (int nb : tri_nbrs[t]) {
        if (!seen[nb] && winding[nb] != 0) {
          seen[nb] = 1;
          bfs.push(nb);
        }
      }
    }

    int total = 0;
    int core_v = -1;
    double core_rho = std::numeric_limits<double>::max();
    for (int t : cluster) {
      total += winding[t];
      for (int k = 0; k < 3; ++k) {
        const int v = m.triangles[t][k];
        if (density[v] < core_rho) {
          core_rho = density[v];
          core_v = v;
        }
      }
    }
    if (total == 0) continue;
    if (core_rho >= rho_min * peak) continue;

    // Reject phase noise in near-vacuum regions: a genuine core is
    // surrounded by substantial density within a fixed physical radius
    // (a fraction of the domain size, so mesh resolution does not
    // matter).
    double nbhd_max = 0.0;
    {
      const double r_probe = 0.05 * m.domain_diameter();
      const double cx = m.vertices[core_v].x, cy = m.vertices[core_v].y;
      std::vector<int> ring{core_v};
      std::vector<std::uint8_t> seen_v(nv, 0);
      seen_v[core_v] = 1;
      while (!ring.empty()) {
        std::vector<int> next;
        for (int v : ring) {
          nbhd_max = std::max(nbhd_max, density[v]);
          if (std::hypot(m.vertices[v].x - cx, m.vertices[v].y - cy) >
              r_probe)
            continue;
          for (int t : vert_tris[v]) {
            for (int k = 0; k < 3; ++k) {
              const int w = m.triangles[t][k];
              if (!seen_v[w]) {
                seen_v[w] = 1;
                next.push_back(w);
              }
            }
          }
        }
        ring = std::move(next);
      }
    }
    if (nbhd_max <= rho_min * peak) continue;

    Vortex vx;
    vx.x = m.vertices[core_v].x;
    vx.y = m.vertices[core_v].y;
    vx.winding = total;
    vx.core_density = core_rho;
    rep.vortices.push_back(vx);
  }
  return rep;
}

int boundary_winding(const TriMesh& m, const ComplexField& u) {
  // Chain the boundary edges as directed in their owning triangles
  // (counterclockwise around the domain).
  const auto adj = build_edge_adjacency(m);
  std::unordered_map<int, int> next;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const auto& tr = m.triangles[t];
    for (int e = 0; e < 3; ++e) {
      const int a = tr[e], b = tr[(e + 1) % 3];
      if (adj.at(edge_key(a, b))[1] == -1) next[a] = b;
    }
  }
  if (next.empty()) throw MeshError("mesh has no boundary");
  const int start = next.begin()->first;
  double s = 0.0;
  int v = start;
  std::size_t steps = 0;
  do {
    const int w = next.at(v);
    s += wrap_pi(u.phase(w) - u.phase(v));
    v = w;
    if (++steps > next.size() + 1)
      throw MeshError("boundary contour is not a single loop");
  } while (v != start);
  return static_cast<int>(std::llround(s / (2.0 * kPi)));
}

void write_vtk(const TriMesh& m, const ComplexField& u,
               const std::string& path) {
  if (m.num_triangles() == 0)
    throw MeshError("refusing to write a mesh with no triangles");
  if (u.size() != m.num_vertices())
    throw MeshError("field size does not match mesh");
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os.precision(16);
  os << "# vtk DataFile Version 3.0\n";
  os << "gpvortex condensate state\n";
  os << "ASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << m.num_vertices() << " double\n";
  for (const auto& v : m.vertices) os << v.x << ' ' << v.y << " 0\n";
  os << "CELLS " << m.num_triangles() << ' ' << 4 * m.num_triangles()
     << '\n';
  for (const auto& tr : m.triangles)
    os << "3 " << tr[0] << ' ' << tr[1] << ' ' << tr[2] << '\n';
  os << "CELL_TYPES " << m.num_triangles() << '\n';
  for (int t = 0; t < m.num_triangles(); ++t) os << "5\n";
  os << "POINT_DATA " << m.num_vertices() << '\n';
  os << "SCALARS density double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < m.num_vertices(); ++v) os << u.density(v) << '\n';
  os << "SCALARS phase double 1\nLOOKUP_TABLE default\n";
  for (int v = 0; v < m.num_vertices(); ++v) os << u.phase(v) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

void write_trace(const SolverTrace& trace, const std::string& path) {
  {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.precision(17);
    os << "iter,energy,dE,Lz,norm,nv,event\n";
    for (const auto& r : trace.rows)
      os << r.iteration << ',' << r.energy << ',' << r.delta_e << ','
         << r.lz << ',' << r.norm << ',' << r.num_vertices << ','
         << r.event << '\n';
    if (!os) throw IoError("write failed: " + path);
  }
  std::ofstream gp(path + ".gp");
  if (!gp) throw IoError("cannot open for writing: " + path + ".gp");
  gp << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set logscale y\n"
     << "set xlabel 'iteration'\n"
     << "plot '" << path << "' using 1:2 with lines title 'energy', \\\n"
     << "     '" << path << "' using 1:(abs($3)) with lines title '|dE|', \\\n"
     << "     '" << path << "' using 1:4 with lines title 'Lz'\n";
}

SolverTrace read_trace(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open: " + path);
  SolverTrace trace;
  std::string line;
  if (!std::getline(is, line)) throw IoError("empty trace file: " + path);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    TraceRow r;
    char comma;
    ls >> r.iteration >> comma >> r.energy >> comma >> r.delta_e >> comma >>
        r.lz >> comma >> r.norm >> comma >> r.num_vertices >> comma;
    std::getline(ls, r.event);
    if (ls.fail()) throw IoError("malformed trace row: " + line);
    trace.rows.push_back(r);
  }
  return trace;
}

void write_vortex_json(const VortexReport& rep, const std::string& path) {
  nlohmann::json j;
  j["count"] = rep.count();
  j["total_winding"] = rep.total_winding();
  j["rho_min"] = rep.rho_min;
  j["vortices"] = nlohmann::json::array();
  for (const auto& v : rep.vortices)
    j["vortices"].push_back(
        {{"x", v.x}, {"y", v.y}, {"winding", v.winding}});
  std::ofstream os(path);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace gpv
