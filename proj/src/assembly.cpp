#include "lcefem/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "lcefem/kernels.hpp"

namespace lce {

// ---------------------------------------------------------------- DofLayout

DofLayout::DofLayout(const FeSpace& u, const FeSpace& n, const FeSpace& p,
                     const FeSpace& lambda) {
  const FeSpace* spaces[4] = {&u, &n, &p, &lambda};
  int off = 0;
  for (int f = 0; f < 4; ++f) {
    offset_[f] = off;
    size_[f] = static_cast<int>(spaces[f]->num_dofs());
    off += size_[f];
  }
  std::vector<char> fixed(static_cast<std::size_t>(off), 0);
  const TagSet dirichlet =
      bit(BoundaryTag::SymX) | bit(BoundaryTag::SymY) | bit(BoundaryTag::Clamp);
  const TagSet fixes_ux = bit(BoundaryTag::SymX) | bit(BoundaryTag::Clamp);
  const TagSet fixes_uy = bit(BoundaryTag::SymY) | bit(BoundaryTag::Clamp);

  for (std::size_t k = 0; k < u.num_nodes(); ++k) {
    const TagSet t = u.node_tags()[k];
    const int node = static_cast<int>(k);
    if (t & fixes_ux) fixed[offset_[0] + u.dof(node, 0)] = 1;
    if (t & fixes_uy) fixed[offset_[0] + u.dof(node, 1)] = 1;
  }
  for (std::size_t k = 0; k < n.num_nodes(); ++k) {
    if (!(n.node_tags()[k] & dirichlet)) continue;
    const int node = static_cast<int>(k);
    fixed[offset_[1] + n.dof(node, 0)] = 1;
    fixed[offset_[1] + n.dof(node, 1)] = 1;
    fixed[offset_[3] + node] = 1;
  }

  free_index_.assign(fixed.size(), -1);
  for (int f = 0; f < 4; ++f) {
    free_offset_[f] = static_cast<int>(free_.size());
    for (int i = offset_[f]; i < offset_[f] + size_[f]; ++i) {
      if (fixed[i]) continue;
      free_index_[i] = static_cast<int>(free_.size());
      free_.push_back(i);
    }
    free_size_[f] = static_cast<int>(free_.size()) - free_offset_[f];
  }
}

std::vector<int> DofLayout::free_local(Field f) const {
  std::vector<int> out;
  out.reserve(free_size(f));
  for (int k = 0; k < free_size(f); ++k) out.push_back(free_[free_offset(f) + k] - offset(f));
  return out;
}

Vector DofLayout::pack(const FieldState& s) const {
  Vector out(total());
  out << s.u, s.n, s.p, s.lambda;
  return out;
}

void DofLayout::unpack(const Vector& full, FieldState& s) const {
  if (full.size() != total()) throw std::invalid_argument("DofLayout::unpack: length mismatch");
  s.u = full.segment(offset(Field::U), size(Field::U));
  s.n = full.segment(offset(Field::N), size(Field::N));
  s.p = full.segment(offset(Field::P), size(Field::P));
  s.lambda = full.segment(offset(Field::Lambda), size(Field::Lambda));
}

Vector DofLayout::restrict_to_free(const Vector& full) const {
  if (full.size() != total()) {
    throw std::invalid_argument("DofLayout::restrict_to_free: length mismatch");
  }
  Vector out(num_free());
  for (int i = 0; i < num_free(); ++i) out[i] = full[free_[i]];
  return out;
}

void DofLayout::add_free(const Vector& delta, FieldState& s) const {
  if (delta.size() != num_free()) throw std::invalid_argument("DofLayout::add_free: length mismatch");
  Vector* blocks[4] = {&s.u, &s.n, &s.p, &s.lambda};
  for (int i = 0; i < num_free(); ++i) {
    const int g = free_[i];
    int f = 3;
    while (g < offset_[f]) --f;
    (*blocks[f])[g - offset_[f]] += delta[i];
  }
}

// ------------------------------------------------------------------- Spaces

namespace {

SparseMatrix p1_mass_matrix(const FeSpace& p1) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(p1.num_elements() * 9);
  for (std::size_t e = 0; e < p1.num_elements(); ++e) {
    const int el = static_cast<int>(e);
    const double area = p1.geometry(el).area;
    const auto nodes = p1.element_nodes(el);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        trip.emplace_back(nodes[i], nodes[j], area / 12.0 * (i == j ? 2.0 : 1.0));
      }
    }
  }
  const int n = static_cast<int>(p1.num_nodes());
  SparseMatrix m(n, n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

Spaces::Spaces(std::shared_ptr<const Mesh> m)
    : mesh(std::move(m)),
      u(mesh, 2, 2),
      n(mesh, 1, 2),
      p(mesh, 1, 1),
      lambda(mesh, 1, 1),
      dofs(u, n, p, lambda),
      p1_mass(p1_mass_matrix(p)) {}

std::shared_ptr<const Spaces> make_spaces(const MeshParams& mesh_params) {
  auto mesh = std::make_shared<const Mesh>(build_uniform_mesh(mesh_params));
  return std::make_shared<const Spaces>(mesh);
}

FieldState zero_state(const Spaces& spaces) {
  FieldState s;
  s.u = Vector::Zero(static_cast<Eigen::Index>(spaces.u.num_dofs()));
  s.n = Vector::Zero(static_cast<Eigen::Index>(spaces.n.num_dofs()));
  s.p = Vector::Zero(static_cast<Eigen::Index>(spaces.p.num_dofs()));
  s.lambda = Vector::Zero(static_cast<Eigen::Index>(spaces.lambda.num_dofs()));
  return s;
}

void check_state(const FieldState& s, const Spaces& spaces) {
  if (static_cast<std::size_t>(s.u.size()) != spaces.u.num_dofs() ||
      static_cast<std::size_t>(s.n.size()) != spaces.n.num_dofs() ||
      static_cast<std::size_t>(s.p.size()) != spaces.p.num_dofs() ||
      static_cast<std::size_t>(s.lambda.size()) != spaces.lambda.num_dofs()) {
    throw std::invalid_argument("state coefficient lengths do not match the spaces");
  }
}

// --------------------------------------------------------- element kernels

namespace {

using Grad = std::array<double, 2>;

// Reference shape values at the quadrature points of a rule.
struct ShapeTable {
  std::vector<std::array<double, 6>> p2;
  std::vector<std::array<double, 3>> p1;

  explicit ShapeTable(const TriangleRule& rule) {
    for (const auto& b : rule.points) {
      p2.push_back(p2_shape(b));
      p1.push_back(p1_shape(b));
    }
  }
};

// Fields and shape gradients at one quadrature point of one element.
struct PointEval {
  std::array<Grad, 6> du{};  // P2 gradients
  std::array<Grad, 3> dn{};  // P1 gradients (constant per element)
  double F[2][2]{};
  double n[2]{};
  double gn[2][2]{};  // grad n
  double p = 0.0;
  double u[2]{};
};

class ElementEvaluator {
 public:
  ElementEvaluator(const Spaces& sp, const FieldState& s, const TriangleRule& rule)
      : sp_(sp), s_(s), rule_(rule), table_(rule) {}

  const TriangleRule& rule() const { return rule_; }
  const ShapeTable& table() const { return table_; }

  void eval(int e, std::size_t q, PointEval& pe) const {
    const auto& geo = sp_.u.geometry(e);
    const auto& b = rule_.points[q];
    shape_gradients(2, geo, b, pe.du);
    shape_gradients(1, geo, b, pe.dn);
    const auto un = sp_.u.element_nodes(e);
    const auto nn = sp_.n.element_nodes(e);
    const auto& phi2 = table_.p2[q];
    const auto& phi1 = table_.p1[q];
    for (int c = 0; c < 2; ++c) {
      double g0 = 0.0, g1 = 0.0, v = 0.0;
      for (int k = 0; k < 6; ++k) {
        const double cf = s_.u[sp_.u.dof(un[k], c)];
        g0 += cf * pe.du[k][0];
        g1 += cf * pe.du[k][1];
        v += cf * phi2[k];
      }
      pe.F[c][0] = (c == 0 ? 1.0 : 0.0) + g0;
      pe.F[c][1] = (c == 1 ? 1.0 : 0.0) + g1;
      pe.u[c] = v;
      double nv = 0.0, n0 = 0.0, n1 = 0.0;
      for (int k = 0; k < 3; ++k) {
        const double cf = s_.n[sp_.n.dof(nn[k], c)];
        nv += cf * phi1[k];
        n0 += cf * pe.dn[k][0];
        n1 += cf * pe.dn[k][1];
      }
      pe.n[c] = nv;
      pe.gn[c][0] = n0;
      pe.gn[c][1] = n1;
    }
    double pv = 0.0;
    for (int k = 0; k < 3; ++k) pv += s_.p[nn[k]] * phi1[k];
    pe.p = pv;
  }

 private:
  const Spaces& sp_;
  const FieldState& s_;
  const TriangleRule& rule_;
  ShapeTable table_;
};

// Gathers F, n, p at every quadrature point into SoA buffers.
kernels::PointData gather_points(const Spaces& sp, const ElementEvaluator& ev) {
  const std::size_t nq = ev.rule().size();
  const std::size_t ne = sp.u.num_elements();
  kernels::PointData pts;
  pts.resize(ne * nq);
  PointEval pe;
  for (std::size_t e = 0; e < ne; ++e) {
    for (std::size_t q = 0; q < nq; ++q) {
      ev.eval(static_cast<int>(e), q, pe);
      const std::size_t i = e * nq + q;
      pts.f11[i] = pe.F[0][0];
      pts.f12[i] = pe.F[0][1];
      pts.f21[i] = pe.F[1][0];
      pts.f22[i] = pe.F[1][1];
      pts.n1[i] = pe.n[0];
      pts.n2[i] = pe.n[1];
      pts.p[i] = pe.p;
    }
  }
  return pts;
}

// P2 node indices and 1D quadrature along a Free-edge (Y = 1) boundary edge.
struct FreeEdge {
  std::array<int, 3> u_nodes;  // end, end, midpoint
  double length;
};

std::vector<FreeEdge> free_edges(const Spaces& sp) {
  const Mesh& mesh = *sp.mesh;
  const int vrow = mesh.cells_per_side() + 1;
  const int row = 2 * mesh.cells_per_side() + 1;
  std::vector<FreeEdge> out;
  for (const auto& be : mesh.boundary_edges()) {
    if (be.tag != BoundaryTag::Free) continue;
    const int a = be.vertices[0], b = be.vertices[1];
    const int ai = 2 * (a % vrow), aj = 2 * (a / vrow);
    const int bi = 2 * (b % vrow), bj = 2 * (b / vrow);
    const Point& pa = mesh.vertices()[a];
    const Point& pb = mesh.vertices()[b];
    out.push_back({{aj * row + ai, bj * row + bi, ((aj + bj) / 2) * row + (ai + bi) / 2},
                   std::hypot(pb.x - pa.x, pb.y - pa.y)});
  }
  return out;
}

std::array<double, 3> p2_edge_shape(double s) {
  return {(1.0 - s) * (1.0 - 2.0 * s), s * (2.0 * s - 1.0), 4.0 * s * (1.0 - s)};
}

bool has_load(const std::array<double, 2>& v) { return v[0] != 0.0 || v[1] != 0.0; }

}  // namespace

// ----------------------------------------------------------------- residual

Vector assemble_full_residual(const FieldState& s, const MaterialParams& params,
                              const Spaces& sp, const TriangleRule& rule) {
  check_state(s, sp);
  const DofLayout& L = sp.dofs;
  const int ou = L.offset(Field::U), on = L.offset(Field::N), op = L.offset(Field::P),
            ol = L.offset(Field::Lambda);
  const double a = params.a, b = params.b;
  Vector R = Vector::Zero(L.total());

  const ElementEvaluator ev(sp, s, rule);
  const kernels::PointData pts = gather_points(sp, ev);
  const std::size_t np = pts.size();
  std::vector<double> s11(np), s12(np), s21(np), s22(np), dm1(np), g1(np), g2(np);
  const auto batch = pts.batch();
  kernels::piola(batch, a, {s11.data(), s12.data(), s21.data(), s22.data()});
  kernels::det_minus_one(batch, dm1.data());
  kernels::director_force(batch, a, g1.data(), g2.data());

  const std::size_t nq = rule.size();
  const auto& table = ev.table();
  std::array<Grad, 6> du;
  std::array<Grad, 3> dn;
  for (std::size_t e = 0; e < sp.u.num_elements(); ++e) {
    const int el = static_cast<int>(e);
    const auto& geo = sp.u.geometry(el);
    const auto un = sp.u.element_nodes(el);
    const auto nn = sp.n.element_nodes(el);
    shape_gradients(1, geo, rule.points[0], dn);
    double gn[2][2] = {};
    for (int c = 0; c < 2; ++c) {
      for (int k = 0; k < 3; ++k) {
        const double cf = s.n[sp.n.dof(nn[k], c)];
        gn[c][0] += cf * dn[k][0];
        gn[c][1] += cf * dn[k][1];
      }
    }
    for (std::size_t q = 0; q < nq; ++q) {
      const std::size_t i = e * nq + q;
      const double wq = geo.area * rule.weights[q];
      shape_gradients(2, geo, rule.points[q], du);
      const double sig[2][2] = {{s11[i], s12[i]}, {s21[i], s22[i]}};
      const auto& phi2 = table.p2[q];
      const auto& phi1 = table.p1[q];
      for (int k = 0; k < 6; ++k) {
        for (int c = 0; c < 2; ++c) {
          double v = sig[c][0] * du[k][0] + sig[c][1] * du[k][1];
          v -= params.f[c] * phi2[k];
          R[ou + sp.u.dof(un[k], c)] += wq * v;
        }
      }
      const double g[2] = {g1[i], g2[i]};
      for (int k = 0; k < 3; ++k) {
        for (int c = 0; c < 2; ++c) {
          const double v =
              g[c] * phi1[k] + 2.0 * b * (gn[c][0] * dn[k][0] + gn[c][1] * dn[k][1]);
          R[on + sp.n.dof(nn[k], c)] += wq * v;
        }
        R[op + nn[k]] -= wq * dm1[i] * phi1[k];
      }
    }
  }

  if (has_load(params.g)) {
    const LineRule line = gauss_legendre_unit(3);
    for (const FreeEdge& fe : free_edges(sp)) {
      for (std::size_t q = 0; q < line.points.size(); ++q) {
        const auto N = p2_edge_shape(line.points[q]);
        for (int k = 0; k < 3; ++k) {
          for (int c = 0; c < 2; ++c) {
            R[ou + sp.u.dof(fe.u_nodes[k], c)] -= fe.length * line.weights[q] * params.g[c] * N[k];
          }
        }
      }
    }
  }

  // Nodal-interpolation terms through the P1 mass matrix.
  const int nnodes = static_cast<int>(sp.n.num_nodes());
  const Vector mlam = sp.p1_mass * s.lambda;
  Vector w(nnodes);
  for (int k = 0; k < nnodes; ++k) {
    const double x = s.n[sp.n.dof(k, 0)], y = s.n[sp.n.dof(k, 1)];
    w[k] = x * x + y * y - 1.0;
    R[on + sp.n.dof(k, 0)] += 2.0 * mlam[k] * x;
    R[on + sp.n.dof(k, 1)] += 2.0 * mlam[k] * y;
  }
  R.segment(ol, nnodes) = sp.p1_mass * w;
  return R;
}

Vector assemble_residual(const FieldState& s, const MaterialParams& params, const Spaces& sp,
                         const TriangleRule& rule) {
  return sp.dofs.restrict_to_free(assemble_full_residual(s, params, sp, rule));
}

// ----------------------------------------------------------------- jacobian

SparseMatrix assemble_full_jacobian(const FieldState& s, const MaterialParams& params,
                                    const Spaces& sp, const TriangleRule& rule) {
  check_state(s, sp);
  const DofLayout& L = sp.dofs;
  const int ou = L.offset(Field::U), on = L.offset(Field::N), op = L.offset(Field::P),
            ol = L.offset(Field::Lambda);
  const double k1 = 2.0 * (1.0 - params.a), b = params.b;
  const ElementEvaluator ev(sp, s, rule);
  const auto& table = ev.table();
  const std::size_t nq = rule.size();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(sp.u.num_elements() * (12 * 12 + 2 * 12 * 6 + 6 * 6 + 2 * 12 * 3) +
               static_cast<std::size_t>(sp.p1_mass.nonZeros()) * 4 + sp.n.num_dofs());

  PointEval pe;
  for (std::size_t e = 0; e < sp.u.num_elements(); ++e) {
    const int el = static_cast<int>(e);
    const double area = sp.u.geometry(el).area;
    const auto un = sp.u.element_nodes(el);
    const auto nn = sp.n.element_nodes(el);
    int ug[12], ng[6], pg[3];
    for (int c = 0; c < 2; ++c) {
      for (int k = 0; k < 6; ++k) ug[6 * c + k] = ou + sp.u.dof(un[k], c);
      for (int k = 0; k < 3; ++k) ng[3 * c + k] = on + sp.n.dof(nn[k], c);
    }
    for (int k = 0; k < 3; ++k) pg[k] = op + nn[k];

    double kuu[12][12] = {}, kun[12][6] = {}, knn[6][6] = {}, kup[12][3] = {};
    for (std::size_t q = 0; q < nq; ++q) {
      ev.eval(el, q, pe);
      const double wq = area * rule.weights[q];
      const auto& phi1 = table.p1[q];
      const double(&F)[2][2] = pe.F;
      const double* n = pe.n;
      const double cof[2][2] = {{F[1][1], -F[1][0]}, {-F[0][1], F[0][0]}};

      // Test gradients for u (index 6c+k): G = e_c (x) du_k.
      // G^T n = n_c du_k ; F^T m for m = e_c phi_k: phi_k F_{c,:}.
      for (int I = 0; I < 12; ++I) {
        const int ci = I / 6, ki = I % 6;
        const Grad& gi = pe.du[ki];
        const double gtn_i[2] = {n[ci] * gi[0], n[ci] * gi[1]};
        for (int J = 0; J < 12; ++J) {
          const int cj = J / 6, kj = J % 6;
          const Grad& gj = pe.du[kj];
          double v = 0.0;
          if (ci == cj) v += 2.0 * (gi[0] * gj[0] + gi[1] * gj[1]);
          v -= k1 * n[cj] * (gtn_i[0] * gj[0] + gtn_i[1] * gj[1]);
          // -p d2det[H, G], H = e_cj (x) gj, G = e_ci (x) gi
          double H[2][2] = {}, G[2][2] = {};
          H[cj][0] = gj[0];
          H[cj][1] = gj[1];
          G[ci][0] = gi[0];
          G[ci][1] = gi[1];
          const double d2 = H[0][0] * G[1][1] + H[1][1] * G[0][0] - H[0][1] * G[1][0] -
                            H[1][0] * G[0][1];
          v -= pe.p * d2;
          kuu[I][J] += wq * v;
        }
        // u-n coupling: -k1 [ (G^T m).(F^T n) + (G^T n).(F^T m) ], m = e_c phi_k
        const double ftn[2] = {F[0][0] * n[0] + F[1][0] * n[1], F[0][1] * n[0] + F[1][1] * n[1]};
        for (int J = 0; J < 6; ++J) {
          const int cj = J / 3, kj = J % 3;
          const double ph = table.p1[q][kj];
          // G^T m = (m_ci) gi = [cj == ci] ph gi
          double v = 0.0;
          if (cj == ci) v += ph * (gi[0] * ftn[0] + gi[1] * ftn[1]);
          // F^T m = ph F_{cj,:}
          v += ph * (gtn_i[0] * F[cj][0] + gtn_i[1] * F[cj][1]);
          kun[I][J] -= wq * k1 * v;
        }
        // u-p coupling: -q cof(F) : G
        const double cg = cof[ci][0] * gi[0] + cof[ci][1] * gi[1];
        for (int k = 0; k < 3; ++k) kup[I][k] -= wq * phi1[k] * cg;
      }
      for (int I = 0; I < 6; ++I) {
        const int ci = I / 3, ki = I % 3;
        for (int J = 0; J < 6; ++J) {
          const int cj = J / 3, kj = J % 3;
          // -k1 (F^T l).(F^T m) + 2b grad l : grad m
          double v = -k1 * phi1[ki] * phi1[kj] * (F[ci][0] * F[cj][0] + F[ci][1] * F[cj][1]);
          if (ci == cj) v += 2.0 * b * (pe.dn[ki][0] * pe.dn[kj][0] + pe.dn[ki][1] * pe.dn[kj][1]);
          knn[I][J] += wq * v;
        }
      }
    }
    for (int I = 0; I < 12; ++I) {
      for (int J = 0; J < 12; ++J) trip.emplace_back(ug[I], ug[J], kuu[I][J]);
      for (int J = 0; J < 6; ++J) {
        trip.emplace_back(ug[I], ng[J], kun[I][J]);
        trip.emplace_back(ng[J], ug[I], kun[I][J]);
      }
      for (int k = 0; k < 3; ++k) {
        trip.emplace_back(ug[I], pg[k], kup[I][k]);
        trip.emplace_back(pg[k], ug[I], kup[I][k]);
      }
    }
    for (int I = 0; I < 6; ++I) {
      for (int J = 0; J < 6; ++J) trip.emplace_back(ng[I], ng[J], knn[I][J]);
    }
  }

  const Vector mlam = sp.p1_mass * s.lambda;
  for (int k = 0; k < static_cast<int>(sp.n.num_nodes()); ++k) {
    for (int c = 0; c < 2; ++c) {
      const int r = on + sp.n.dof(k, c);
      trip.emplace_back(r, r, 2.0 * mlam[k]);
    }
  }
  for (int k = 0; k < sp.p1_mass.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(sp.p1_mass, k); it; ++it) {
      const int j = static_cast<int>(it.row());
      for (int c = 0; c < 2; ++c) {
        const int r = on + sp.n.dof(k, c);
        const double v = 2.0 * it.value() * s.n[sp.n.dof(k, c)];
        trip.emplace_back(r, ol + j, v);
        trip.emplace_back(ol + j, r, v);
      }
    }
  }

  SparseMatrix K(L.total(), L.total());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

SparseMatrix select(const SparseMatrix& m, const std::vector<int>& rows,
                    const std::vector<int>& cols) {
  std::vector<int> rmap(static_cast<std::size_t>(m.rows()), -1);
  for (std::size_t i = 0; i < rows.size(); ++i) rmap[rows[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t jc = 0; jc < cols.size(); ++jc) {
    for (SparseMatrix::InnerIterator it(m, cols[jc]); it; ++it) {
      const int r = rmap[it.row()];
      if (r >= 0) trip.emplace_back(r, static_cast<int>(jc), it.value());
    }
  }
  SparseMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

SparseMatrix assemble_jacobian(const FieldState& s, const MaterialParams& params,
                               const Spaces& sp, const TriangleRule& rule) {
  const auto& free = sp.dofs.free_dofs();
  return select(assemble_full_jacobian(s, params, sp, rule), free, free);
}

// ------------------------------------------------------------------ energies

double lagrangian(const FieldState& s, const MaterialParams& params, const Spaces& sp,
                  const TriangleRule& rule) {
  check_state(s, sp);
  const ElementEvaluator ev(sp, s, rule);
  const kernels::PointData pts = gather_points(sp, ev);
  const std::size_t np = pts.size();
  std::vector<double> w(np), dm1(np);
  kernels::btw_density(pts.batch(), params.a, w.data());
  kernels::det_minus_one(pts.batch(), dm1.data());

  const std::size_t nq = rule.size();
  double total = 0.0;
  PointEval pe;
  for (std::size_t e = 0; e < sp.u.num_elements(); ++e) {
    const int el = static_cast<int>(e);
    const double area = sp.u.geometry(el).area;
    double local = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      ev.eval(el, q, pe);
      const std::size_t i = e * nq + q;
      double gn2 = 0.0;
      for (int c = 0; c < 2; ++c) gn2 += pe.gn[c][0] * pe.gn[c][0] + pe.gn[c][1] * pe.gn[c][1];
      double v = w[i] + params.b * gn2 - pts.p[i] * dm1[i];
      v -= params.f[0] * pe.u[0] + params.f[1] * pe.u[1];
      local += rule.weights[q] * v;
    }
    total += area * local;
  }
  if (has_load(params.g)) {
    const LineRule line = gauss_legendre_unit(3);
    for (const FreeEdge& fe : free_edges(sp)) {
      for (std::size_t q = 0; q < line.points.size(); ++q) {
        const auto N = p2_edge_shape(line.points[q]);
        for (int k = 0; k < 3; ++k) {
          for (int c = 0; c < 2; ++c) {
            total -= fe.length * line.weights[q] * params.g[c] * N[k] *
                     s.u[sp.u.dof(fe.u_nodes[k], c)];
          }
        }
      }
    }
  }
  const int nnodes = static_cast<int>(sp.n.num_nodes());
  Vector wn(nnodes);
  for (int k = 0; k < nnodes; ++k) {
    const double x = s.n[sp.n.dof(k, 0)], y = s.n[sp.n.dof(k, 1)];
    wn[k] = x * x + y * y - 1.0;
  }
  total += s.lambda.dot(sp.p1_mass * wn);
  return total;
}

double stored_energy(const FieldState& s, const MaterialParams& params, const Spaces& sp) {
  check_state(s, sp);
  const TriangleRule& rule = triangle_rule_degree5();
  const ElementEvaluator ev(sp, s, rule);
  const kernels::PointData pts = gather_points(sp, ev);
  std::vector<double> w(pts.size());
  kernels::btw_density(pts.batch(), params.a, w.data());
  const std::size_t nq = rule.size();
  double total = 0.0;
  PointEval pe;
  for (std::size_t e = 0; e < sp.u.num_elements(); ++e) {
    const int el = static_cast<int>(e);
    double local = 0.0;
    for (std::size_t q = 0; q < nq; ++q) {
      ev.eval(el, q, pe);
      double gn2 = 0.0;
      for (int c = 0; c < 2; ++c) gn2 += pe.gn[c][0] * pe.gn[c][0] + pe.gn[c][1] * pe.gn[c][1];
      local += rule.weights[q] * (w[e * nq + q] + params.b * gn2);
    }
    total += sp.u.geometry(el).area * local;
  }
  return total;
}

std::vector<double> nodal_btw_density(const FieldState& s, const MaterialParams& params,
                                      const Spaces& sp) {
  check_state(s, sp);
  const std::size_t nn = sp.n.num_nodes();
  std::vector<double> sum(nn, 0.0), count(nn, 0.0);
  for (std::size_t e = 0; e < sp.u.num_elements(); ++e) {
    const int el = static_cast<int>(e);
    const auto nodes = sp.n.element_nodes(el);
    for (int k = 0; k < 3; ++k) {
      std::array<double, 3> bary{0.0, 0.0, 0.0};
      bary[k] = 1.0;
      const FieldValue fu = evaluate(sp.u, s.u, el, bary);
      Mat2 F;
      F << 1.0 + fu.grad[0][0], fu.grad[0][1], fu.grad[1][0], 1.0 + fu.grad[1][1];
      Vec2 n(s.n[sp.n.dof(nodes[k], 0)], s.n[sp.n.dof(nodes[k], 1)]);
      const double len = n.norm();
      if (len == 0.0) continue;
      sum[nodes[k]] += btw_energy(F, n / len, params.a);
      count[nodes[k]] += 1.0;
    }
  }
  for (std::size_t k = 0; k < nn; ++k) sum[k] = count[k] > 0 ? sum[k] / count[k] : 0.0;
  return sum;
}

double max_piola_stress(const FieldState& s, const MaterialParams& params, const Spaces& sp) {
  check_state(s, sp);
  const ElementEvaluator ev(sp, s, triangle_rule_degree5());
  const kernels::PointData pts = gather_points(sp, ev);
  const std::size_t np = pts.size();
  std::vector<double> s11(np), s12(np), s21(np), s22(np);
  kernels::piola(pts.batch(), params.a, {s11.data(), s12.data(), s21.data(), s22.data()});
  double worst = 0.0;
  for (std::size_t i = 0; i < np; ++i) {
    worst = std::max(worst, std::sqrt(s11[i] * s11[i] + s12[i] * s12[i] + s21[i] * s21[i] +
                                      s22[i] * s22[i]));
  }
  return worst;
}

// --------------------------------------------------------------------- Grams

SparseMatrix assemble_gram(const FeSpace& space, GramKind kind, const std::vector<int>& dofs) {
  const TriangleRule& rule = triangle_rule_degree5();
  const int nloc = space.nodes_per_element();
  std::vector<Eigen::Triplet<double>> trip;
  std::array<Grad, 6> dphi;
  for (std::size_t e = 0; e < space.num_elements(); ++e) {
    const int el = static_cast<int>(e);
    const auto& geo = space.geometry(el);
    const auto nodes = space.element_nodes(el);
    double local[6][6] = {};
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& b = rule.points[q];
      std::array<double, 6> phi{};
      if (space.degree() == 1) {
        std::copy(b.begin(), b.end(), phi.begin());
      } else {
        phi = p2_shape(b);
      }
      shape_gradients(space.degree(), geo, b, dphi);
      const double wq = geo.area * rule.weights[q];
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) {
          double v = phi[i] * phi[j];
          if (kind == GramKind::H1) v += dphi[i][0] * dphi[j][0] + dphi[i][1] * dphi[j][1];
          local[i][j] += wq * v;
        }
      }
    }
    for (int c = 0; c < space.components(); ++c) {
      for (int i = 0; i < nloc; ++i) {
        for (int j = 0; j < nloc; ++j) {
          trip.emplace_back(space.dof(nodes[i], c), space.dof(nodes[j], c), local[i][j]);
        }
      }
    }
  }
  const int n = static_cast<int>(space.num_dofs());
  SparseMatrix full(n, n);
  full.setFromTriplets(trip.begin(), trip.end());
  return select(full, dofs, dofs);
}

DenseMatrix assemble_hminus1_gram(const FeSpace& space, const std::vector<int>& dofs) {
  if (space.degree() != 1 || space.components() != 1) {
    throw std::invalid_argument("assemble_hminus1_gram: expects a scalar P1 space");
  }
  const SparseMatrix A = assemble_gram(space, GramKind::L2, dofs);
  const SparseMatrix B = assemble_gram(space, GramKind::H1, dofs);
  Eigen::SimplicialLLT<SparseMatrix> chol(B);
  if (chol.info() != Eigen::Success) {
    throw std::runtime_error("assemble_hminus1_gram: H1 Gram is not positive definite");
  }
  const DenseMatrix X = chol.solve(DenseMatrix(A));
  DenseMatrix S = A * X;
  return 0.5 * (S + S.transpose());
}

// --------------------------------------------------------- saddle matrices

namespace {

std::vector<int> global_free(const DofLayout& L, Field f) {
  std::vector<int> out;
  for (int k = 0; k < L.free_size(f); ++k) out.push_back(L.free_dofs()[L.free_offset(f) + k]);
  return out;
}

ConstraintBlocks constraint_blocks_from(const SparseMatrix& Kfull, const DofLayout& L) {
  return {select(Kfull, global_free(L, Field::P), global_free(L, Field::U)),
          select(Kfull, global_free(L, Field::Lambda), global_free(L, Field::N))};
}

}  // namespace

ConstraintBlocks assemble_constraint_blocks(const FieldState& s, const MaterialParams& params,
                                            const Spaces& sp) {
  return constraint_blocks_from(assemble_full_jacobian(s, params, sp), sp.dofs);
}

SaddleMatrices assemble_saddle(const FieldState& s, const MaterialParams& params,
                               const Spaces& sp) {
  const DofLayout& L = sp.dofs;
  const SparseMatrix Kfull = assemble_full_jacobian(s, params, sp);
  SaddleMatrices m;
  m.K = select(Kfull, L.free_dofs(), L.free_dofs());
  m.R = assemble_residual(s, params, sp);
  m.T_u = assemble_gram(sp.u, GramKind::H1, L.free_local(Field::U));
  m.T_n = assemble_gram(sp.n, GramKind::H1, L.free_local(Field::N));
  m.S_p = assemble_gram(sp.p, GramKind::L2, L.free_local(Field::P));
  m.S_lambda = assemble_hminus1_gram(sp.lambda, L.free_local(Field::Lambda));
  const ConstraintBlocks cb = constraint_blocks_from(Kfull, L);
  m.B1 = cb.B1;
  m.B2 = cb.B2;
  std::vector<int> primal = global_free(L, Field::U);
  const auto nf = global_free(L, Field::N);
  primal.insert(primal.end(), nf.begin(), nf.end());
  m.A = select(Kfull, primal, primal);
  return m;
}

void write_matrix(std::ostream& os, const SparseMatrix& m) {
  os.precision(17);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
}

}  // namespace lce
