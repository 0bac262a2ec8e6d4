#include <cmath>
#include <sstream>

#include "doctest.h"
#include "lcefem/mesh.hpp"

using namespace lce;

TEST_CASE("cell counts follow h") {
  for (int k = 2; k <= 6; ++k) {
    const Mesh m = build_uniform_mesh({std::ldexp(1.0, -k), 1.0});
    const int n = 1 << (k - 1);  // 0.5 / h
    CHECK(m.cells_per_side() == n);
    CHECK(m.num_vertices() == static_cast<std::size_t>((n + 1) * (n + 1)));
    CHECK(m.num_triangles() == static_cast<std::size_t>(2 * n * n));
  }
}

TEST_CASE("triangles are positively oriented and tile the domain") {
  const Mesh m = build_uniform_mesh({0.125, 1.3});
  double area = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const double a = m.signed_area(static_cast<int>(t));
    CHECK(a > 0.0);
    area += a;
  }
  CHECK(area == doctest::Approx(m.area()).epsilon(1e-14));
  CHECK(m.area() == doctest::Approx(0.25 * 1.3));
}

TEST_CASE("squares are split along the rising diagonal") {
  const Mesh m = build_uniform_mesh({0.25, 1.0});
  // Every triangle has an edge joining a lower-left and an upper-right corner
  // of its cell, so no edge has negative slope.
  for (const auto& tri : m.triangles()) {
    for (int e = 0; e < 3; ++e) {
      const Point& p = m.vertices()[tri[e]];
      const Point& q = m.vertices()[tri[(e + 1) % 3]];
      CHECK((q.x - p.x) * (q.y - p.y) >= -1e-15);
    }
  }
}

TEST_CASE("boundary tags") {
  const Mesh m = build_uniform_mesh({0.25, 1.0});
  const auto& v = m.vertices();
  const auto& tags = m.vertex_tags();
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(has_tag(tags[i], BoundaryTag::SymX) == (std::abs(v[i].x - 0.5) < 1e-14));
    CHECK(has_tag(tags[i], BoundaryTag::SymY) == (std::abs(v[i].y - 0.5) < 1e-14));
    CHECK(has_tag(tags[i], BoundaryTag::Clamp) == (std::abs(v[i].x - 1.0) < 1e-14));
    CHECK(has_tag(tags[i], BoundaryTag::Free) == (std::abs(v[i].y - 1.0) < 1e-14));
  }
  // corner (AR, 0.5) carries two tags
  CHECK(tags[2] == (bit(BoundaryTag::SymY) | bit(BoundaryTag::Clamp)));
  CHECK(m.boundary_edges().size() == 8);
}

TEST_CASE("invalid mesh sizes are rejected") {
  CHECK_THROWS_AS(validate(MeshParams{0.3, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(MeshParams{1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(MeshParams{0.25, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(MeshParams{-0.25, 1.0}), std::invalid_argument);
  CHECK_NOTHROW(validate(MeshParams{0.5, 1.0}));
}

TEST_CASE("refinement reproduces the finer uniform mesh") {
  const Mesh coarse = build_uniform_mesh({0.125, 1.2});
  const Mesh fine = build_uniform_mesh({0.0625, 1.2});
  const Mesh r = refine(coarse);
  REQUIRE(r.num_vertices() == fine.num_vertices());
  REQUIRE(r.num_triangles() == fine.num_triangles());
  for (std::size_t i = 0; i < r.num_vertices(); ++i) {
    CHECK(r.vertices()[i].x == fine.vertices()[i].x);
    CHECK(r.vertices()[i].y == fine.vertices()[i].y);
    CHECK(r.vertex_tags()[i] == fine.vertex_tags()[i]);
  }
  // coarse vertex (i, j) is fine vertex (2i, 2j)
  const int nc = coarse.cells_per_side();
  const int nf = fine.cells_per_side();
  for (int j = 0; j <= nc; ++j) {
    for (int i = 0; i <= nc; ++i) {
      const Point& a = coarse.vertices()[j * (nc + 1) + i];
      const Point& b = fine.vertices()[2 * j * (nf + 1) + 2 * i];
      CHECK(a.x == b.x);
      CHECK(a.y == b.y);
    }
  }
}

TEST_CASE("point location") {
  const Mesh m = build_uniform_mesh({0.125, 1.0});
  for (double x : {0.5, 0.61, 0.75, 0.999, 1.0}) {
    for (double y : {0.5, 0.52, 0.8, 1.0}) {
      const ElementPoint ep = m.locate(x, y);
      REQUIRE(ep.element >= 0);
      const auto& tri = m.triangles()[static_cast<std::size_t>(ep.element)];
      double px = 0.0, py = 0.0, sum = 0.0;
      for (int k = 0; k < 3; ++k) {
        CHECK(ep.bary[k] >= -1e-12);
        px += ep.bary[k] * m.vertices()[tri[k]].x;
        py += ep.bary[k] * m.vertices()[tri[k]].y;
        sum += ep.bary[k];
      }
      CHECK(sum == doctest::Approx(1.0));
      CHECK(px == doctest::Approx(x));
      CHECK(py == doctest::Approx(y));
    }
  }
  CHECK_THROWS_AS(m.locate(0.2, 0.7), std::out_of_range);
}

TEST_CASE("mesh dump header") {
  const Mesh m = build_uniform_mesh({0.25, 1.0});
  std::ostringstream os;
  write_mesh(os, m);
  CHECK(os.str().rfind("vertices 9 triangles 8", 0) == 0);
}
