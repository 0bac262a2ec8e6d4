#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "lcefem/assembly.hpp"
#include "lcefem/config.hpp"
#include "lcefem/io.hpp"
#include "lcefem/solver.hpp"

using namespace lce;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("lcefem_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("parsing keys, comments and mesh sizes") {
  std::istringstream is(
      "# comment\n"
      "a = 0.3   # trailing comment\n"
      "\n"
      "b=0.002\n"
      "f = 0.1, -0.2\n"
      "ladder = 2^-2, 0.125, 2^-4\n"
      "h = 2^-3\n"
      "newton_max_iter = 7\n"
      "linear_solver = sparselu\n"
      "dump_stretches = 1.1, 1.2\n"
      "out = some dir/x\n");
  const RunConfig c = parse_config(is);
  CHECK(c.material.a == 0.3);
  CHECK(c.material.b == 0.002);
  CHECK(c.material.f[1] == -0.2);
  CHECK(c.ladder == std::vector<double>{0.25, 0.125, 0.0625});
  CHECK(c.h == 0.125);
  CHECK(c.solver.newton_max_iter == 7);
  CHECK(c.dump_stretches == std::vector<double>{1.1, 1.2});
  CHECK(c.out == "some dir/x");
  CHECK(c.material.M == MaterialParams{}.M);
}

TEST_CASE("malformed input names the problem") {
  auto fails = [](const std::string& text, const std::string& fragment) {
    std::istringstream is(text);
    try {
      parse_config(is);
      return false;
    } catch (const std::invalid_argument& e) {
      return std::string(e.what()).find(fragment) != std::string::npos;
    }
  };
  CHECK(fails("colour = red\n", "unknown key"));
  CHECK(fails("a = x\n", "a"));
  CHECK(fails("just words\n", "line 1"));
  CHECK(fails("f = 1\n", "two values"));
  CHECK(fails("newton_max_iter = 2.5\n", "integer"));
  CHECK(fails("linear_solver = cholesky\n", "linear_solver"));
}

TEST_CASE("serialisation round trip") {
  RunConfig c;
  c.material.a = 0.123456789012345;
  c.material.b = 1.0 / 3.0;
  c.material.g = {0.1, 1e-17};
  c.solver.newton_abs_tol = 3e-11;
  c.solver.dt_min = 0.01 / 7;
  c.ladder = {0.5, 0.25, 0.03125};
  c.dump_stretches = {1.05};
  c.out = "results/a b";
  std::ostringstream os;
  write_config(os, c);
  std::istringstream is(os.str());
  const RunConfig back = parse_config(is);
  CHECK(back == c);
  RunConfig d = back;
  d.material.dt = 0.02;
  CHECK_FALSE(d == c);
}

TEST_CASE("overrides") {
  RunConfig c;
  apply_override(c, "a=0.9");
  apply_override(c, "ladder = 2^-2, 2^-3");
  CHECK(c.material.a == 0.9);
  CHECK(c.ladder.size() == 2);
  CHECK_THROWS_AS(apply_override(c, "bogus"), std::invalid_argument);
}

TEST_CASE("validation") {
  RunConfig c;
  CHECK_NOTHROW(validate(c));
  c.material.a = 1.5;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = RunConfig{};
  c.ladder = {0.25, 0.0625, 0.125};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.ladder = {0.25, 0.25};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c.ladder = {0.25, 0.1};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = RunConfig{};
  c.h = 0.07;
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  c = RunConfig{};
  c.dump_stretches = {1.5};
  CHECK_THROWS_AS(validate(c), std::invalid_argument);
  CHECK(parse_mesh_size("2^-5") == 0.03125);
  CHECK(stretch_to_t(1.4, MaterialParams{}) == doctest::Approx(1.0));
  CHECK(stretch_to_t(1.1, MaterialParams{}) == doctest::Approx(0.25));
}

TEST_CASE("atomic writes leave either the old or the new file") {
  const fs::path d = scratch_dir("atomic");
  const fs::path f = d / "table.csv";
  atomic_write(f, [](std::ostream& os) { os << "old\n"; });
  CHECK_THROWS(atomic_write(f, [](std::ostream& os) {
    os << "partial";
    throw std::runtime_error("interrupted");
  }));
  std::ifstream in(f);
  std::string line;
  std::getline(in, line);
  CHECK(line == "old");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(d)) {
    (void)e;
    ++files;
  }
  CHECK(files == 1);  // no temporary left behind
  atomic_write(f, [](std::ostream& os) { os << "new\n"; });
  std::ifstream in2(f);
  std::getline(in2, line);
  CHECK(line == "new");
}

TEST_CASE("state cache") {
  MaterialParams P;
  const auto sp = make_spaces({0.25, P.ar()});
  FieldState s = stress_free_field_state(*sp, P);
  s.t = 0.37;
  s.u[3] = 1.0 / 3.0;
  const fs::path f = scratch_dir("state") / "final.state";
  save_state(f, s, "key one\nline two");
  const auto back = load_state(f, "key one\nline two");
  REQUIRE(back.has_value());
  CHECK(back->t == s.t);
  CHECK((back->u - s.u).norm() == 0.0);
  CHECK((back->n - s.n).norm() == 0.0);
  CHECK((back->p - s.p).norm() == 0.0);
  CHECK((back->lambda - s.lambda).norm() == 0.0);
  CHECK_FALSE(load_state(f, "other key").has_value());
  CHECK_FALSE(load_state(f.parent_path() / "missing", "k").has_value());
  std::ofstream(f) << "garbage\n";
  CHECK_THROWS_AS(load_state(f, "k"), std::runtime_error);
}
