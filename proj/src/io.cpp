#include "lcefem/io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace lce {

namespace fs = std::filesystem;

void atomic_write(const fs::path& path, const std::function<void(std::ostream&)>& writer) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  try {
    {
      std::ofstream os(tmp, std::ios::trunc);
      if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
      writer(os);
      os.flush();
      if (!os) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

namespace {

constexpr const char* kMagic = "lcefem-state 1";

void write_vector(std::ostream& os, const char* name, const Vector& v) {
  os << name << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << v[i] << '\n';
}

Vector read_vector(std::istream& is, const char* name) {
  std::string tag;
  Eigen::Index n = -1;
  if (!(is >> tag >> n) || tag != name || n < 0) {
    throw std::runtime_error(std::string("state file: expected block ") + name);
  }
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(is >> v[i])) throw std::runtime_error(std::string("state file: truncated block ") + name);
  }
  return v;
}

// Keys may span lines; store them escaped on one line.
std::string one_line(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') out += "\\n";
    else if (c == '\\') out += "\\\\";
    else out += c;
  }
  return out;
}

}  // namespace

void save_state(const fs::path& path, const FieldState& s, const std::string& key) {
  atomic_write(path, [&](std::ostream& os) {
    os.precision(17);
    os << kMagic << '\n' << one_line(key) << '\n' << "t " << s.t << '\n';
    write_vector(os, "u", s.u);
    write_vector(os, "n", s.n);
    write_vector(os, "p", s.p);
    write_vector(os, "lambda", s.lambda);
  });
}

std::optional<FieldState> load_state(const fs::path& path, const std::string& key) {
  std::ifstream is(path);
  if (!is) return std::nullopt;
  std::string magic, stored;
  std::getline(is, magic);
  if (magic != kMagic) throw std::runtime_error("state file: bad header in " + path.string());
  std::getline(is, stored);
  if (stored != one_line(key)) return std::nullopt;
  FieldState s;
  std::string tag;
  if (!(is >> tag >> s.t) || tag != "t") throw std::runtime_error("state file: missing t");
  s.u = read_vector(is, "u");
  s.n = read_vector(is, "n");
  s.p = read_vector(is, "p");
  s.lambda = read_vector(is, "lambda");
  return s;
}

}  // namespace lce
