#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "ptspec/cache.hpp"
#include "ptspec/config.hpp"
#include "ptspec/matrix_io.hpp"
#include "ptspec/run_task.hpp"

using namespace ptspec;

TEST_SUITE_BEGIN("cli-io");

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("ptspec_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string write_file(const TempDir& dir, const std::string& name,
                       const std::string& text) {
  const std::string p = dir.file(name);
  std::ofstream out(p);
  out << text;
  return p;
}

const char* kHarmonicConfig = R"(# harmonic oscillator with a bounded odd perturbation
[problem]
dimension = 1
potential = x^2
perturbation = x/(1+x^2)
reflection = 1
kinetic_coefficient = 1.0
basis_size = 24
length_scale = 1.0

[task]
task = spectrum
epsilon = 0.0

[output]
directory = out
)";

}  // namespace

TEST_CASE("config round trip") {
  TempDir dir;
  const std::string path = write_file(dir, "h.cfg", kHarmonicConfig);
  const auto cfg = io::load_config(path);
  CHECK(cfg.task == "spectrum");
  CHECK(cfg.problem.dimension == 1);
  CHECK(cfg.problem.basis.modes_per_dim == 24);
  CHECK(cfg.epsilons.size() == 1);
  CHECK(cfg.problem.potential(2.0) == 4.0);
  CHECK(cfg.out_dir == (dir.path / "out").string());
}

TEST_CASE("config rejects missing perturbation in PT form") {
  TempDir dir;
  const std::string path = write_file(dir, "bad.cfg", R"([problem]
dimension = 1
potential = x^2
reflection = 1
basis_size = 12

[task]
task = spectrum
)");
  CHECK_THROWS_AS(io::load_config(path), ConfigError);
}

TEST_CASE("config rejects duplicate keys naming both lines") {
  TempDir dir;
  const std::string path = write_file(dir, "dup.cfg", R"([problem]
dimension = 1
basis_size = 12
basis_size = 16
)");
  try {
    io::load_config(path);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line == 4);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("config rejects unknown keys") {
  TempDir dir;
  const std::string path = write_file(dir, "unk.cfg", R"([problem]
dimension = 1
potential = x^2
perturbation = x
reflection = 1
basis_size = 12
typo_key = 1

[task]
task = spectrum
)");
  CHECK_THROWS_AS(io::load_config(path), ConfigError);
}

TEST_CASE("matrix file round trip is bit exact") {
  TempDir dir;
  const std::string path = dir.file("m.mat");
  io::write_matrix(path, Eigen::MatrixXcd::Identity(3, 3));
  const Eigen::MatrixXcd id = io::read_matrix(path);
  CHECK((id - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);

  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  Eigen::MatrixXcd m(200, 200);
  for (int i = 0; i < 200; ++i)
    for (int j = 0; j < 200; ++j)
      m(i, j) = std::complex<double>(u(rng) * std::exp(u(rng) / 250.0), u(rng));
  io::write_matrix(path, m);
  const Eigen::MatrixXcd back = io::read_matrix(path);
  REQUIRE(back.rows() == 200);
  bool identical = true;
  for (int i = 0; i < 200 && identical; ++i)
    for (int j = 0; j < 200; ++j)
      if (back(i, j) != m(i, j)) {
        identical = false;
        break;
      }
  CHECK(identical);
}

TEST_CASE("matrix file format errors") {
  TempDir dir;
  const std::string path = write_file(dir, "trunc.mat", "2 2\n1 0 0 0\n");
  CHECK_THROWS_AS(io::read_matrix(path), FormatError);
  const std::string bad = write_file(dir, "bad.mat", "2\n");
  CHECK_THROWS_AS(io::read_matrix(bad), FormatError);
  const std::string extra = write_file(dir, "extra.mat", "1 1\n1 0 junk\n");
  CHECK_THROWS_AS(io::read_matrix(extra), FormatError);
}

TEST_CASE("cache hit, miss and corruption recovery") {
  TempDir dir;
  io::EigenCache cache(dir.file("cache"));
  Eigen::MatrixXd a(6, 6);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);

  bool hit = true;
  const auto first = io::eig_symmetric_cached(a, &cache, &hit);
  CHECK_FALSE(hit);
  const auto second = io::eig_symmetric_cached(a, &cache, &hit);
  CHECK(hit);
  CHECK((first.eigenvalues - second.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  CHECK((first.eigenvectors - second.eigenvectors).cwiseAbs().maxCoeff() == 0.0);

  // different matrix: miss
  Eigen::MatrixXd b = a;
  b(0, 0) += 1.0;
  io::eig_symmetric_cached(b, &cache, &hit);
  CHECK_FALSE(hit);

  // corrupt the entry: silently recomputed and rewritten
  const std::uint64_t key = io::h0_cache_key(a);
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.eig", static_cast<unsigned long long>(key));
  {
    std::ofstream out(dir.file("cache") + "/" + name,
                      std::ios::binary | std::ios::trunc);
    out << "garbage";
  }
  const auto third = io::eig_symmetric_cached(a, &cache, &hit);
  CHECK_FALSE(hit);
  CHECK((first.eigenvalues - third.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  const auto fourth = io::eig_symmetric_cached(a, &cache, &hit);
  CHECK(hit);
  CHECK((first.eigenvectors - fourth.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("report is deterministic and cache-transparent") {
  TempDir dir;
  const std::string path = write_file(dir, "h.cfg", kHarmonicConfig);
  io::RunOptions opts;
  opts.write_files = false;
  opts.no_cache = true;
  opts.timestamp = false;
  const auto cfg = io::load_config(path);
  const auto a = io::run_task(cfg, opts);
  const auto b = io::run_task(cfg, opts);
  CHECK(a.dump() == b.dump());

  // cache on: first run populates, second hits; numbers identical
  io::RunOptions cached = opts;
  cached.no_cache = false;
  cached.cache_dir = dir.file("cache");
  const auto c = io::run_task(cfg, cached);
  const auto d = io::run_task(cfg, cached);
  CHECK(c["eigenvalues"].dump() == a["eigenvalues"].dump());
  CHECK(d["eigenvalues"].dump() == a["eigenvalues"].dump());
  CHECK(c["diagnostics"]["h0_eigensolve"] == "computed");
  CHECK(d["diagnostics"]["h0_eigensolve"] == "cache hit");
}

TEST_CASE("run_task writes the documented artifacts") {
  TempDir dir;
  const std::string path = write_file(dir, "h.cfg", kHarmonicConfig);
  io::RunOptions opts;
  opts.no_cache = true;
  opts.out_dir_override = dir.file("out");
  opts.dump_matrices = true;
  const auto cfg = io::load_config(path);
  io::run_task(cfg, opts);
  CHECK(std::filesystem::exists(dir.file("out") + "/report.json"));
  CHECK(std::filesystem::exists(dir.file("out") + "/eigenvalues.csv"));
  // dumped operators round-trip and match the assembled family
  const Eigen::MatrixXcd h0 = io::read_matrix(dir.file("out") + "/h0.mat");
  const auto fam = family::assemble(cfg.problem);
  CHECK((h0.real() - fam.h0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(std::filesystem::exists(dir.file("out") + "/h1.mat"));
  CHECK(std::filesystem::exists(dir.file("out") + "/j.mat"));
}

TEST_CASE("PTSPEC_CACHE environment variable selects the cache directory") {
  TempDir dir;
  const std::string path = write_file(dir, "h.cfg", kHarmonicConfig);
  const std::string cache_dir = dir.file("env_cache");
  setenv("PTSPEC_CACHE", cache_dir.c_str(), 1);
  io::RunOptions opts;
  opts.write_files = false;
  opts.timestamp = false;
  const auto cfg = io::load_config(path);
  const auto first = io::run_task(cfg, opts);
  CHECK(first["diagnostics"]["h0_eigensolve"] == "computed");
  const auto second = io::run_task(cfg, opts);
  CHECK(second["diagnostics"]["h0_eigensolve"] == "cache hit");
  unsetenv("PTSPEC_CACHE");
  CHECK(std::filesystem::exists(cache_dir));
}

TEST_CASE("reality on a degenerate spectrum surfaces SimplicityError") {
  TempDir dir;
  const std::string path = write_file(dir, "deg.cfg", R"([problem]
dimension = 2
potential = (x1^2 + 4*x2^2)/2
perturbation = x1^2*x2/(1+x1^2+x2^2)
reflection = 0,1
kinetic_coefficient = 0.5
basis_size = 10
length_scale = 1.0,0.70710678118654752

[task]
task = reality
trusted_count = 6
epsilon = 0.01
)");
  const auto cfg = io::load_config(path);
  io::RunOptions opts;
  opts.write_files = false;
  opts.no_cache = true;
  CHECK_THROWS_AS(io::run_task(cfg, opts), SimplicityError);
}

TEST_SUITE_END();
