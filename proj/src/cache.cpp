#include "ptspec/cache.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace ptspec::io {

namespace {

constexpr std::uint64_t kMagic = 0x70747370656367ULL;  // "ptspecg"

std::uint64_t fnv1a(const void* data, std::size_t bytes, std::uint64_t seed) {
  const auto* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < bytes; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t h0_cache_key(const Eigen::MatrixXd& h0) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const std::int64_t shape[2] = {h0.rows(), h0.cols()};
  h = fnv1a(shape, sizeof shape, h);
  h = fnv1a(h0.data(), sizeof(double) * static_cast<std::size_t>(h0.size()), h);
  return h;
}

EigenCache::EigenCache(std::string dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
}

std::string EigenCache::entry_path(std::uint64_t key) const {
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.eig", static_cast<unsigned long long>(key));
  return dir_ + "/" + name;
}

std::optional<linalg::SpectralDecomposition> EigenCache::load(std::uint64_t key) const {
  std::ifstream in(entry_path(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::uint64_t magic = 0, stored_key = 0, n64 = 0;
  in.read(reinterpret_cast<char*>(&magic), sizeof magic);
  in.read(reinterpret_cast<char*>(&stored_key), sizeof stored_key);
  in.read(reinterpret_cast<char*>(&n64), sizeof n64);
  if (!in || magic != kMagic || stored_key != key || n64 == 0 || n64 > 100000)
    return std::nullopt;
  const auto n = static_cast<Eigen::Index>(n64);

  Eigen::VectorXd values(n), residuals(n);
  Eigen::MatrixXd vectors(n, n);
  in.read(reinterpret_cast<char*>(values.data()), sizeof(double) * n64);
  in.read(reinterpret_cast<char*>(residuals.data()), sizeof(double) * n64);
  in.read(reinterpret_cast<char*>(vectors.data()), sizeof(double) * n64 * n64);
  if (!in) return std::nullopt;
  char extra;
  if (in.read(&extra, 1)) return std::nullopt;  // trailing garbage: corrupt

  linalg::SpectralDecomposition dec;
  dec.eigenvalues = values.cast<std::complex<double>>();
  dec.eigenvectors = vectors.cast<std::complex<double>>();
  dec.residuals = residuals;
  return dec;
}

void EigenCache::store(std::uint64_t key, const linalg::SpectralDecomposition& dec) const {
  const std::string final_path = entry_path(key);
  const std::string tmp_path = final_path + ".tmp";
  {
    std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
    if (!out) return;  // best effort
    const std::uint64_t n64 = static_cast<std::uint64_t>(dec.eigenvalues.size());
    const Eigen::VectorXd values = dec.eigenvalues.real();
    const Eigen::MatrixXd vectors = dec.eigenvectors.real();
    out.write(reinterpret_cast<const char*>(&kMagic), sizeof kMagic);
    out.write(reinterpret_cast<const char*>(&key), sizeof key);
    out.write(reinterpret_cast<const char*>(&n64), sizeof n64);
    out.write(reinterpret_cast<const char*>(values.data()), sizeof(double) * n64);
    out.write(reinterpret_cast<const char*>(dec.residuals.data()), sizeof(double) * n64);
    out.write(reinterpret_cast<const char*>(vectors.data()), sizeof(double) * n64 * n64);
    if (!out) return;
  }
  std::error_code ec;
  std::filesystem::rename(tmp_path, final_path, ec);
}

linalg::SpectralDecomposition eig_symmetric_cached(const Eigen::MatrixXd& h0,
                                                   const EigenCache* cache,
                                                   bool* hit) {
  if (hit) *hit = false;
  if (!cache) return linalg::eig_symmetric(h0);
  const std::uint64_t key = h0_cache_key(h0);
  if (auto dec = cache->load(key)) {
    if (hit) *hit = true;
    return *dec;
  }
  linalg::SpectralDecomposition dec = linalg::eig_symmetric(h0);
  cache->store(key, dec);
  return dec;
}

}  // namespace ptspec::io
