#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

#include "ptspec/linalg.hpp"

// Content-addressed cache for H0 eigendecompositions. Best effort: any
// read or write failure degrades to a recompute, never to an error.

namespace ptspec::io {

// FNV-1a over the raw double bytes of the assembled H0 plus its shape.
std::uint64_t h0_cache_key(const Eigen::MatrixXd& h0);

class EigenCache {
 public:
  explicit EigenCache(std::string dir);

  // nullopt on miss or on a corrupt entry (which is then overwritten by
  // the next store)
  std::optional<linalg::SpectralDecomposition> load(std::uint64_t key) const;
  void store(std::uint64_t key, const linalg::SpectralDecomposition& dec) const;

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  std::string entry_path(std::uint64_t key) const;
};

// Cached wrapper around eig_symmetric; `hit` reports what happened.
linalg::SpectralDecomposition eig_symmetric_cached(const Eigen::MatrixXd& h0,
                                                   const EigenCache* cache,
                                                   bool* hit = nullptr);

}  // namespace ptspec::io
