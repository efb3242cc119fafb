#pragma once

#include <optional>
#include <string>

#include "dofde/expsum.hpp"

namespace dofde::expsum {

// Compressed kernels are expensive; finished ones are persisted as small JSON
// files keyed by (kernel id, tolerance, precision, fixed term count).

std::string cache_key(const CompressedKernel& ck);
std::string cache_path(const std::string& dir, const std::string& key);

std::optional<CompressedKernel> cache_load(const std::string& dir, const kernels::DOKernel& k,
                                           const CompressOptions& opt);
void cache_store(const std::string& dir, const CompressedKernel& ck);

// compress() with a read-through cache; empty dir disables caching.
CompressedKernel compress_cached(const kernels::DOKernel& k, const CompressOptions& opt,
                                 const std::string& cache_dir);

}  // namespace dofde::expsum
