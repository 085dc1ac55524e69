#pragma once

// On-disk cache for the expensive finite-array eigensolves: one JSON file
// per parameter point, cache/<hash>.json, written atomically.

#include <filesystem>
#include <optional>
#include <string>

#include "boundpair/spectra.hpp"

namespace boundpair {

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string content_hash(const std::string& text);

/// Canonical description of everything that determines a bound-state
/// search result (atom count, period, gamma0, solver settings, code version).
std::string bound_search_key(const ArrayParams& params);

class StateCache {
 public:
  explicit StateCache(std::filesystem::path dir);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path path_for(const ArrayParams& params) const;

  std::optional<BoundSearchResult> load(const ArrayParams& params) const;
  void store(const ArrayParams& params, const BoundSearchResult& result) const;

 private:
  std::filesystem::path dir_;
};

/// most_subradiant_bound through the cache when one is given.
BoundSearchResult cached_most_subradiant_bound(const ArrayParams& params, const StateCache* cache);

}  // namespace boundpair
