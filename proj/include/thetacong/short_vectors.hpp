#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thetacong/lattice.hpp"

namespace thetacong {

/// G = L * diag(pivots) * L^T with L unit lower triangular, over Q.
struct RationalLDL {
  RatMatrix lower;
  std::vector<Rational> pivots;
};

/// Throws NotPositiveDefinite when a pivot is <= 0.
RationalLDL cholesky_rational(const EvenGram& gram);

/// All lattice vectors of one norm, as coordinate rows in the lattice basis,
/// sorted lexicographically.
struct Shell {
  int norm = 0;
  std::size_t dim = 0;
  std::vector<std::int32_t> coords;

  std::size_t size() const { return dim ? coords.size() / dim : 0; }
  std::span<const std::int32_t> row(std::size_t i) const { return {coords.data() + i * dim, dim}; }

  friend bool operator==(const Shell&, const Shell&) = default;
};

/// Every lattice vector with norm <= bound, grouped by norm.
struct VectorList {
  std::string label;
  std::string gram_hash;
  int bound = 0;
  std::map<int, Shell> shells;  // one entry per even norm 0..bound, possibly empty

  /// nullptr when `norm` exceeds the enumerated bound.
  const Shell* shell(int norm) const;
  std::size_t count(int norm) const;
  std::size_t total() const;
  /// Same data cut down to norms <= bound.
  VectorList restricted(int new_bound) const;

  friend bool operator==(const VectorList&, const VectorList&) = default;
};

inline constexpr std::size_t kDefaultVectorBudget = 10'000'000;

/// Fincke-Pohst enumeration of all v with v^T G v <= bound, in exact
/// integer arithmetic (fraction-free LDL). Throws BudgetExceeded when more
/// than `budget` vectors would be produced.
VectorList enumerate_short(const Lattice& lat, int bound, std::size_t budget = kDefaultVectorBudget);

/// Cache file for `label` inside `dir`.
std::filesystem::path cache_path(const std::filesystem::path& dir, std::string_view label);

/// Writes `<dir>/<label>.svcache`, creating `dir` on demand.
void cache_store(const VectorList& list, const std::filesystem::path& dir);

/// Reads the cache for `lat` and cuts it to `bound`. Throws CacheMiss when
/// absent or enumerated to a smaller bound, CorruptCache when the Gram hash
/// or any shell count disagrees with the file.
VectorList cache_load(const std::filesystem::path& dir, const Lattice& lat, int bound);

/// Cache when possible, otherwise enumerate (and store when a dir is given).
VectorList load_or_enumerate(const Lattice& lat, int bound, const std::optional<std::filesystem::path>& cache_dir,
                             std::size_t budget = kDefaultVectorBudget);

}  // namespace thetacong
