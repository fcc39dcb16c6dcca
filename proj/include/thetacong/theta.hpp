#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "thetacong/forms.hpp"
#include "thetacong/lattice.hpp"
#include "thetacong/qexpansion.hpp"
#include "thetacong/short_vectors.hpp"

namespace thetacong {

struct CountOptions {
  unsigned workers = 1;
  /// Top-level candidates are cut into this many contiguous partitions.
  unsigned partitions = 1;
  /// Search nodes allowed in one call; 0 means unlimited.
  std::uint64_t node_budget = 0;
  /// Partial sums per finished partition go here; a rerun with the same
  /// task resumes from them.
  std::optional<std::filesystem::path> checkpoint;
};

namespace detail {
struct PackedRows;
}

/// Packed shells of one lattice, shared read-only by the counters.
class CountingContext {
public:
  CountingContext(const Lattice& lat, const VectorList& vectors);
  ~CountingContext();
  CountingContext(const CountingContext&) = delete;
  CountingContext& operator=(const CountingContext&) = delete;

  const Lattice& lattice() const { return lat_; }
  const VectorList& vectors() const { return vectors_; }
  /// Throws ShellMissing when `norm` exceeds the enumerated bound.
  const detail::PackedRows& rows(int norm) const;
  std::size_t shell_size(int norm) const;
  /// Fraction of shell `norm` having inner product `c` with the first
  /// vector of shell `other`; drives the column ordering.
  double inner_product_share(int norm, int other, int c) const;

private:
  const Lattice& lat_;
  const VectorList& vectors_;
  std::map<int, std::unique_ptr<detail::PackedRows>> rows_;
  mutable std::mutex share_mutex_;
  mutable std::map<std::pair<int, int>, std::map<int, double>> shares_;
};

/// Counting order of the columns of T: descending t_ii, then fewest expected
/// candidates given the columns already placed. With `first_norm` set, the
/// first column is taken among those of that norm.
std::vector<int> column_order(const CountingContext& ctx, const HalfIntegralMatrix& t,
                              std::optional<int> first_norm = std::nullopt);

/// #{X : S[X] = 2T} by forward-checking backtracking over the shells.
Integer representation_count(const CountingContext& ctx, const HalfIntegralMatrix& t, const CountOptions& opts = {});
Integer representation_count(const Lattice& lat, const VectorList& vectors, const HalfIntegralMatrix& t,
                             const CountOptions& opts = {});

/// Shell size times the count with the first column pinned to the first
/// vector of shell `transitive_norm`. Exact only when Aut(L) is transitive
/// on that shell; the caller vouches for it.
Integer orbit_factored_count(const CountingContext& ctx, const HalfIntegralMatrix& t, int transitive_norm,
                             const CountOptions& opts = {});

/// Drops zero columns and columns equal to +-another column; the count is
/// unchanged for any positive definite lattice. Degree 0 means T = 0.
HalfIntegralMatrix reduce_index(const HalfIntegralMatrix& t);

/// Transitivity claimed for a shell: depth 1 means Aut(L) is transitive on
/// the shell, depth 2 additionally that the stabilizer of a shell vector is
/// transitive on each inner-product level within the shell.
struct OrbitAssertion {
  int norm = 0;
  int depth = 0;
};

/// Configured assertions (currently the Leech minimal shell).
std::vector<OrbitAssertion> configured_assertions(const Lattice& lat);

/// Counts of every degree-n index whose diagonal is norm/2 throughout,
/// keyed by class, from a scan with the first `pin_depth` columns pinned to
/// orbit representatives. Requires 1 <= degree - pin_depth <= 2. With two
/// pinned columns, classes whose columns are all +-equal are absent; they
/// reduce to degree 1 before the engine asks for them. Throws
/// Error if two members of one class come out with different counts,
/// which is what a false transitivity claim looks like.
std::map<CanonicalKey, Integer> shell_census(const CountingContext& ctx, int norm, int degree, int pin_depth,
                                             const CountOptions& opts = {});

/// Order of the isometry group of a Gram of rank <= 8.
Integer aut_order(const EvenGram& g);

/// One line of counts.jsonl.
struct CountRecord {
  std::string lattice;
  std::string key;
  Integer coeff;
  Integer d_t;
  double wall_time = 0;
  std::string method;
  unsigned partitions = 1;
};

/// Append-only store of computed coefficients.
class CountLedger {
public:
  explicit CountLedger(std::filesystem::path path);

  const std::filesystem::path& path() const { return path_; }
  const CountRecord* find(const std::string& lattice, const CanonicalKey& key) const;
  /// Appends unless an identical (lattice, key) record exists; a different
  /// coefficient for a known key throws Error.
  void append(const CountRecord& record);
  std::vector<CountRecord> records() const;

private:
  std::filesystem::path path_;
  std::map<std::pair<std::string, std::string>, CountRecord> index_;
};

struct EngineConfig {
  std::optional<std::filesystem::path> cache_dir;
  std::optional<std::filesystem::path> ledger;
  std::optional<std::filesystem::path> checkpoint_dir;
  CountOptions count;
  /// Turn the configured orbit assertions off (plain backtracking only).
  bool use_orbits = true;
};

/// Coefficient service: shells, counting strategy, ledger.
class ThetaEngine {
public:
  explicit ThetaEngine(EngineConfig config = {});
  ~ThetaEngine();

  /// Vectors of norm <= bound, cached across calls.
  const VectorList& vectors(const Lattice& lat, int bound);

  /// a(theta_L^(n); T) for one index.
  Integer coefficient(const Lattice& lat, const HalfIntegralMatrix& t);
  /// Method used for the last coefficient(): "trivial", "ledger",
  /// "backtrack", "census-pin<d>".
  const std::string& last_method() const { return last_method_; }

  /// Every canonical class with t_ii <= bound.
  QExpansion theta_block(const Lattice& lat, int degree, int bound);

  CountLedger* ledger() { return ledger_ ? ledger_.get() : nullptr; }

private:
  struct LatticeState;
  LatticeState& state(const Lattice& lat, int bound);
  Integer compute(const Lattice& lat, const HalfIntegralMatrix& reduced);

  EngineConfig config_;
  std::unique_ptr<CountLedger> ledger_;
  std::map<std::string, std::unique_ptr<LatticeState>> states_;
  std::string last_method_;
};

}  // namespace thetacong
