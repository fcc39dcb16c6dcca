#pragma once

// Internal: shells laid out for the counting kernels.
//
// All arithmetic is done in int16 lanes and wraps mod 2^16. Inner products
// of vectors with norms below 2^15 are smaller than 2^15 in absolute value
// (Cauchy-Schwarz), so the wrapped result is the exact value.

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <vector>

#include "thetacong/lattice.hpp"
#include "thetacong/short_vectors.hpp"

namespace thetacong::detail {

inline constexpr std::size_t kLanes = 32;
using Lane16 = std::int16_t __attribute__((vector_size(64)));

inline std::size_t round_up(std::size_t v, std::size_t m) { return (v + m - 1) / m * m; }

/// Column-major copy of selected rows, padded with zero vectors to a
/// multiple of kLanes. Segment starts are lane-aligned.
struct ColumnBlock {
  std::size_t dim = 0;
  std::size_t stride = 0;  // padded length
  std::vector<std::int16_t> data;

  const std::int16_t* column(std::size_t k) const { return data.data() + k * stride; }
};

/// Vectors of one shell: coordinates and Gram-folded coordinates (G x),
/// both row-major with `width` int16 per row.
struct PackedRows {
  std::size_t dim = 0;
  std::size_t width = 0;
  std::size_t count = 0;
  std::vector<std::int16_t> coords;
  std::vector<std::int16_t> folded;
  /// Every row, in order, as one column block.
  ColumnBlock all;

  const std::int16_t* x(std::size_t i) const { return coords.data() + i * width; }
  const std::int16_t* gx(std::size_t i) const { return folded.data() + i * width; }
};

PackedRows pack_shell(const Lattice& lat, const Shell& shell);

inline std::int16_t dot(const std::int16_t* gx, const std::int16_t* y, std::size_t dim) {
  std::int16_t acc = 0;
  for (std::size_t k = 0; k < dim; ++k) acc = static_cast<std::int16_t>(acc + gx[k] * y[k]);
  return acc;
}

/// Lays out rows `order` of `rows`; `segment_ends` (exclusive, in `order`)
/// split the rows into segments that each start on a lane boundary.
/// Returns the padded start of each segment in `starts`.
ColumnBlock make_columns(const PackedRows& rows, const std::vector<std::uint32_t>& order,
                         const std::vector<std::size_t>& segment_ends, std::vector<std::size_t>& starts);

/// Number of lanes in [begin, end) whose inner product with the query
/// (given as G v) equals target. begin and end are multiples of kLanes.
std::uint64_t count_equal(const std::int16_t* query, const ColumnBlock& cols, std::size_t begin, std::size_t end,
                          std::int16_t target);

/// Inner products of the query with lanes [begin, end) into out[0..).
void dots(const std::int16_t* query, const ColumnBlock& cols, std::size_t begin, std::size_t end,
          std::int16_t* out);

/// For up to four queries, histograms of inner products over
/// [begin, end): out[r][c + radius] for c in [-radius, radius].
void histogram_block(const std::int16_t* const* queries, std::size_t nq, const ColumnBlock& cols,
                     std::size_t begin, std::size_t end, int radius, std::uint64_t* out);

}  // namespace thetacong::detail
