#include "packed_shell.hpp"

#include <algorithm>

#include "thetacong/errors.hpp"

namespace thetacong::detail {

PackedRows pack_shell(const Lattice& lat, const Shell& shell) {
  if (shell.norm >= 32768) throw InvalidArgument("shell norm too large for int16 kernels");
  PackedRows out;
  out.dim = lat.rank();
  out.width = round_up(out.dim, 8);
  out.count = shell.size();
  out.coords.assign(out.count * out.width, 0);
  out.folded.assign(out.count * out.width, 0);
  const auto& g = lat.gram;
  for (std::size_t i = 0; i < out.count; ++i) {
    auto row = shell.row(i);
    for (std::size_t k = 0; k < out.dim; ++k) {
      out.coords[i * out.width + k] = static_cast<std::int16_t>(row[k]);
      std::int64_t s = 0;
      for (std::size_t l = 0; l < out.dim; ++l) s += g(k, l) * row[l];
      // reduced mod 2^16; only inner products are ever read back
      out.folded[i * out.width + k] = static_cast<std::int16_t>(static_cast<std::uint16_t>(s & 0xffff));
    }
  }
  std::vector<std::uint32_t> order(out.count);
  for (std::size_t i = 0; i < out.count; ++i) order[i] = static_cast<std::uint32_t>(i);
  std::vector<std::size_t> starts;
  out.all = make_columns(out, order, {out.count}, starts);
  return out;
}

ColumnBlock make_columns(const PackedRows& rows, const std::vector<std::uint32_t>& order,
                         const std::vector<std::size_t>& segment_ends, std::vector<std::size_t>& starts) {
  starts.clear();
  std::size_t padded = 0;
  std::size_t prev = 0;
  for (std::size_t end : segment_ends) {
    starts.push_back(padded);
    padded += round_up(end - prev, kLanes);
    prev = end;
  }
  ColumnBlock cols;
  cols.dim = rows.dim;
  cols.stride = std::max<std::size_t>(padded, kLanes);
  cols.data.assign(cols.dim * cols.stride, 0);
  prev = 0;
  for (std::size_t s = 0; s < segment_ends.size(); ++s) {
    std::size_t at = starts[s];
    for (std::size_t i = prev; i < segment_ends[s]; ++i, ++at) {
      const std::int16_t* x = rows.x(order[i]);
      for (std::size_t k = 0; k < cols.dim; ++k) cols.data[k * cols.stride + at] = x[k];
    }
    prev = segment_ends[s];
  }
  return cols;
}

namespace {

inline Lane16 load(const std::int16_t* p) {
  Lane16 v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline std::uint64_t lane_sum(Lane16 v) {
  std::int64_t s = 0;
  for (std::size_t l = 0; l < kLanes; ++l) s += v[l];
  return static_cast<std::uint64_t>(s);
}

}  // namespace

std::uint64_t count_equal(const std::int16_t* query, const ColumnBlock& cols, std::size_t begin, std::size_t end,
                          std::int16_t target) {
  std::uint64_t total = 0;
  Lane16 hits = {};
  std::size_t pending = 0;
  for (std::size_t j = begin; j < end; j += kLanes) {
    Lane16 acc = {};
    for (std::size_t k = 0; k < cols.dim; ++k) acc += query[k] * load(cols.column(k) + j);
    hits -= (acc == target);
    if (++pending == 30000) {
      total += lane_sum(hits);
      hits = Lane16{};
      pending = 0;
    }
  }
  return total + lane_sum(hits);
}

void dots(const std::int16_t* query, const ColumnBlock& cols, std::size_t begin, std::size_t end,
          std::int16_t* out) {
  for (std::size_t j = begin; j < end; j += kLanes) {
    Lane16 acc = {};
    for (std::size_t k = 0; k < cols.dim; ++k) acc += query[k] * load(cols.column(k) + j);
    std::memcpy(out + (j - begin), &acc, sizeof acc);
  }
}

void histogram_block(const std::int16_t* const* queries, std::size_t nq, const ColumnBlock& cols,
                     std::size_t begin, std::size_t end, int radius, std::uint64_t* out) {
  const std::size_t width = 2 * static_cast<std::size_t>(radius) + 1;
  constexpr std::size_t kChunk = 16384;  // keeps int16 hit counters from wrapping
  thread_local std::vector<Lane16> hits;
  hits.resize(4 * width);
  for (std::size_t c0 = begin; c0 < end; c0 += kChunk) {
    const std::size_t c1 = std::min(end, c0 + kChunk);
    std::fill(hits.begin(), hits.end(), Lane16{});
    if (nq == 4) {
      for (std::size_t j = c0; j < c1; j += kLanes) {
        Lane16 a0 = {}, a1 = {}, a2 = {}, a3 = {};
        for (std::size_t k = 0; k < cols.dim; ++k) {
          const Lane16 col = load(cols.column(k) + j);
          a0 += queries[0][k] * col;
          a1 += queries[1][k] * col;
          a2 += queries[2][k] * col;
          a3 += queries[3][k] * col;
        }
        for (int c = -radius; c <= radius; ++c) {
          const std::size_t b = static_cast<std::size_t>(c + radius);
          const auto cc = static_cast<std::int16_t>(c);
          hits[b] -= (a0 == cc);
          hits[width + b] -= (a1 == cc);
          hits[2 * width + b] -= (a2 == cc);
          hits[3 * width + b] -= (a3 == cc);
        }
      }
    } else {
      for (std::size_t j = c0; j < c1; j += kLanes) {
        for (std::size_t r = 0; r < nq; ++r) {
          Lane16 a = {};
          for (std::size_t k = 0; k < cols.dim; ++k) a += queries[r][k] * load(cols.column(k) + j);
          for (int c = -radius; c <= radius; ++c)
            hits[r * width + static_cast<std::size_t>(c + radius)] -= (a == static_cast<std::int16_t>(c));
        }
      }
    }
    for (std::size_t r = 0; r < nq; ++r)
      for (std::size_t b = 0; b < width; ++b) out[r * width + b] += lane_sum(hits[r * width + b]);
  }
}

}  // namespace thetacong::detail
