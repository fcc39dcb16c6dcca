#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "packed_shell.hpp"
#include "thetacong/errors.hpp"
#include "thetacong/theta.hpp"

namespace thetacong {

using detail::PackedRows;

std::vector<OrbitAssertion> configured_assertions(const Lattice& lat) {
  // Co_0 is transitive on the 196560 minimal vectors, and the stabilizer of
  // one of them is transitive on each inner-product level (sizes 1, 4600,
  // 47104, 93150, 47104, 4600, 1).
  if (lat.label == Label::Omega) return {{4, 2}};
  return {};
}

namespace {

using Counts = std::map<CanonicalKey, Integer>;

struct Prefix {
  std::vector<std::uint32_t> pinned;  // shell indices of the fixed columns
  Integer multiplier;
  int tag = 0;  // g12 of the pinned pair, or 0
};

// One scan: the pinned prefix is fixed, the remaining one or two columns run
// over the shell. Returns counts keyed by the exact index matrix.
struct Scan {
  const PackedRows& rows;
  int norm;
  int degree;
  int pin;
  unsigned workers;

  int radius() const { return norm; }
  int span() const { return 2 * norm + 1; }

  // signature of row i against the prefix, as an index in [0, span^pin)
  std::vector<std::uint32_t> signatures(const Prefix& prefix) const {
    std::vector<std::uint32_t> sig(rows.count, 0);
    std::vector<std::int16_t> buf(rows.all.stride);
    std::uint32_t scale = 1;
    for (std::uint32_t v : prefix.pinned) {
      detail::dots(rows.gx(v), rows.all, 0, rows.all.stride, buf.data());
      for (std::size_t i = 0; i < rows.count; ++i)
        sig[i] += static_cast<std::uint32_t>(buf[i] + radius()) * scale;
      scale *= static_cast<std::uint32_t>(span());
    }
    return sig;
  }

  std::vector<int> decode(std::uint32_t s) const {
    std::vector<int> out;
    for (int k = 0; k < pin; ++k) {
      out.push_back(static_cast<int>(s % static_cast<std::uint32_t>(span())) - radius());
      s /= static_cast<std::uint32_t>(span());
    }
    return out;
  }

  std::uint32_t negate(std::uint32_t s) const {
    std::uint32_t out = 0, scale = 1;
    for (int c : decode(s)) {
      out += static_cast<std::uint32_t>(-c + radius()) * scale;
      scale *= static_cast<std::uint32_t>(span());
    }
    return out;
  }

  HalfIntegralMatrix base(const Prefix& prefix) const {
    HalfIntegralMatrix t(degree);
    for (int i = 0; i < degree; ++i) t.set_diag(i, norm / 2);
    if (pin == 2) t.set_doubled(0, 1, prefix.tag);
    return t;
  }

  std::vector<std::pair<HalfIntegralMatrix, Integer>> run(const Prefix& prefix) const {
    const auto sig = signatures(prefix);
    std::vector<std::pair<HalfIntegralMatrix, Integer>> out;
    std::uint32_t buckets = 1;
    for (int k = 0; k < pin; ++k) buckets *= static_cast<std::uint32_t>(span());

    if (degree - pin == 1) {
      std::vector<std::uint64_t> hist(buckets, 0);
      for (auto s : sig) ++hist[s];
      for (std::uint32_t s = 0; s < buckets; ++s) {
        if (!hist[s]) continue;
        HalfIntegralMatrix t = base(prefix);
        auto g = decode(s);
        for (int k = 0; k < pin; ++k) t.set_doubled(k, pin, g[k]);
        out.emplace_back(t, prefix.multiplier * static_cast<unsigned long>(hist[s]));
      }
      return out;
    }

    // Two free columns u (over one of each +-pair) and w (over the shell,
    // grouped by signature so each group is a lane-aligned segment).
    std::vector<std::uint32_t> order(rows.count);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sig[a] < sig[b]; });
    std::vector<std::size_t> ends;
    std::vector<std::uint32_t> group_sig;
    for (std::size_t i = 0; i < order.size(); ++i)
      if (i + 1 == order.size() || sig[order[i + 1]] != sig[order[i]]) {
        ends.push_back(i + 1);
        group_sig.push_back(sig[order[i]]);
      }
    std::vector<std::size_t> starts;
    const detail::ColumnBlock cols = detail::make_columns(rows, order, ends, starts);
    const std::size_t groups = ends.size();

    std::vector<std::uint32_t> reps;
    for (std::uint32_t i = 0; i < rows.count; ++i) {
      const std::int16_t* x = rows.x(i);
      std::size_t k = 0;
      while (k < rows.dim && x[k] == 0) ++k;
      if (k < rows.dim && x[k] > 0) reps.push_back(i);
    }

    const std::size_t cells = static_cast<std::size_t>(buckets) * groups * static_cast<std::size_t>(span());
    const unsigned nw = std::max(1u, workers);
    std::vector<std::vector<std::uint64_t>> half(nw, std::vector<std::uint64_t>(cells, 0));
    auto work = [&](unsigned w) {
      auto& h = half[w];
      const std::size_t r0 = reps.size() * w / nw, r1 = reps.size() * (w + 1) / nw;
      std::vector<std::uint64_t> tmp(4 * static_cast<std::size_t>(span()));
      constexpr std::size_t kTile = 16384;
      for (std::size_t g = 0; g < groups; ++g) {
        const std::size_t seg_begin = starts[g];
        const std::size_t seg_len = ends[g] - (g ? ends[g - 1] : 0);
        const std::size_t seg_end = seg_begin + detail::round_up(seg_len, detail::kLanes);
        const std::uint64_t pad = seg_end - seg_begin - seg_len;
        for (std::size_t t0 = seg_begin; t0 < seg_end; t0 += kTile) {
          const std::size_t t1 = std::min(seg_end, t0 + kTile);
          const std::uint64_t tile_pad = t1 == seg_end ? pad : 0;
          for (std::size_t r = r0; r < r1; r += 4) {
            const std::size_t nq = std::min<std::size_t>(4, r1 - r);
            const std::int16_t* q[4];
            for (std::size_t a = 0; a < nq; ++a) q[a] = rows.gx(reps[r + a]);
            std::fill(tmp.begin(), tmp.end(), 0);
            detail::histogram_block(q, nq, cols, t0, t1, radius(), tmp.data());
            for (std::size_t a = 0; a < nq; ++a) {
              tmp[a * span() + radius()] -= tile_pad;
              const std::size_t cell = (static_cast<std::size_t>(sig[reps[r + a]]) * groups + g) * span();
              for (int c = 0; c < span(); ++c) h[cell + c] += tmp[a * span() + c];
            }
          }
        }
      }
    };
    if (nw == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < nw; ++w) pool.emplace_back(work, w);
      for (auto& th : pool) th.join();
    }
    for (unsigned w = 1; w < nw; ++w)
      for (std::size_t i = 0; i < cells; ++i) half[0][i] += half[w][i];
    const auto& h = half[0];

    for (std::uint32_t s = 0; s < buckets; ++s) {
      const std::uint32_t ns = negate(s);
      const auto gu = decode(s);
      for (std::size_t g = 0; g < groups; ++g) {
        const auto gw = decode(group_sig[g]);
        for (int c = 0; c < span(); ++c) {
          // u runs over reps; -u has signature -s and inner product -c
          const std::uint64_t n = h[(s * groups + g) * span() + c] + h[(ns * groups + g) * span() + (span() - 1 - c)];
          if (!n) continue;
          HalfIntegralMatrix t = base(prefix);
          for (int k = 0; k < pin; ++k) {
            t.set_doubled(k, pin, gu[k]);
            t.set_doubled(k, pin + 1, gw[k]);
          }
          t.set_doubled(pin, pin + 1, c - radius());
          out.emplace_back(t, prefix.multiplier * static_cast<unsigned long>(n));
        }
      }
    }
    return out;
  }
};

void merge(Counts& into, const CanonicalKey& key, const Integer& value) {
  auto [it, fresh] = into.try_emplace(key, value);
  if (!fresh && it->second != value)
    throw Error("census inconsistency at " + key.str() + ": " + it->second.get_str() + " vs " + value.get_str() +
                " (orbit representatives do not cover the shell uniformly)");
}

}  // namespace

std::map<CanonicalKey, Integer> shell_census(const CountingContext& ctx, int norm, int degree, int pin_depth,
                                             const CountOptions& opts) {
  if (degree < 1 || degree > HalfIntegralMatrix::kMaxDegree) throw InvalidArgument("census degree must be 1..4");
  if (pin_depth < 0 || pin_depth > 2 || degree - pin_depth < 1 || degree - pin_depth > 2)
    throw InvalidArgument("census needs 1 or 2 free columns and at most 2 pinned");
  if (norm <= 0 || norm % 2) throw InvalidArgument("census norm must be even and positive");
  const PackedRows& rows = ctx.rows(norm);
  Counts result;
  if (rows.count == 0) return result;

  const Integer shell = static_cast<unsigned long>(rows.count);
  std::vector<Prefix> prefixes;
  if (pin_depth == 0) prefixes.push_back({{}, Integer(1), 0});
  if (pin_depth == 1) prefixes.push_back({{0}, shell, 0});
  if (pin_depth == 2) {
    std::vector<std::int16_t> buf(rows.all.stride);
    detail::dots(rows.gx(0), rows.all, 0, rows.all.stride, buf.data());
    for (int c = 0; c < norm; ++c) {
      std::uint32_t first = 0;
      unsigned long level = 0;
      for (std::uint32_t i = 0; i < rows.count; ++i)
        if (buf[i] == c && level++ == 0) first = i;
      if (level) prefixes.push_back({{0, first}, shell * level, c});
    }
  }

  std::ostringstream header;
  header << "thetacensus;format=1;gramhash=" << ctx.lattice().gram.hash() << ";norm=" << norm << ";degree=" << degree
         << ";pin=" << pin_depth;
  std::map<int, Counts> done;
  if (opts.checkpoint) {
    std::ifstream in(*opts.checkpoint);
    std::string line;
    std::map<int, Counts> partial;
    if (in && std::getline(in, line) && line == header.str()) {
      while (std::getline(in, line)) {
        int tag = 0;
        char key[96] = {}, count[128] = {};
        if (std::sscanf(line.c_str(), "prefix=%d;key=%95[^;];count=%127s", &tag, key, count) == 3)
          partial[tag][CanonicalKey::parse(key)] = Integer(count);
        else if (std::sscanf(line.c_str(), "done=%d", &tag) == 1)
          done[tag] = std::move(partial[tag]);
      }
    } else {
      if (opts.checkpoint->has_parent_path()) std::filesystem::create_directories(opts.checkpoint->parent_path());
      std::ofstream(*opts.checkpoint, std::ios::trunc) << header.str() << "\n";
    }
  }

  Scan scan{rows, norm, degree, pin_depth, opts.workers};
  for (const Prefix& prefix : prefixes) {
    auto hit = done.find(prefix.tag);
    if (hit != done.end()) {
      for (const auto& [key, value] : hit->second) merge(result, key, value);
      continue;
    }
    Counts local;
    for (const auto& [t, value] : scan.run(prefix)) merge(local, canonical_key(t), value);
    if (opts.checkpoint) {
      std::ofstream out(*opts.checkpoint, std::ios::app);
      for (const auto& [key, value] : local)
        out << "prefix=" << prefix.tag << ";key=" << key.str() << ";count=" << value.get_str() << "\n";
      out << "done=" << prefix.tag << "\n" << std::flush;
    }
    for (const auto& [key, value] : local) merge(result, key, value);
  }
  return result;
}

}  // namespace thetacong
