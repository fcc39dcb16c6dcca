#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "packed_shell.hpp"
#include "thetacong/errors.hpp"
#include "thetacong/theta.hpp"

namespace thetacong {

using detail::ColumnBlock;
using detail::PackedRows;

CountingContext::CountingContext(const Lattice& lat, const VectorList& vectors) : lat_(lat), vectors_(vectors) {
  if (vectors.gram_hash != lat.gram.hash()) throw InvalidArgument("vector list belongs to another lattice");
  for (const auto& [norm, shell] : vectors.shells)
    rows_.emplace(norm, std::make_unique<PackedRows>(detail::pack_shell(lat, shell)));
}

CountingContext::~CountingContext() = default;

const PackedRows& CountingContext::rows(int norm) const {
  auto it = rows_.find(norm);
  if (it == rows_.end())
    throw ShellMissing("shell of norm " + std::to_string(norm) + " not enumerated for " + lat_.name +
                       " (bound " + std::to_string(vectors_.bound) + ")");
  return *it->second;
}

std::size_t CountingContext::shell_size(int norm) const { return rows(norm).count; }

double CountingContext::inner_product_share(int norm, int other, int c) const {
  const PackedRows& a = rows(norm);
  const PackedRows& b = rows(other);
  if (a.count == 0 || b.count == 0) return 0.0;
  std::lock_guard lock(share_mutex_);
  auto [it, fresh] = shares_.try_emplace({norm, other});
  if (fresh) {
    const std::int16_t* u = b.gx(0);
    for (std::size_t i = 0; i < a.count; ++i) it->second[detail::dot(u, a.x(i), a.dim)] += 1.0;
    for (auto& [value, share] : it->second) share /= static_cast<double>(a.count);
  }
  auto hit = it->second.find(c);
  return hit == it->second.end() ? 0.0 : hit->second;
}

std::vector<int> column_order(const CountingContext& ctx, const HalfIntegralMatrix& t, std::optional<int> first_norm) {
  const int n = t.degree();
  std::vector<int> order;
  std::vector<bool> used(n, false);
  // log of the expected number of candidates for column j given `order`
  auto expected = [&](int j) {
    const int nj = 2 * t.diag(j);
    double v = std::log(static_cast<double>(std::max<std::size_t>(ctx.shell_size(nj), 1)));
    for (int i : order) v += std::log(std::max(ctx.inner_product_share(nj, 2 * t.diag(i), t.doubled(i, j)), 1e-300));
    return v;
  };
  // a first column is judged by how hard it squeezes its best follower
  auto lookahead = [&](int i) {
    order.push_back(i);
    double best = 1e300;
    for (int j = 0; j < n; ++j)
      if (!used[j] && j != i) best = std::min(best, expected(j));
    order.pop_back();
    return best;
  };
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    double pick_score = 0;
    for (int j = 0; j < n; ++j) {
      if (used[j]) continue;
      if (step == 0 && first_norm && 2 * t.diag(j) != *first_norm) continue;
      const double score = step == 0 ? lookahead(j) : expected(j);
      const bool better = pick < 0 || t.diag(j) > t.diag(pick) ||
                          (t.diag(j) == t.diag(pick) && score < pick_score - 1e-9);
      if (better) pick = j, pick_score = score;
    }
    if (pick < 0) throw InvalidArgument("no column of norm " + std::to_string(*first_norm) + " in " + t.to_string());
    used[pick] = true;
    order.push_back(pick);
  }
  return order;
}

HalfIntegralMatrix reduce_index(const HalfIntegralMatrix& t) {
  std::vector<int> keep;
  for (int j = 0; j < t.degree(); ++j) {
    if (t.diag(j) == 0) continue;
    bool parallel = false;
    for (int i : keep)
      if (t.diag(i) == t.diag(j) && std::abs(t.doubled(i, j)) == 2 * t.diag(i)) parallel = true;
    if (!parallel) keep.push_back(j);
  }
  if (keep.empty()) return HalfIntegralMatrix(1);  // T = 0; callers check is_zero()
  HalfIntegralMatrix r(static_cast<int>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a) {
    r.set_diag(static_cast<int>(a), t.diag(keep[a]));
    for (std::size_t b = a + 1; b < keep.size(); ++b)
      r.set_doubled(static_cast<int>(a), static_cast<int>(b), t.doubled(keep[a], keep[b]));
  }
  return r;
}

namespace {

using u128 = unsigned __int128;

Integer to_integer(u128 v) {
  Integer hi(static_cast<unsigned long>(static_cast<std::uint64_t>(v >> 64)));
  Integer lo(static_cast<unsigned long>(static_cast<std::uint64_t>(v)));
  return (hi << 64) + lo;
}

// Lists below this size are filtered row by row instead of through columns.
constexpr std::size_t kColumnThreshold = 256;

struct Plan {
  int n = 0;
  std::vector<int> order;
  std::vector<const PackedRows*> rows;                // per level
  std::vector<std::vector<std::int16_t>> target;      // target[l][m], l < m
  bool pinned = false;
};

Plan make_plan(const CountingContext& ctx, const HalfIntegralMatrix& t, std::optional<int> pin_norm) {
  if (!is_positive_semidefinite(t)) throw InvalidArgument("index is not positive semidefinite: " + t.to_string());
  Plan p;
  p.n = t.degree();
  for (int j = 0; j < p.n; ++j) ctx.rows(2 * t.diag(j));  // ShellMissing before anything else
  p.order = column_order(ctx, t, pin_norm);
  p.pinned = pin_norm.has_value();
  p.target.assign(p.n, std::vector<std::int16_t>(p.n, 0));
  for (int l = 0; l < p.n; ++l) {
    p.rows.push_back(&ctx.rows(2 * t.diag(p.order[l])));
    for (int m = l + 1; m < p.n; ++m) p.target[l][m] = static_cast<std::int16_t>(t.doubled(p.order[l], p.order[m]));
  }
  return p;
}

class Search {
public:
  Search(const Plan& plan, std::atomic<std::uint64_t>& nodes, std::uint64_t budget, std::atomic<bool>& stop)
      : plan_(plan), nodes_(nodes), budget_(budget), stop_(stop) {
    lists_.assign(plan.n, std::vector<std::vector<std::uint32_t>>(plan.n));
    dots_.resize(plan.n);
  }

  u128 run(std::size_t begin, std::size_t end) {
    const int n = plan_.n;
    if (n == 1) return end - begin;
    u128 total = 0;
    for (std::size_t i = begin; i < end && !stop_; ++i) total += choose(0, static_cast<std::uint32_t>(i));
    flush();
    return total;
  }

  bool aborted() const { return stop_; }

private:
  void tick() {
    if (++local_ == 4096) flush();
  }

  void flush() {
    const std::uint64_t seen = nodes_.fetch_add(local_) + local_;
    local_ = 0;
    if (budget_ && seen > budget_) stop_ = true;
  }

  // Candidates of level m consistent with levels < d are the full shell at
  // d == 0, lists_[d][m] otherwise.
  u128 choose(int d, std::uint32_t v) {
    tick();
    const int n = plan_.n;
    const std::int16_t* gv = plan_.rows[d]->gx(v);
    if (d == n - 2) return count_last(d, gv);
    for (int m = d + 1; m < n; ++m) {
      filter(d, m, gv);
      if (lists_[d + 1][m].empty()) return 0;
    }
    if (d + 1 == n - 2) prepare_last(d + 1);
    u128 total = 0;
    for (std::uint32_t w : lists_[d + 1][d + 1]) {
      if (stop_) break;
      total += choose(d + 1, w);
    }
    return total;
  }

  void filter(int d, int m, const std::int16_t* gv) {
    const PackedRows& rows = *plan_.rows[m];
    const std::int16_t target = plan_.target[d][m];
    auto& out = lists_[d + 1][m];
    out.clear();
    if (d == 0) {
      auto& buf = dots_[m];
      buf.resize(rows.all.stride);
      detail::dots(gv, rows.all, 0, rows.all.stride, buf.data());
      for (std::size_t i = 0; i < rows.count; ++i)
        if (buf[i] == target) out.push_back(static_cast<std::uint32_t>(i));
      return;
    }
    for (std::uint32_t w : lists_[d][m])
      if (detail::dot(gv, rows.x(w), rows.dim) == target) out.push_back(w);
  }

  void prepare_last(int d) {
    const auto& list = lists_[d][plan_.n - 1];
    if (list.size() < kColumnThreshold) return;
    std::vector<std::size_t> starts;
    last_cols_ = detail::make_columns(*plan_.rows[plan_.n - 1], list, {list.size()}, starts);
  }

  u128 count_last(int d, const std::int16_t* gv) {
    const int last = plan_.n - 1;
    const PackedRows& rows = *plan_.rows[last];
    const std::int16_t target = plan_.target[d][last];
    if (d == 0) {
      const std::uint64_t pad = rows.all.stride - rows.count;
      std::uint64_t hits = detail::count_equal(gv, rows.all, 0, rows.all.stride, target);
      return target == 0 ? hits - pad : hits;
    }
    const auto& list = lists_[d][last];
    if (list.size() >= kColumnThreshold) {
      const std::uint64_t pad = last_cols_.stride - list.size();
      std::uint64_t hits = detail::count_equal(gv, last_cols_, 0, last_cols_.stride, target);
      return target == 0 ? hits - pad : hits;
    }
    std::uint64_t hits = 0;
    for (std::uint32_t w : list) hits += detail::dot(gv, rows.x(w), rows.dim) == target;
    return hits;
  }

  const Plan& plan_;
  std::atomic<std::uint64_t>& nodes_;
  std::uint64_t budget_;
  std::atomic<bool>& stop_;
  std::uint64_t local_ = 0;
  std::vector<std::vector<std::vector<std::uint32_t>>> lists_;
  std::vector<std::vector<std::int16_t>> dots_;
  ColumnBlock last_cols_;
};

std::string task_header(const CountingContext& ctx, const HalfIntegralMatrix& t, const Plan& plan,
                        unsigned partitions) {
  std::ostringstream os;
  os << "thetacount;format=1;gramhash=" << ctx.lattice().gram.hash() << ";index=" << t.to_string() << ";order=";
  for (int j : plan.order) os << j;
  os << ";pinned=" << (plan.pinned ? 1 : 0) << ";partitions=" << partitions;
  return os.str();
}

std::map<unsigned, Integer> read_checkpoint(const std::filesystem::path& path, const std::string& header) {
  std::map<unsigned, Integer> done;
  std::ifstream in(path);
  std::string line;
  if (!in || !std::getline(in, line) || line != header) return done;
  while (std::getline(in, line)) {
    unsigned part = 0;
    char count[128] = {};
    if (std::sscanf(line.c_str(), "partition=%u;count=%127s", &part, count) == 2) done[part] = Integer(count);
  }
  return done;
}

Integer run_count(const CountingContext& ctx, const HalfIntegralMatrix& t, const CountOptions& opts,
                  std::optional<int> pin_norm) {
  const Plan plan = make_plan(ctx, t, pin_norm);
  for (const PackedRows* r : plan.rows)
    if (r->count == 0) return 0;  // some column has nowhere to go
  const std::size_t top = plan.pinned ? (plan.rows[0]->count ? 1 : 0) : plan.rows[0]->count;
  const unsigned parts = std::max(1u, opts.partitions);

  std::map<unsigned, Integer> done;
  std::ofstream journal;
  std::mutex journal_mutex;
  if (opts.checkpoint) {
    const std::string header = task_header(ctx, t, plan, parts);
    done = read_checkpoint(*opts.checkpoint, header);
    if (done.empty()) {
      if (opts.checkpoint->has_parent_path()) std::filesystem::create_directories(opts.checkpoint->parent_path());
      std::ofstream(*opts.checkpoint, std::ios::trunc) << header << "\n";
    }
    journal.open(*opts.checkpoint, std::ios::app);
  }

  std::vector<Integer> partial(parts);
  std::vector<bool> finished(parts, false);
  for (auto& [p, c] : done)
    if (p < parts) partial[p] = c, finished[p] = true;

  std::atomic<std::uint64_t> nodes{0};
  std::atomic<bool> stop{false};
  std::atomic<unsigned> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    Search search(plan, nodes, opts.node_budget, stop);
    while (!stop) {
      const unsigned p = next++;
      if (p >= parts) break;
      if (finished[p]) continue;
      try {
        const std::size_t begin = top * p / parts;
        const std::size_t end = top * (p + 1) / parts;
        const u128 c = search.run(begin, end);
        if (search.aborted()) break;
        partial[p] = to_integer(c);
        finished[p] = true;
        if (journal.is_open()) {
          std::lock_guard lock(journal_mutex);
          journal << "partition=" << p << ";count=" << partial[p].get_str() << "\n" << std::flush;
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    }
  };

  const unsigned nworkers = std::max(1u, std::min(opts.workers, parts));
  if (nworkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  if (stop || std::find(finished.begin(), finished.end(), false) != finished.end())
    throw BudgetExceeded("node budget of " + std::to_string(opts.node_budget) + " exhausted counting " +
                         t.to_string() + (opts.checkpoint ? "; completed partitions are checkpointed" : ""));

  Integer total = 0;
  for (const auto& c : partial) total += c;
  if (plan.pinned) total *= static_cast<unsigned long>(plan.rows[0]->count);
  return total;
}

}  // namespace

Integer representation_count(const CountingContext& ctx, const HalfIntegralMatrix& t, const CountOptions& opts) {
  return run_count(ctx, t, opts, std::nullopt);
}

Integer representation_count(const Lattice& lat, const VectorList& vectors, const HalfIntegralMatrix& t,
                             const CountOptions& opts) {
  CountingContext ctx(lat, vectors);
  return representation_count(ctx, t, opts);
}

Integer orbit_factored_count(const CountingContext& ctx, const HalfIntegralMatrix& t, int transitive_norm,
                             const CountOptions& opts) {
  return run_count(ctx, t, opts, transitive_norm);
}

}  // namespace thetacong
