#include <chrono>
#include <fstream>

#include "json.hpp"

#include "thetacong/errors.hpp"
#include "thetacong/theta.hpp"

namespace thetacong {

// ---- ledger ----------------------------------------------------------------

namespace {

CountRecord record_from_json(const nlohmann::json& j) {
  CountRecord r;
  r.lattice = j.at("lattice").get<std::string>();
  r.key = j.at("key").get<std::string>();
  r.coeff = Integer(j.at("coeff").get<std::string>());
  r.d_t = Integer(j.at("d_T").get<std::string>());
  r.wall_time = j.at("wall_time").get<double>();
  r.method = j.at("method").get<std::string>();
  r.partitions = j.at("partitions").get<unsigned>();
  return r;
}

nlohmann::json record_to_json(const CountRecord& r) {
  // big integers travel as decimal strings
  return {{"lattice", r.lattice}, {"key", r.key},           {"coeff", r.coeff.get_str()},
          {"d_T", r.d_t.get_str()}, {"wall_time", r.wall_time}, {"method", r.method},
          {"partitions", r.partitions}};
}

}  // namespace

CountLedger::CountLedger(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      CountRecord r = record_from_json(nlohmann::json::parse(line));
      index_[{r.lattice, r.key}] = r;
    } catch (const std::exception& e) {
      throw CorruptCache(path_.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

const CountRecord* CountLedger::find(const std::string& lattice, const CanonicalKey& key) const {
  auto it = index_.find({lattice, key.str()});
  return it == index_.end() ? nullptr : &it->second;
}

void CountLedger::append(const CountRecord& record) {
  auto it = index_.find({record.lattice, record.key});
  if (it != index_.end()) {
    if (it->second.coeff != record.coeff)
      throw Error("ledger conflict for " + record.lattice + " " + record.key + ": " + it->second.coeff.get_str() +
                  " vs " + record.coeff.get_str());
    return;
  }
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  out << record_to_json(record).dump() << "\n" << std::flush;
  if (!out) throw Error("cannot write ledger " + path_.string());
  index_[{record.lattice, record.key}] = record;
}

std::vector<CountRecord> CountLedger::records() const {
  std::vector<CountRecord> out;
  for (const auto& [k, r] : index_) out.push_back(r);
  return out;
}

// ---- engine ----------------------------------------------------------------

struct ThetaEngine::LatticeState {
  Lattice lat;
  VectorList vectors;
  std::unique_ptr<CountingContext> ctx;
  std::map<int, std::map<CanonicalKey, Integer>> census;  // by degree
};

ThetaEngine::ThetaEngine(EngineConfig config) : config_(std::move(config)) {
  if (config_.ledger) ledger_ = std::make_unique<CountLedger>(*config_.ledger);
}

ThetaEngine::~ThetaEngine() = default;

ThetaEngine::LatticeState& ThetaEngine::state(const Lattice& lat, int bound) {
  auto& slot = states_[lat.name + "/" + lat.gram.hash()];
  if (!slot) {
    slot = std::make_unique<LatticeState>();
    slot->lat = lat;
    slot->vectors.bound = -1;
  }
  if (slot->vectors.bound < bound) {
    slot->ctx.reset();
    slot->vectors = load_or_enumerate(slot->lat, bound, config_.cache_dir);
    slot->ctx = std::make_unique<CountingContext>(slot->lat, slot->vectors);
  }
  return *slot;
}

const VectorList& ThetaEngine::vectors(const Lattice& lat, int bound) { return state(lat, bound).vectors; }

namespace {

std::string file_safe(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '|') c = '_';
  return s;
}

}  // namespace

Integer ThetaEngine::compute(const Lattice& lat, const HalfIntegralMatrix& r) {
  LatticeState& st = state(lat, 2 * r.max_diag());
  const int n = r.degree();

  if (config_.use_orbits) {
    for (const OrbitAssertion& a : configured_assertions(lat)) {
      bool uniform = n >= 2;
      for (int i = 0; i < n; ++i) uniform = uniform && 2 * r.diag(i) == a.norm;
      const int pin = std::min(a.depth, n - 1);
      if (!uniform || n - pin > 2) continue;
      auto it = st.census.find(n);
      if (it == st.census.end()) {
        CountOptions opts = config_.count;
        opts.checkpoint.reset();
        if (config_.checkpoint_dir)
          opts.checkpoint = *config_.checkpoint_dir / (lat.name + "-census-n" + std::to_string(n) + ".ckpt");
        it = st.census.emplace(n, shell_census(*st.ctx, a.norm, n, pin, opts)).first;
      }
      last_method_ = "census-pin" + std::to_string(pin);
      auto hit = it->second.find(canonical_key(r));
      return hit == it->second.end() ? Integer(0) : hit->second;
    }
  }

  CountOptions opts = config_.count;
  opts.checkpoint.reset();
  if (config_.checkpoint_dir)
    opts.checkpoint = *config_.checkpoint_dir / (lat.name + "-" + file_safe(canonical_key(r).str()) + ".ckpt");
  last_method_ = "backtrack";
  return representation_count(*st.ctx, r, opts);
}

Integer ThetaEngine::coefficient(const Lattice& lat, const HalfIntegralMatrix& t) {
  if (!is_positive_semidefinite(t)) throw InvalidArgument("index is not positive semidefinite: " + t.to_string());
  const CanonicalKey key = canonical_key(t);
  if (ledger_) {
    if (const CountRecord* r = ledger_->find(lat.name, key)) {
      last_method_ = "ledger";
      return r->coeff;
    }
  }
  const auto start = std::chrono::steady_clock::now();
  const HalfIntegralMatrix reduced = reduce_index(t);
  Integer value;
  if (reduced.is_zero()) {
    last_method_ = "trivial";
    value = 1;
  } else {
    value = compute(lat, reduced);
  }
  if (ledger_) {
    CountRecord rec;
    rec.lattice = lat.name;
    rec.key = key.str();
    rec.coeff = value;
    rec.d_t = discriminant(t);
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.method = last_method_;
    rec.partitions = std::max(1u, config_.count.partitions);
    ledger_->append(rec);
  }
  return value;
}

QExpansion ThetaEngine::theta_block(const Lattice& lat, int degree, int bound) {
  QExpansion q(degree, bound, lat.name);
  for (const CanonicalKey& key : psd_classes(degree, bound)) q.set(key, coefficient(lat, key.matrix()));
  return q;
}

// ---- automorphisms -----------------------------------------------------------

Integer aut_order(const EvenGram& g) {
  const std::size_t r = g.rank();
  if (r == 0 || r > 8) throw InvalidArgument("aut_order supports rank 1..8");
  std::int64_t top = 0;
  for (std::size_t i = 0; i < r; ++i) top = std::max(top, g(i, i));
  const Lattice lat = make_lattice("aut", g);
  const VectorList vl = enumerate_short(lat, static_cast<int>(top));

  auto inner = [&](const std::int32_t* a, const std::int32_t* b) {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) s += a[i] * g(i, j) * b[j];
    return s;
  };
  // images of e_0..e_{r-1}, each drawn from the shell of norm g(i,i)
  std::vector<const Shell*> shells(r);
  for (std::size_t i = 0; i < r; ++i) {
    shells[i] = vl.shell(static_cast<int>(g(i, i)));
    if (!shells[i] || shells[i]->size() == 0) throw ShellMissing("basis norm shell missing");
  }
  std::vector<const std::int32_t*> image(r);
  std::uint64_t count = 0;
  auto extend = [&](auto&& self, std::size_t i) -> void {
    if (i == r) {
      ++count;
      return;
    }
    const Shell& sh = *shells[i];
    for (std::size_t k = 0; k < sh.size(); ++k) {
      const std::int32_t* v = sh.coords.data() + k * r;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) ok = inner(image[j], v) == g(j, i);
      if (!ok) continue;
      image[i] = v;
      self(self, i + 1);
    }
  };
  extend(extend, 0);
  return Integer(static_cast<unsigned long>(count));
}

}  // namespace thetacong
