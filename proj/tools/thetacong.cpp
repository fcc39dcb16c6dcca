// Command-line front end: build, lattice export, coeff, table, verify, export, cache.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "thetacong/congruence.hpp"
#include "thetacong/errors.hpp"
#include "thetacong/lattice.hpp"
#include "thetacong/short_vectors.hpp"
#include "thetacong/tables.hpp"
#include "thetacong/theta.hpp"

namespace fs = std::filesystem;
using namespace thetacong;
using json = nlohmann::json;

namespace {

enum Exit { kPass = 0, kUsage = 1, kInvariant = 2, kBudget = 3, kCache = 4 };

struct RunConfig {
  fs::path cache_dir;
  unsigned workers = 1;
  double budget = 0;
  std::string format = "text";
  int verbosity = 0;

  EngineConfig engine() const {
    EngineConfig c;
    c.cache_dir = cache_dir / "shells";
    c.ledger = cache_dir / "counts.jsonl";
    c.checkpoint_dir = cache_dir / "checkpoints";
    c.count.workers = workers;
    c.count.partitions = std::max(16u, 4 * workers);
    c.count.node_budget = static_cast<std::uint64_t>(budget);
    return c;
  }
};

fs::path default_cache_dir() {
  if (const char* env = std::getenv("THETA_CACHE_DIR"); env && *env) return env;
  return "theta-cache";
}

std::vector<int> parse_ints(const std::string& text, char sep = ',') {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    std::size_t used = 0;
    int v = std::stoi(item, &used);
    if (used != item.size()) throw InvalidArgument("not an integer: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

// --t: degree 1 "a"; degree 2 binary "a,b,c"; degree 3 ternary "a,b,c:d,e,f";
// degree 4 the ten-tuple of --ozeki.
HalfIntegralMatrix parse_index(int degree, const std::string& t, const std::string& ozeki) {
  if (!ozeki.empty()) {
    if (degree != 4) throw InvalidArgument("--ozeki needs --deg 4");
    return decode_notation("ozeki4", parse_ints(ozeki));
  }
  if (t.empty()) throw InvalidArgument("give --t or --ozeki");
  std::string flat = t;
  for (char& c : flat)
    if (c == ':' || c == ';') c = ',';
  const auto v = parse_ints(flat);
  switch (degree) {
    case 1: {
      if (v.size() != 1) throw InvalidArgument("degree 1 index is a single integer");
      HalfIntegralMatrix m(1);
      m.set_diag(0, v[0]);
      if (v[0] < 0) throw InvalidArgument("diagonal entries must be >= 0");
      return m;
    }
    case 2: return decode_notation("binary", v);
    case 3: return decode_notation("ternary", v);
    case 4: return decode_notation("ozeki4", v);
    default: throw InvalidArgument("degree must be 1..4");
  }
}

void emit(const RunConfig& rc, const json& j, const std::string& text) {
  if (rc.format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

int cmd_build(const RunConfig& rc, const std::string& label_text) {
  const Label label = parse_label(label_text);
  const Lattice lat = build_lattice(label);
  const VectorList vl = load_or_enumerate(lat, 4, rc.cache_dir / "shells");
  int min_norm = 0;
  for (const auto& [norm, shell] : vl.shells)
    if (norm > 0 && shell.size() > 0) {
      min_norm = norm;
      break;
    }
  const std::size_t roots = vl.count(2);
  bool ok = true;
  if (lat.coxeter) ok = roots == 24u * static_cast<unsigned>(*lat.coxeter);

  const fs::path gram_file = rc.cache_dir / "grams" / (lat.name + ".gram");
  fs::create_directories(gram_file.parent_path());
  std::ofstream(gram_file) << to_string(lat.gram.to_int()) << "\n";

  json j = {{"label", lat.name},
            {"rank", lat.rank()},
            {"det", lat.gram.det().get_si()},
            {"even", true},
            {"gram_hash", lat.gram.hash()},
            {"roots", roots},
            {"norm4", vl.count(4)},
            {"min_norm", min_norm},
            {"min_count", min_norm ? vl.count(min_norm) : 0},
            {"construction", lat.construction.description},
            {"gram_file", gram_file.string()},
            {"invariants", ok ? "pass" : "fail"}};
  if (lat.coxeter) j["coxeter"] = *lat.coxeter;
  std::ostringstream os;
  os << "lattice " << lat.name << " (" << lat.construction.description << ")\n"
     << "rank=" << lat.rank() << "\ndet=" << lat.gram.det() << "\neven=yes\n";
  if (lat.coxeter) os << "coxeter=" << *lat.coxeter << "\n";
  os << "roots=" << roots << "\nnorm4=" << vl.count(4) << "\n";
  if (min_norm) os << "min" << min_norm << "=" << vl.count(min_norm) << "\n";
  os << "gram written to " << gram_file.string() << "\n";
  if (!ok) os << "root count differs from 24h\n";
  emit(rc, j, os.str());
  return ok ? kPass : kInvariant;
}

int cmd_lattice_export(const RunConfig& rc, const std::string& label_text) {
  const Lattice lat = build_lattice(parse_label(label_text));
  const std::size_t r = lat.rank();
  if (rc.format == "csv") {
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) std::cout << lat.gram(i, j) << (j + 1 == r ? "\n" : ",");
    return kPass;
  }
  json gram = json::array();
  for (std::size_t i = 0; i < r; ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < r; ++j) row.push_back(lat.gram(i, j));
    gram.push_back(std::move(row));
  }
  json j = {{"label", lat.name}, {"rank", r}, {"det", lat.gram.det().get_si()}, {"gram", gram}};
  j["coxeter"] = lat.coxeter ? json(*lat.coxeter) : json(nullptr);
  if (rc.format == "json") {
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "# " << lat.name << " rank " << r << " det " << lat.gram.det() << "\n"
              << to_string(lat.gram.to_int()) << "\n";
  }
  return kPass;
}

int cmd_coeff(const RunConfig& rc, const std::string& lat_text, int degree, const std::string& t,
              const std::string& ozeki) {
  const HalfIntegralMatrix index = parse_index(degree, t, ozeki);
  const Lattice lat = build_lattice(parse_label(lat_text));
  ThetaEngine engine(rc.engine());
  const Integer value = engine.coefficient(lat, index);
  const Integer d = discriminant(index);
  json j = {{"lattice", lat.name},      {"degree", degree},   {"index", index.to_string()},
            {"key", canonical_key(index).str()}, {"d_T", d.get_str()}, {"coeff", value.get_str()},
            {"method", engine.last_method()}};
  std::ostringstream os;
  os << "a(theta_" << lat.name << "^(" << degree << "); " << index.to_string() << ") = " << value << "\n"
     << "d_T = " << d << "\nmethod: " << engine.last_method() << "\n";
  emit(rc, j, os.str());
  return kPass;
}

int cmd_table(const RunConfig& rc, const std::string& id, const std::string& rows_text) {
  std::vector<std::string> rows;
  std::stringstream ss(rows_text);
  for (std::string r; std::getline(ss, r, ',');)
    if (!r.empty()) rows.push_back(r);
  ThetaEngine engine(rc.engine());
  const TableReport report = reproduce_table(engine, id, rows);
  if (rc.format == "json")
    std::cout << report.to_json() << "\n";
  else if (rc.format == "csv")
    std::cout << report.to_csv();
  else
    std::cout << report.to_text();
  return report.pass() ? kPass : kInvariant;
}

int cmd_verify(const RunConfig& rc, const std::string& claim) {
  ThetaEngine engine(rc.engine());
  CongruenceReport report;
  if (claim == "thm3.1.i")
    report = verify_theorem_3_1(engine, 1);
  else if (claim == "thm3.1.ii")
    report = verify_theorem_3_1(engine, 2);
  else if (claim == "thm3.1.iii")
    report = verify_theorem_3_1(engine, 3);
  else if (claim == "thm4.1")
    report = verify_theorem_4_1(engine);
  else if (claim == "obs-mod7")
    report = verify_observation(engine, "mod7");
  else if (claim == "obs-mod49")
    report = verify_observation(engine, "mod49");
  else if (claim == "intro-mod23")
    report = verify_observation(engine, "mod23");
  else
    throw InvalidArgument("unknown claim '" + claim + "'");

  const fs::path dir = rc.cache_dir / "reports";
  fs::create_directories(dir);
  std::ofstream(dir / (claim + ".json")) << report.to_json() << "\n";
  std::ofstream(dir / (claim + ".txt")) << report.to_text();
  if (rc.format == "json")
    std::cout << report.to_json() << "\n";
  else
    std::cout << report.to_text() << "report written to " << (dir / (claim + ".json")).string() << "\n";
  return report.pass() ? kPass : kInvariant;
}

int cmd_export(const RunConfig& rc, const std::string& lat_text, int degree, int bound) {
  const Lattice lat = build_lattice(parse_label(lat_text));
  ThetaEngine engine(rc.engine());
  const QExpansion q = engine.theta_block(lat, degree, bound);
  if (rc.format == "csv") {
    std::cout << "lattice,degree,key,d_T,coeff\n";
    for (const auto& [key, value] : q.coefficients())
      std::cout << lat.name << "," << degree << ",\"" << key.str() << "\"," << discriminant(key.matrix()) << ","
                << value << "\n";
    return kPass;
  }
  json j = {{"lattice", lat.name}, {"degree", degree}, {"box", bound}};
  auto& arr = j["coefficients"] = json::array();
  for (const auto& [key, value] : q.coefficients())
    arr.push_back({{"key", key.str()}, {"d_T", discriminant(key.matrix()).get_str()}, {"coeff", value.get_str()}});
  if (rc.format == "json")
    std::cout << j.dump(2) << "\n";
  else
    std::cout << q.serialize();
  return kPass;
}

int cmd_cache(const RunConfig& rc, const std::string& action, const std::string& lat_text, int bound) {
  const fs::path shells = rc.cache_dir / "shells";
  if (action == "list") {
    json j = json::array();
    std::ostringstream os;
    if (fs::exists(rc.cache_dir))
      for (const auto& e : fs::recursive_directory_iterator(rc.cache_dir))
        if (e.is_regular_file()) {
          j.push_back({{"path", e.path().string()}, {"bytes", e.file_size()}});
          os << e.file_size() << "\t" << e.path().string() << "\n";
        }
    emit(rc, j, os.str());
    return kPass;
  }
  if (action == "clear") {
    const auto removed = fs::exists(rc.cache_dir) ? fs::remove_all(rc.cache_dir) : 0;
    std::cout << "removed " << removed << " entries from " << rc.cache_dir.string() << "\n";
    return kPass;
  }
  if (action == "warm") {
    const Lattice lat = build_lattice(parse_label(lat_text));
    const VectorList vl = load_or_enumerate(lat, bound, shells);
    std::cout << lat.name << ": " << vl.total() << " vectors of norm <= " << bound << " cached in "
              << cache_path(shells, lat.name).string() << "\n";
    return kPass;
  }
  if (action == "check") {
    const Lattice lat = build_lattice(parse_label(lat_text));
    const VectorList vl = cache_load(shells, lat, bound);
    std::cout << lat.name << ": cache ok, " << vl.total() << " vectors of norm <= " << bound << "\n";
    return kPass;
  }
  throw InvalidArgument("cache action must be list, clear, warm or check");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Siegel theta coefficients of Niemeier lattices and quaternary forms, with congruence checks"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  RunConfig rc;
  std::string cache_dir = default_cache_dir().string();
  app.add_option("--cache-dir", cache_dir, "cache root (default $THETA_CACHE_DIR or ./theta-cache)");
  app.add_option("--workers", rc.workers, "worker threads for counting")->check(CLI::PositiveNumber);
  app.add_option("--budget", rc.budget, "search-node budget per count, 0 = unlimited (accepts 1e12)")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--format", rc.format, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_flag("-v,--verbose", rc.verbosity, "more output");

  std::string label, lat, t, ozeki, id, rows, claim, action;
  int degree = 0, bound = 0;

  auto* build = app.add_subcommand("build", "construct a lattice and print its invariants");
  build->add_option("--label", label, "lattice label")->required();

  auto* lattice = app.add_subcommand("lattice", "lattice data");
  lattice->require_subcommand(1);
  lattice->fallthrough();
  auto* lat_export = lattice->add_subcommand("export", "Gram matrix and metadata");
  lat_export->add_option("--label", label, "lattice label")->required();

  auto* coeff = app.add_subcommand("coeff", "one Fourier coefficient");
  coeff->add_option("--lat", lat, "lattice label")->required();
  coeff->add_option("--deg", degree, "degree 1..4")->required()->check(CLI::Range(1, 4));
  coeff->add_option("--t", t, "index: a | a,b,c | a,b,c:d,e,f");
  coeff->add_option("--ozeki", ozeki, "degree-4 ten-tuple t11,t22,t33,t44,u12,u13,u23,u14,u24,u34");

  auto* table = app.add_subcommand("table", "reproduce a stored table and diff it");
  table->add_option("--id", id, "table id")->required();
  table->add_option("--rows", rows, "comma-separated row names");

  auto* verify = app.add_subcommand("verify", "run a congruence verifier");
  verify->add_option("--claim", claim, "claim id")
      ->required()
      ->check(CLI::IsMember({"thm3.1.i", "thm3.1.ii", "thm3.1.iii", "thm4.1", "obs-mod7", "obs-mod49", "intro-mod23"}));

  auto* exp = app.add_subcommand("export", "all coefficients of a box");
  exp->add_option("--lat", lat, "lattice label")->required();
  exp->add_option("--deg", degree, "degree 1..4")->required()->check(CLI::Range(1, 4));
  exp->add_option("--bound", bound, "diagonal bound")->required()->check(CLI::NonNegativeNumber);

  auto* cache = app.add_subcommand("cache", "inspect or manage the cache directory");
  cache->add_option("action", action, "list | clear | warm | check")->required();
  cache->add_option("--lat", lat, "lattice label (warm, check)");
  cache->add_option("--bound", bound, "norm bound (warm, check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kPass : kUsage;
  }
  rc.cache_dir = cache_dir;

  try {
    if (*build) return cmd_build(rc, label);
    if (*lat_export) return cmd_lattice_export(rc, label);
    if (*coeff) return cmd_coeff(rc, lat, degree, t, ozeki);
    if (*table) return cmd_table(rc, id, rows);
    if (*verify) return cmd_verify(rc, claim);
    if (*exp) return cmd_export(rc, lat, degree, bound);
    if (*cache) return cmd_cache(rc, action, lat, bound);
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return kBudget;
  } catch (const CacheMiss& e) {
    std::cerr << "cache: " << e.what() << "\n";
    return kCache;
  } catch (const CorruptCache& e) {
    std::cerr << "cache: " << e.what() << "\n";
    return kCache;
  } catch (const ConstructionFailure& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return kInvariant;
  } catch (const UnknownLabel& e) {
    std::cerr << "unsupported label: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariant;
  }
  return kUsage;
}
