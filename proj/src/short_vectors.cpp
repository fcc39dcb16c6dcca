#include "thetacong/short_vectors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace thetacong {

namespace {

using i128 = __int128;

// Entries larger than this would risk overflow in the 128-bit recurrences.
constexpr std::int64_t kMinorLimit = std::int64_t{1} << 40;

i128 isqrt(i128 v) {
  if (v <= 0) return 0;
  i128 r = static_cast<i128>(std::sqrt(static_cast<long double>(v)));
  while (r * r > v) --r;
  while ((r + 1) * (r + 1) <= v) ++r;
  return r;
}

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) { return -floor_div(-a, b); }

// Fraction-free LDL data: minors[k] is the leading k x k minor (minors[0] = 1),
// link(j, i) for j > i is the Bareiss entry A^{(i)}_{j,i}.
struct IntegerLDL {
  std::size_t n = 0;
  std::vector<i128> minors;
  std::vector<i128> link;

  i128 at(std::size_t j, std::size_t i) const { return link[j * n + i]; }
};

IntegerLDL integer_ldl(const EvenGram& gram) {
  const std::size_t n = gram.rank();
  IntMatrix a = gram.to_int();
  IntegerLDL out;
  out.n = n;
  out.minors.assign(n + 1, 1);
  out.link.assign(n * n, 0);
  Integer prev = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (a(k, k) <= 0) throw NotPositiveDefinite("Gram matrix is not positive definite");
    for (std::size_t j = k + 1; j < n; ++j) {
      if (abs(a(j, k)) > kMinorLimit) throw Error("enumeration setup exceeds 128-bit range");
      out.link[j * n + k] = a(j, k).get_si();
    }
    if (a(k, k) > kMinorLimit) throw Error("enumeration setup exceeds 128-bit range");
    out.minors[k + 1] = a(k, k).get_si();
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = a(k, k);
  }
  return out;
}

void sort_rows(Shell& s) {
  const std::size_t m = s.size(), d = s.dim;
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(s.coords.begin() + a * d, s.coords.begin() + (a + 1) * d,
                                        s.coords.begin() + b * d, s.coords.begin() + (b + 1) * d);
  });
  std::vector<std::int32_t> sorted(s.coords.size());
  for (std::size_t i = 0; i < m; ++i)
    std::copy_n(s.coords.begin() + idx[i] * d, d, sorted.begin() + i * d);
  s.coords = std::move(sorted);
}

std::string header_field(const std::string& header, const std::string& name) {
  std::istringstream is(header);
  std::string part;
  while (std::getline(is, part, ';'))
    if (part.rfind(name + "=", 0) == 0) return part.substr(name.size() + 1);
  throw CorruptCache("cache header lacks field '" + name + "'");
}

}  // namespace

RationalLDL cholesky_rational(const EvenGram& gram) {
  const std::size_t n = gram.rank();
  RatMatrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = static_cast<long>(gram(i, j));
  RationalLDL out{RatMatrix::identity(n), {}};
  for (std::size_t k = 0; k < n; ++k) {
    if (a(k, k) <= 0) throw NotPositiveDefinite("Gram matrix is not positive definite");
    out.pivots.push_back(a(k, k));
    for (std::size_t j = k + 1; j < n; ++j) out.lower(j, k) = a(j, k) / a(k, k);
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= out.lower(i, k) * a(k, j);
  }
  return out;
}

const Shell* VectorList::shell(int norm) const {
  auto it = shells.find(norm);
  return it == shells.end() ? nullptr : &it->second;
}

std::size_t VectorList::count(int norm) const {
  const Shell* s = shell(norm);
  if (!s) throw ShellMissing(label + ": shell of norm " + std::to_string(norm) + " not enumerated");
  return s->size();
}

std::size_t VectorList::total() const {
  std::size_t t = 0;
  for (const auto& [norm, s] : shells) t += s.size();
  return t;
}

VectorList VectorList::restricted(int new_bound) const {
  VectorList out;
  out.label = label;
  out.gram_hash = gram_hash;
  out.bound = std::min(bound, new_bound);
  for (const auto& [norm, s] : shells)
    if (norm <= new_bound) out.shells.emplace(norm, s);
  return out;
}

VectorList enumerate_short(const Lattice& lat, int bound, std::size_t budget) {
  if (bound < 0) throw InvalidArgument("enumeration bound must be >= 0");
  const IntegerLDL ldl = integer_ldl(lat.gram);
  const std::size_t n = ldl.n;

  VectorList out;
  out.label = lat.name;
  out.gram_hash = lat.gram.hash();
  out.bound = bound;
  for (int norm = 0; norm <= bound; norm += 2) out.shells[norm] = Shell{norm, n, {}};

  // Enumerate x_{n-1} first. scaled[i] = M_i = d_i * (partial form over
  // coordinates >= i minimised over the rest); center[i] = sum_{j>i} link(j,i) x_j.
  std::vector<std::int64_t> x(n, 0), hi(n, 0);
  std::vector<i128> scaled(n + 1, 0), center(n, 0);
  std::size_t produced = 0;

  auto open_level = [&](std::size_t i) -> bool {
    const i128 d_i = ldl.minors[i], d_next = ldl.minors[i + 1];
    const i128 room = d_i * (d_next * bound - scaled[i + 1]);
    if (room < 0) return false;
    const i128 s = isqrt(room);
    const i128 lo = ceil_div(-s - center[i], d_next);
    const i128 up = floor_div(s - center[i], d_next);
    if (lo > up) return false;
    x[i] = static_cast<std::int64_t>(lo);
    hi[i] = static_cast<std::int64_t>(up);
    return true;
  };
  auto fix_level = [&](std::size_t i) {
    const i128 y = ldl.minors[i + 1] * x[i] + center[i];
    scaled[i] = (ldl.minors[i] * scaled[i + 1] + y * y) / ldl.minors[i + 1];
  };
  auto rebuild_center = [&](std::size_t k) {
    i128 c = 0;
    for (std::size_t j = k + 1; j < n; ++j) c += ldl.at(j, k) * x[j];
    center[k] = c;
  };

  if (n == 0) return out;
  std::size_t level = n - 1;
  rebuild_center(level);
  if (!open_level(level)) return out;
  while (true) {
    if (x[level] > hi[level]) {
      if (level == n - 1) break;
      ++level;
      ++x[level];
      continue;
    }
    fix_level(level);
    if (level == 0) {
      const int norm = static_cast<int>(scaled[0]);
      if (norm % 2 == 0 && norm <= bound) {
        if (++produced > budget)
          throw BudgetExceeded(lat.name + ": more than " + std::to_string(budget) + " vectors of norm <= " +
                               std::to_string(bound));
        auto& s = out.shells[norm];
        for (std::size_t k = 0; k < n; ++k) s.coords.push_back(static_cast<std::int32_t>(x[k]));
      }
      ++x[0];
      continue;
    }
    --level;
    rebuild_center(level);
    if (!open_level(level)) {
      ++level;
      ++x[level];
    }
  }
  for (auto& [norm, s] : out.shells) sort_rows(s);
  return out;
}

std::filesystem::path cache_path(const std::filesystem::path& dir, std::string_view label) {
  return dir / (std::string(label) + ".svcache");
}

void cache_store(const VectorList& list, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto path = cache_path(dir, list.label);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("cannot write cache file " + tmp);
    os << "svcache;format=1;label=" << list.label << ";gramhash=" << list.gram_hash << ";bound=" << list.bound
       << ";shells=";
    bool first = true;
    for (const auto& [norm, s] : list.shells) {
      os << (first ? "" : ",") << norm << ':' << s.size();
      first = false;
    }
    os << '\n';
    std::string line;
    for (const auto& [norm, s] : list.shells) {
      os << "shell=" << norm << ";count=" << s.size() << '\n';
      for (std::size_t i = 0; i < s.size(); ++i) {
        line.clear();
        auto row = s.row(i);
        for (std::size_t k = 0; k < row.size(); ++k) {
          if (k) line += ',';
          line += std::to_string(row[k]);
        }
        line += '\n';
        os << line;
      }
    }
    if (!os) throw Error("failed writing cache file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

VectorList cache_load(const std::filesystem::path& dir, const Lattice& lat, int bound) {
  const auto path = cache_path(dir, lat.name);
  std::ifstream is(path, std::ios::binary);
  if (!is) throw CacheMiss("no cache file " + path.string());
  std::string header;
  std::getline(is, header);
  if (header.rfind("svcache;", 0) != 0 || header_field(header, "format") != "1")
    throw CorruptCache(path.string() + ": unrecognised header");
  if (header_field(header, "gramhash") != lat.gram.hash())
    throw CorruptCache(path.string() + ": Gram hash does not match lattice " + lat.name);
  const int stored_bound = std::stoi(header_field(header, "bound"));
  if (stored_bound < bound)
    throw CacheMiss(path.string() + ": enumerated only to norm " + std::to_string(stored_bound));

  std::map<int, std::size_t> declared;
  {
    std::istringstream shells(header_field(header, "shells"));
    std::string item;
    while (std::getline(shells, item, ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos) throw CorruptCache(path.string() + ": bad shells field");
      declared[std::stoi(item.substr(0, colon))] = std::stoull(item.substr(colon + 1));
    }
  }

  VectorList out;
  out.label = lat.name;
  out.gram_hash = lat.gram.hash();
  out.bound = stored_bound;
  const std::size_t dim = lat.rank();
  std::string line;
  Shell* current = nullptr;
  std::size_t expected = 0;
  while (std::getline(is, line)) {
    if (line.rfind("shell=", 0) == 0) {
      if (current && current->size() != expected) throw CorruptCache(path.string() + ": shell count mismatch");
      const int norm = std::stoi(header_field(line, "shell"));
      expected = std::stoull(header_field(line, "count"));
      current = &out.shells[norm];
      *current = Shell{norm, dim, {}};
      current->coords.reserve(expected * dim);
      continue;
    }
    if (!current) throw CorruptCache(path.string() + ": vector before any shell header");
    std::size_t start = 0, got = 0;
    while (start <= line.size()) {
      auto comma = line.find(',', start);
      if (comma == std::string::npos) comma = line.size();
      current->coords.push_back(static_cast<std::int32_t>(std::stol(line.substr(start, comma - start))));
      ++got;
      start = comma + 1;
    }
    if (got != dim) throw CorruptCache(path.string() + ": vector of wrong length");
  }
  if (current && current->size() != expected) throw CorruptCache(path.string() + ": shell count mismatch");
  for (const auto& [norm, count] : declared) {
    const Shell* s = out.shell(norm);
    if (!s || s->size() != count) throw CorruptCache(path.string() + ": shell counts disagree with header");
  }
  if (declared.size() != out.shells.size()) throw CorruptCache(path.string() + ": unexpected shell sections");
  return out.restricted(bound);
}

VectorList load_or_enumerate(const Lattice& lat, int bound, const std::optional<std::filesystem::path>& cache_dir,
                             std::size_t budget) {
  if (cache_dir) {
    try {
      return cache_load(*cache_dir, lat, bound);
    } catch (const CacheMiss&) {
    }
  }
  VectorList list = enumerate_short(lat, bound, budget);
  if (cache_dir) cache_store(list, *cache_dir);
  return list;
}

}  // namespace thetacong
