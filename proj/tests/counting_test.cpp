#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "thetacong/errors.hpp"
#include "thetacong/theta.hpp"

using namespace thetacong;

namespace {

// #{X in [-r, r]^{m x n} : X^T G X = 2T} by walking every matrix in the box.
// The box must contain every vector of norm <= 2 max t_ii.
std::map<CanonicalKey, Integer> naive_counts(const Lattice& lat, int degree, int r, int bound) {
  const int m = static_cast<int>(lat.rank());
  std::vector<std::vector<int>> vecs;
  std::vector<int> x(m, -r);
  for (;;) {
    vecs.push_back(x);
    int k = 0;
    for (; k < m; ++k) {
      if (++x[k] <= r) break;
      x[k] = -r;
    }
    if (k == m) break;
  }
  auto ip = [&](const std::vector<int>& a, const std::vector<int>& b) {
    std::int64_t s = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s += a[i] * lat.gram(i, j) * b[j];
    return s;
  };
  std::map<CanonicalKey, Integer> out;
  std::vector<std::size_t> cols(degree, 0);
  for (;;) {
    HalfIntegralMatrix t(degree);
    bool inside = true;
    for (int i = 0; i < degree && inside; ++i) {
      const auto q = ip(vecs[cols[i]], vecs[cols[i]]);
      inside = q <= 2 * bound;
      t.set_diag(i, static_cast<int>(q / 2));
      for (int j = i + 1; j < degree; ++j) t.set_doubled(i, j, static_cast<int>(ip(vecs[cols[i]], vecs[cols[j]])));
    }
    if (inside) {
      // keyed by the exact T: count only those already in canonical form
      const CanonicalKey key = canonical_key(t);
      if (key.matrix() == t) out[key] += 1;
    }
    int k = 0;
    for (; k < degree; ++k) {
      if (++cols[k] < vecs.size()) break;
      cols[k] = 0;
    }
    if (k == degree) break;
  }
  return out;
}

Lattice e8() { return make_lattice("e8", root_gram(RootFamily::E, 8)); }

}  // namespace

TEST_SUITE("counting") {
  TEST_CASE("engine equals naive Cartesian enumeration on S1, degree 2, box 1") {
    const Lattice s1 = quaternary_gram(1);
    // x_i^2 <= 2 (G^-1)_ii <= 12/11, so [-2, 2] holds every vector of norm <= 2
    const auto naive = naive_counts(s1, 2, 2, 1);
    const VectorList vl = enumerate_short(s1, 2);
    for (const auto& key : psd_classes(2, 1)) {
      INFO(key.str());
      const auto it = naive.find(key);
      CHECK(representation_count(s1, vl, key.matrix()) == (it == naive.end() ? Integer(0) : it->second));
    }
    CHECK(representation_count(s1, vl, decode_binary(1, 0, 1)) == 8);
    CHECK(representation_count(s1, vl, decode_binary(1, 1, 1)) == 0);
  }

  TEST_CASE("engine equals naive Cartesian enumeration on S2, degree 3, box 1") {
    const Lattice s2 = quaternary_gram(2);
    const auto naive = naive_counts(s2, 3, 1, 1);
    const VectorList vl = enumerate_short(s2, 2);
    REQUIRE(vl.count(2) > 0);
    for (const auto& shell : vl.shells)
      for (std::size_t i = 0; i < shell.second.size(); ++i)
        for (auto c : shell.second.row(i)) REQUIRE(std::abs(c) <= 1);
    for (const auto& key : psd_classes(3, 1)) {
      INFO(key.str());
      const auto it = naive.find(key);
      CHECK(representation_count(s2, vl, key.matrix()) == (it == naive.end() ? Integer(0) : it->second));
    }
  }

  TEST_CASE("counts are invariant under T -> U^T T U") {
    std::mt19937 rng(20240611);
    const Lattice s1 = quaternary_gram(1);
    const VectorList vl = enumerate_short(s1, 8);
    const std::vector<HalfIntegralMatrix> seeds = {decode_binary(1, 0, 1), decode_binary(1, 1, 2),
                                                   decode_ternary(1, 1, 1, 0, 0, 0), decode_ternary(1, 1, 2, 1, 0, 1)};
    int done = 0;
    while (done < 20) {
      const auto& t = seeds[done % seeds.size()];
      const IntMatrix u = testing::random_unimodular(t.degree(), rng);
      const HalfIntegralMatrix image = testing::transform(t, u);
      if (image.max_diag() > 4) continue;
      INFO(t.to_string() << " -> " << image.to_string());
      CHECK(representation_count(s1, vl, image) == representation_count(s1, vl, t));
      ++done;
    }
  }

  TEST_CASE("sum over off-diagonals is the product of shell sizes") {
    for (Label l : {Label::S1, Label::Psi}) {
      const Lattice lat = build_lattice(l);
      const int bound = l == Label::Psi ? 4 : 6;
      const VectorList vl = enumerate_short(lat, bound);
      for (int a = 1; 2 * a <= bound; ++a)
        for (int b = a; 2 * b <= bound; ++b) {
          if (l == Label::Psi && a + b > 3) continue;
          Integer total = 0;
          for (int g = -2 * a - 2 * b; g <= 2 * a + 2 * b; ++g) {
            const HalfIntegralMatrix t = decode_binary(a, g, b);
            if (is_positive_semidefinite(t)) total += representation_count(lat, vl, t);
          }
          INFO(lat.name << " " << a << "," << b);
          CHECK(total == Integer(static_cast<unsigned long>(vl.count(2 * a) * vl.count(2 * b))));
        }
    }
  }

  TEST_CASE("index reduction") {
    const auto t = decode_ternary(1, 1, 0, 0, 0, -2);  // second column = -first, third zero
    const HalfIntegralMatrix r = reduce_index(t);
    CHECK(r.degree() == 1);
    CHECK(r.diag(0) == 1);
    CHECK(reduce_index(decode_binary(0, 0, 0)).is_zero());
    const Lattice s1 = quaternary_gram(1);
    const VectorList vl = enumerate_short(s1, 2);
    CHECK(representation_count(s1, vl, t) == representation_count(s1, vl, r));
    CHECK(reduce_index(decode_binary(1, 1, 1)) == decode_binary(1, 1, 1));
  }

  TEST_CASE("pinned count on a transitive shell equals the full count") {
    const Lattice lat = e8();
    const VectorList vl = enumerate_short(lat, 4);
    CountingContext ctx(lat, vl);
    for (const auto& key : psd_classes(3, 1)) {
      const HalfIntegralMatrix t = key.matrix();
      if (t.diag(0) != 1 || t.diag(1) != 1 || t.diag(2) != 1) continue;
      INFO(key.str());
      CHECK(orbit_factored_count(ctx, t, 2) == representation_count(ctx, t));
    }
    const Lattice s1 = quaternary_gram(1);
    const VectorList vs = enumerate_short(s1, 2);
    CountingContext cs(s1, vs);
    for (const auto& key : psd_classes(2, 1))
      if (key.diag[0] == 1 && key.diag[1] == 1)
        CHECK(orbit_factored_count(cs, key.matrix(), 2) == representation_count(cs, key.matrix()));
  }

  TEST_CASE("census equals direct counts on E8") {
    const Lattice lat = e8();
    const VectorList vl = enumerate_short(lat, 2);
    CountingContext ctx(lat, vl);
    for (int degree = 2; degree <= 4; ++degree)
      for (int pin = 0; pin <= 2; ++pin) {
        if (degree - pin < 1 || degree - pin > 2) continue;
        const auto census = shell_census(ctx, 2, degree, pin);
        for (const auto& key : psd_classes(degree, 1)) {
          bool uniform = true;
          for (int i = 0; i < degree; ++i) uniform = uniform && key.diag[i] == 1;
          if (!uniform) continue;
          if (pin == 2 && reduce_index(key.matrix()).degree() == 1) continue;  // one vector repeated
          INFO("degree " << degree << " pin " << pin << " " << key.str());
          const auto it = census.find(key);
          CHECK((it == census.end() ? Integer(0) : it->second) == representation_count(ctx, key.matrix()));
        }
      }
  }

  TEST_CASE("Leech degree-2 census against plain inner-product histograms") {
    const Lattice lat = build_lattice(Label::Omega);
    const VectorList vl = enumerate_short(lat, 4);
    CountingContext ctx(lat, vl);
    const auto census = shell_census(ctx, 4, 2, 1);
    // inner products of a fixed minimal vector with the shell: 4600 at 2, 47104 at 1, 93150 at 0
    CHECK(census.at(canonical_key(decode_binary(2, 4, 2))) == 196560);
    CHECK(census.at(canonical_key(decode_binary(2, 2, 2))) == Integer(196560) * 4600);
    CHECK(census.at(canonical_key(decode_binary(2, 1, 2))) == Integer(196560) * 47104);
    CHECK(census.at(canonical_key(decode_binary(2, 0, 2))) == Integer(196560) * 93150);
    CHECK(census.count(canonical_key(decode_binary(2, 3, 2))) == 0);

    // plain-loop inner products of a few random minimal vectors against the whole shell
    const Shell& shell = *vl.shell(4);
    std::mt19937 rng(99);
    std::uniform_int_distribution<std::size_t> pick(0, shell.size() - 1);
    for (int trial = 0; trial < 4; ++trial) {
      const auto v = shell.row(pick(rng));
      std::map<std::int64_t, unsigned long> hist;
      for (std::size_t k = 0; k < shell.size(); ++k) {
        const auto u = shell.row(k);
        std::int64_t s = 0;
        for (std::size_t a = 0; a < 24; ++a)
          for (std::size_t b = 0; b < 24; ++b) s += v[a] * lat.gram(a, b) * u[b];
        ++hist[s];
      }
      for (const auto& [ip, n] : hist) {
        const auto it = census.find(canonical_key(decode_binary(2, static_cast<int>(ip), 2)));
        CHECK((it == census.end() ? Integer(0) : it->second) == Integer(196560) * n);
      }
    }
  }

  TEST_CASE("census argument checks") {
    const Lattice lat = e8();
    const VectorList vl = enumerate_short(lat, 2);
    CountingContext ctx(lat, vl);
    CHECK_THROWS_AS(shell_census(ctx, 2, 4, 1), InvalidArgument);
    CHECK_THROWS_AS(shell_census(ctx, 2, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(shell_census(ctx, 4, 2, 1), ShellMissing);
  }

  TEST_CASE("worker and partition counts do not change a count") {
    const Lattice lat = build_lattice(Label::Delta);
    const VectorList vl = enumerate_short(lat, 2);
    CountingContext ctx(lat, vl);
    const HalfIntegralMatrix t = decode_ternary(1, 1, 1, 0, 0, 1);
    const Integer one = representation_count(ctx, t);
    CHECK(one == 12751200);
    for (unsigned w : {2u, 3u, 8u})
      for (unsigned p : {1u, 5u, 64u}) {
        CountOptions o;
        o.workers = w;
        o.partitions = p;
        CHECK(representation_count(ctx, t, o) == one);
      }
  }

  TEST_CASE("budget stop and checkpoint resume") {
    const auto dir = testing::scratch("checkpoint");
    const Lattice lat = build_lattice(Label::Alpha);
    const VectorList vl = enumerate_short(lat, 2);
    CountingContext ctx(lat, vl);
    const HalfIntegralMatrix t = decode_ternary(1, 1, 1, 1, 1, 1);
    const Integer expected = representation_count(ctx, t);
    CHECK(expected == 4177536);

    CountOptions o;
    o.partitions = 16;
    o.checkpoint = dir / "alpha.ckpt";
    o.node_budget = 20000;
    CHECK_THROWS_AS(representation_count(ctx, t, o), BudgetExceeded);
    REQUIRE(std::filesystem::exists(*o.checkpoint));

    // partitions finished before the stop are reused
    std::ifstream in(*o.checkpoint);
    std::size_t journaled = 0;
    for (std::string line; std::getline(in, line);) journaled += line.rfind("partition=", 0) == 0;
    o.node_budget = 0;
    CHECK(representation_count(ctx, t, o) == expected);

    // a finished checkpoint answers without searching, from the journal
    o.node_budget = 1;
    CHECK(representation_count(ctx, t, o) == expected);
    std::vector<std::string> lines;
    {
      std::ifstream again(*o.checkpoint);
      for (std::string line; std::getline(again, line);) lines.push_back(line);
    }
    for (auto& line : lines)
      if (line.rfind("partition=0;", 0) == 0) {
        const auto eq = line.rfind('=');
        line = line.substr(0, eq + 1) + Integer(Integer(line.substr(eq + 1)) + 1).get_str();
      }
    {
      std::ofstream out(*o.checkpoint, std::ios::trunc);
      for (const auto& line : lines) out << line << "\n";
    }
    CHECK(representation_count(ctx, t, o) == expected + 1);

    // a checkpoint written for another task is ignored
    CHECK_THROWS_AS(representation_count(ctx, decode_ternary(1, 1, 1, 0, 0, 0), o), BudgetExceeded);
    MESSAGE("partitions journaled before the budget stop: " << journaled);
  }
}
