#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "thetacong/forms.hpp"

namespace testing {

// Fresh directory under $THETACONG_TEST_TMP (or the system temp dir).
inline std::filesystem::path scratch(const std::string& name) {
  const char* root = std::getenv("THETACONG_TEST_TMP");
  std::filesystem::path dir = root && *root ? std::filesystem::path(root) : std::filesystem::temp_directory_path();
  dir /= "thetacong-" + name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Laplace expansion along the first row.
inline thetacong::Integer cofactor_det(const thetacong::IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  thetacong::Integer total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    thetacong::IntMatrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0, k = 0; j < n; ++j)
        if (j != c) minor(i - 1, k++) = m(i, j);
    const thetacong::Integer term = m(0, c) * cofactor_det(minor);
    total += c % 2 ? -term : term;
  }
  return total;
}

// Psd iff every principal minor is >= 0.
inline bool psd_by_minors(const thetacong::IntMatrix& m) {
  const std::size_t n = m.rows();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) idx.push_back(i);
    thetacong::IntMatrix sub(idx.size(), idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) sub(i, j) = m(idx[i], idx[j]);
    if (cofactor_det(sub) < 0) return false;
  }
  return true;
}

// U^T (2T) U as a HalfIntegralMatrix.
inline thetacong::HalfIntegralMatrix transform(const thetacong::HalfIntegralMatrix& t, const thetacong::IntMatrix& u) {
  const thetacong::IntMatrix g = u.transpose() * (t.even_matrix() * u);
  thetacong::HalfIntegralMatrix out(t.degree());
  for (int i = 0; i < t.degree(); ++i) {
    out.set_diag(i, static_cast<int>(g(i, i).get_si() / 2));
    for (int j = i + 1; j < t.degree(); ++j) out.set_doubled(i, j, static_cast<int>(g(i, j).get_si()));
  }
  return out;
}

// Random matrix in GL_n(Z) with entries in [-2, 2].
inline thetacong::IntMatrix random_unimodular(int n, std::mt19937& rng) {
  std::uniform_int_distribution<int> d(-2, 2);
  for (;;) {
    thetacong::IntMatrix u(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) u(i, j) = d(rng);
    const thetacong::Integer det = cofactor_det(u);
    if (det == 1 || det == -1) return u;
  }
}

}  // namespace testing
