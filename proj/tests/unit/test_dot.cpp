#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "cotforge/kernels/dot.hpp"

using namespace cotforge::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

double naive(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

}  // namespace

TEST_CASE("scalar dot matches a long double reference") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 255u, 256u, 1001u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    CHECK(dot(Isa::scalar, a, b) == doctest::Approx(naive(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("every available ISA agrees with scalar") {
  std::mt19937_64 rng(11);
  for (Isa isa : {Isa::scalar, Isa::avx2}) {
    if (!isa_available(isa)) {
      MESSAGE("skipping unavailable ISA " << to_string(isa));
      continue;
    }
    for (std::size_t n = 0; n < 70; ++n) {
      const auto a = random_vec(rng, n);
      const auto b = random_vec(rng, n);
      const double ref = dot(Isa::scalar, a, b);
      CHECK(std::abs(dot(isa, a, b) - ref) <= 1e-12 * (1.0 + std::abs(ref)) * static_cast<double>(n + 1));
    }
  }
}

TEST_CASE("dot_rows matches per-row dot on the active ISA") {
  std::mt19937_64 rng(13);
  const std::size_t dim = 37, rows = 9;
  const auto q = random_vec(rng, dim);
  const auto m = random_vec(rng, dim * rows);
  std::vector<double> out(rows), ref(rows);
  dot_rows(q, m, out);
  dot_rows(Isa::scalar, q, m, ref);
  for (std::size_t r = 0; r < rows; ++r) CHECK(out[r] == doctest::Approx(ref[r]).epsilon(1e-12));
}

TEST_CASE("forced scalar is honoured") {
  const char* forced = std::getenv("COTFORGE_FORCE_SCALAR");
  if (forced && std::string(forced) == "1") {
    CHECK(active_isa() == Isa::scalar);
  } else {
    CHECK(isa_available(active_isa()));
  }
  MESSAGE("active ISA: " << to_string(active_isa()));
}
