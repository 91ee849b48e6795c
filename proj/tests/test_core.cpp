#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "arcsin/core.hpp"
#include "oracle.hpp"

using namespace arcsin;
using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> random_vector(SeededRng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-2.0, 2.0);
  return v;
}

}  // namespace

TEST_CASE("cosine_sim known values", "[core][cosine]") {
  CHECK(cosine_sim({1.0, 0.0}, {1.0, 0.0}) == 1.0);
  CHECK(cosine_sim({1.0, 0.0}, {0.0, 1.0}) == 0.0);

  const std::vector<double> a{1.0, 1.0}, b{1.0, 0.0};
  const double expected = oracle::cosine(a, b);
  CHECK_THAT(expected, WithinAbs(0.70710678118654752, 1e-16));
  CHECK_THAT(cosine_sim(a, b), WithinAbs(expected, 1e-15));
}

TEST_CASE("cosine_sim rejects degenerate input", "[core][cosine]") {
  CHECK_THROWS_AS(cosine_sim({0.0, 0.0}, {1.0, 0.0}), DegenerateInput);
  CHECK_THROWS_AS(cosine_sim({1.0, 0.0}, {0.0, 0.0}), DegenerateInput);
  CHECK_THROWS_AS(cosine_sim({1.0, 0.0}, {1.0, 0.0, 0.0}), ShapeError);
}

TEST_CASE("cosine_sim properties on random vectors", "[core][cosine][property]") {
  SeededRng rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform(0.0, 63.0));
    const auto a = random_vector(rng, n);
    const auto b = random_vector(rng, n);
    const double k = rng.uniform(1e-3, 1e3);
    std::vector<double> ka(a);
    for (double& x : ka) x *= k;

    const double ab = cosine_sim(a, b);
    CHECK(ab == cosine_sim(b, a));
    CHECK_THAT(cosine_sim(a, ka), WithinAbs(1.0, 1e-12));
    CHECK(ab >= -1.0);
    CHECK(ab <= 1.0);
    CHECK_THAT(ab, WithinAbs(oracle::cosine(a, b), 1e-13));
  }
}

TEST_CASE("batch_cosine_sim", "[core][cosine]") {
  const EmbeddingBatch x{{1.0, 0.0}, {0.0, 1.0}};
  const EmbeddingBatch y{{0.0, 1.0}, {0.0, 1.0}};
  CHECK(batch_cosine_sim(x, y) == std::vector<double>{0.0, 1.0});
  for (double s : batch_cosine_sim(x, x)) CHECK(s == 1.0);

  SECTION("matches the per-row scalar loop") {
    SeededRng rng(42);
    const auto a = gaussian_sample(rng, 4, 8);
    const auto b = gaussian_sample(rng, 4, 8);
    const auto sims = batch_cosine_sim(a, b);
    REQUIRE(sims.size() == 4);
    for (std::size_t r = 0; r < 4; ++r) {
      CHECK_THAT(sims[r], WithinAbs(oracle::cosine(a.row(r), b.row(r)), 1e-14));
    }
  }

  SECTION("errors") {
    CHECK_THROWS_AS(batch_cosine_sim(x, EmbeddingBatch{{1.0, 2.0}}), ShapeError);
    const EmbeddingBatch zero_row{{1.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS_WITH(batch_cosine_sim(x, zero_row), Catch::Matchers::ContainsSubstring("row 1"));
  }
}

TEST_CASE("l2_normalize", "[core]") {
  const auto v = l2_normalize({3.0, 4.0});
  CHECK_THAT(v[0], WithinAbs(0.6, 1e-15));
  CHECK_THAT(v[1], WithinAbs(0.8, 1e-15));

  const auto u = l2_normalize({0.6, 0.8});
  CHECK_THAT(u[0], WithinAbs(0.6, 1e-15));
  CHECK_THAT(u[1], WithinAbs(0.8, 1e-15));

  CHECK_THROWS_AS(l2_normalize({0.0, 0.0}), DegenerateInput);

  SeededRng rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto w = random_vector(rng, 1 + i % 40);
    CHECK_THAT(l2_norm(l2_normalize(w)), WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("gaussian_sample determinism and moments", "[core][rng]") {
  SeededRng a(42), b(42);
  CHECK(gaussian_sample(a, 2, 2) == gaussian_sample(b, 2, 2));

  SeededRng c(7);
  const auto one = gaussian_sample(c, 1, 1);
  CHECK(std::isfinite(one(0, 0)));

  CHECK_THROWS_AS(gaussian_sample(c, 0, 3), InvalidArgument);

  SeededRng big(2024);
  const auto s = gaussian_sample(big, 1000, 1000);
  double sum = 0.0, sq = 0.0;
  for (double v : s.values()) {
    sum += v;
    sq += v * v;
  }
  const double n = 1e6;
  const double m = sum / n;
  const double var = sq / n - m * m;
  CHECK(std::abs(m) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("SeededRng stream is pinned", "[core][rng]") {
  // A change here means the generator changed and every frozen regression
  // value must be revisited.
  // Reference values from a separate splitmix64 + xoshiro256** script.
  SeededRng rng(0);
  CHECK(rng.next_u64() == 11091344671253066420ull);
  CHECK(rng.next_u64() == 13793997310169335082ull);
  CHECK(rng.next_u64() == 1900383378846508768ull);
  SeededRng parent(99);
  const auto child_seed = parent.derive_seed();
  SeededRng reference(99);
  CHECK(child_seed == reference.next_u64());
}

TEST_CASE("clamp_components", "[core][clamp]") {
  const EmbeddingBatch x{{-2.0, 0.5, 3.0}};
  CHECK(clamp_components(x, -1.0, 1.0) == EmbeddingBatch{{-1.0, 0.5, 1.0}});

  const EmbeddingBatch inside{{-0.2, 0.0, 0.9}};
  CHECK(clamp_components(inside, -1.0, 1.0) == inside);

  CHECK_THROWS_AS(clamp_components(x, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(clamp_components(x, 2.0, 1.0), InvalidArgument);

  SeededRng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    EmbeddingBatch r = gaussian_sample(rng, 8, 16);
    for (double& v : r.values()) v *= 3.0;
    const auto once = clamp_components(r, -1.0, 1.0);
    CHECK(clamp_components(once, -1.0, 1.0) == once);
    for (double v : once.values()) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("EmbeddingBatch validates shape and finiteness", "[core]") {
  CHECK_THROWS_AS(EmbeddingBatch(0, 3), InvalidArgument);
  CHECK_THROWS_AS(EmbeddingBatch(2, 2, std::vector<double>{1.0, 2.0, 3.0}), ShapeError);
  CHECK_THROWS_AS(EmbeddingBatch(1, 2, std::vector<double>{1.0, NAN}), InvalidArgument);
  CHECK_THROWS_AS(EmbeddingBatch(1, 1, std::vector<double>{INFINITY}), InvalidArgument);
}
