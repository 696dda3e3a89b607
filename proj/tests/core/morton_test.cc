#include <doctest.h>

#include <numeric>
#include <random>

#include "gvv/core/morton.h"
#include "gvv/core/packing.h"
#include "gvv/core/synthetic.h"
#include "gvv/error.h"
#include "support/oracles.h"

using namespace gvv;

TEST_CASE("morton_code known values") {
  CHECK(morton_code(0, 0, 0) == 0);
  // Frozen from oracle::naive_morton(1, 2, 3).
  CHECK(oracle::naive_morton(1, 2, 3) == 53);
  CHECK(morton_code(1, 2, 3) == 53);
  CHECK(oracle::naive_morton(kMortonMax, kMortonMax, kMortonMax) == (1ull << 63) - 1);
  CHECK(morton_code(kMortonMax, kMortonMax, kMortonMax) == (1ull << 63) - 1);
}

TEST_CASE("morton_code matches per-bit interleave on random coordinates") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint32_t> d(0, kMortonMax);
  for (int i = 0; i < 10000; ++i) {
    const auto x = d(rng), y = d(rng), z = d(rng);
    REQUIRE(morton_code(x, y, z) == oracle::naive_morton(x, y, z));
  }
}

TEST_CASE("morton_code rejects coordinates above 21 bits") {
  CHECK_THROWS_AS(morton_code(1u << 21, 0, 0), Error);
  CHECK_THROWS_AS(morton_code(0, 0, 1u << 21), Error);
}

TEST_CASE("sort_splats_morton trivial cases") {
  auto one = random_frame(1, 3);
  CHECK(sort_splats_morton(one) == std::vector<std::uint32_t>{0});

  auto frame = random_frame(500, 4);
  const auto perm = sort_splats_morton(frame);
  std::vector<GaussianSplat> sorted;
  for (auto i : perm) sorted.push_back(frame.splats[i]);
  const auto resorted = make_frame(std::move(sorted), 0);
  std::vector<std::uint32_t> identity(500);
  std::iota(identity.begin(), identity.end(), 0u);
  CHECK(sort_splats_morton(resorted) == identity);
}

TEST_CASE("sort_splats_morton is a stable bijection") {
  auto frame = random_frame(2000, 5);
  // Duplicate positions force equal codes.
  for (int i = 0; i < 100; ++i) frame.splats[1000 + i].position = frame.splats[i].position;
  frame.update_bbox();
  const auto perm = sort_splats_morton(frame);
  std::vector<bool> seen(perm.size(), false);
  for (auto i : perm) {
    REQUIRE(!seen[i]);
    seen[i] = true;
  }
  std::vector<std::size_t> pos_of(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) pos_of[perm[k]] = k;
  for (int i = 0; i < 100; ++i) CHECK(pos_of[i] < pos_of[1000 + i]);
}

TEST_CASE("degenerate bbox axis maps to zero") {
  std::vector<GaussianSplat> splats(3);
  splats[0].position = {0.f, 1.f, 5.f};
  splats[1].position = {1.f, 1.f, 5.f};
  splats[2].position = {0.5f, 1.f, 5.f};
  const auto frame = make_frame(splats, 0);
  const auto c = morton_lattice(frame.splats[1].position, frame.bbox);
  CHECK(c[0] == kMortonMax);
  CHECK(c[1] == 0);
  CHECK(c[2] == 0);
  CHECK(sort_splats_morton(frame) == std::vector<std::uint32_t>{0, 2, 1});
}

TEST_CASE("morton packing keeps 3D neighbours close in the image") {
  const auto frame = random_frame(10000, 21);
  std::vector<Vec3f> pts;
  for (const auto& s : frame.splats) pts.push_back(s.position);
  const auto knn = oracle::brute_knn(pts, 8);
  const int side = plane_side(pts.size());

  const auto morton = sort_splats_morton(frame);
  std::vector<std::uint32_t> shuffled(pts.size());
  std::iota(shuffled.begin(), shuffled.end(), 0u);
  std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(99));

  const double d_morton = oracle::mean_neighbor_pixel_distance(knn, morton, side);
  const double d_random = oracle::mean_neighbor_pixel_distance(knn, shuffled, side);
  MESSAGE("morton " << d_morton << " px, random " << d_random << " px");
  CHECK(d_morton < 0.5 * d_random);
}
