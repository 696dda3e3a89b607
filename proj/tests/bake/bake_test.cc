#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "gvv/bake/bake.h"
#include "gvv/core/layout.h"
#include "gvv/core/packing.h"
#include "gvv/core/splat_io.h"
#include "gvv/core/synthetic.h"
#include "gvv/error.h"
#include "gvv/motion/prune.h"
#include "support/temp_dir.h"

using namespace gvv;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected gvv::Error");
  return ErrorKind::kInvalidArgument;
}

PlaneStack decode(const std::filesystem::path& dir, const Manifest& m, std::size_t g) {
  return decode_group(load_group(dir, m.groups[g]), m.groups[g]);
}

std::set<std::array<float, 3>> positions(const GaussianFrame& f) {
  std::set<std::array<float, 3>> out;
  for (const auto& s : f.splats) out.insert(s.position);
  return out;
}

}  // namespace

TEST_CASE("bake writes one group per group_size frames and decodes losslessly") {
  const auto frames = smooth_sequence(400, 25, 11);
  testing::TempDir dir;
  BakeOptions opt;
  opt.group_size = 10;
  const auto report = bake(frames_in_memory(frames), dir.path(), opt);

  REQUIRE(report.manifest.groups.size() == 3);
  CHECK(report.manifest.frame_count == 25);
  CHECK(report.manifest.groups[2].length == 5);
  CHECK(read_manifest(dir / "manifest.json") == report.manifest);
  CHECK(report.groups.size() == 3);
  CHECK(report.seconds_per_frame() > 0.0);
  CHECK(report.bytes_per_frame() == doctest::Approx(report.manifest.total_bytes() / 25.0));

  // The lossless backend must reproduce exactly what packing alone gives.
  for (std::size_t g = 0; g < 3; ++g) {
    const auto& entry = report.manifest.groups[g];
    std::span<const GaussianFrame> slice(frames.data() + entry.start_frame, entry.length);
    const auto expected = pack_group(slice, attribute_layout(0));
    const auto got = decode(dir.path(), report.manifest, g);
    REQUIRE(got.num_frames() == expected.num_frames());
    for (std::size_t t = 0; t < got.num_frames(); ++t) {
      CHECK(got.frames[t] == expected.frames[t]);
    }
  }
}

TEST_CASE("--group-size 1 makes every frame a keyframe group") {
  const auto frames = smooth_sequence(100, 6, 2);
  testing::TempDir dir;
  BakeOptions opt;
  opt.group_size = 1;
  const auto m = bake(frames_in_memory(frames), dir.path(), opt).manifest;
  REQUIRE(m.groups.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(m.groups[i].start_frame == i);
    CHECK(m.groups[i].length == 1);
  }
}

TEST_CASE("splat counts may change only at group boundaries") {
  std::vector<GaussianFrame> frames;
  for (int i = 0; i < 4; ++i) frames.push_back(random_frame(300, 1 + i));
  for (int i = 0; i < 4; ++i) frames.push_back(random_frame(200, 10 + i));
  testing::TempDir dir;
  BakeOptions opt;
  opt.group_size = 4;
  const auto m = bake(frames_in_memory(frames), dir.path(), opt).manifest;
  CHECK(m.groups[0].splat_count == 300);
  CHECK(m.groups[1].splat_count == 200);

  opt.group_size = 3;
  testing::TempDir other;
  CHECK(kind_of([&] { bake(frames_in_memory(frames), other.path(), opt); }) ==
        ErrorKind::kMismatch);
}

TEST_CASE("the keyframe is pruned and its survivors are kept across the group") {
  auto frames = smooth_sequence(500, 8, 4);
  testing::TempDir dir;
  BakeOptions opt;
  opt.group_size = 4;
  opt.target_count = 200;
  const auto report = bake(frames_in_memory(frames), dir.path(), opt);

  PruneOptions po;
  po.target_count = 200;
  for (std::size_t g = 0; g < 2; ++g) {
    const auto& entry = report.manifest.groups[g];
    const auto pruned = prune_keyframe(frames[entry.start_frame], po);
    CHECK(entry.splat_count == pruned.frame.size());
    CHECK(entry.splat_count <= 200);
    CHECK(report.groups[g].input_splats == 500);
    CHECK(report.groups[g].output_splats == entry.splat_count);
    CHECK(report.groups[g].prune_rounds == pruned.rounds);

    // Frame 2 of the group holds exactly the keyframe's survivors, re-packed.
    const auto kept = apply_keep_mask(frames[entry.start_frame + 2], pruned.kept);
    std::vector<GaussianFrame> group;
    group.push_back(pruned.frame);
    for (int t = 1; t < entry.length; ++t) {
      group.push_back(apply_keep_mask(frames[entry.start_frame + t], pruned.kept));
    }
    const auto expected = pack_group(group, attribute_layout(0));
    const auto got = decode(dir.path(), report.manifest, g);
    CHECK(got.frames[2] == expected.frames[2]);
    CHECK(positions(unpack_frame(got, 2)).size() == kept.size());
  }
}

TEST_CASE("a prune ratio of 0 leaves counts untouched") {
  const auto frames = smooth_sequence(300, 3, 4);
  testing::TempDir dir;
  BakeOptions opt;
  opt.target_count = 10;
  opt.prune_ratio = 0.0;
  CHECK(bake(frames_in_memory(frames), dir.path(), opt).manifest.groups[0].splat_count == 300);
}

TEST_CASE("identical frames bake far smaller than random content") {
  const GaussianFrame still = random_frame(2000, 5);
  std::vector<GaussianFrame> same(20, still);
  std::vector<GaussianFrame> noise;
  for (int i = 0; i < 20; ++i) noise.push_back(random_frame(2000, 100 + i));

  testing::TempDir a, b;
  const double same_bytes = bake(frames_in_memory(same), a.path()).bytes_per_frame();
  const double noise_bytes = bake(frames_in_memory(noise), b.path()).bytes_per_frame();
  CAPTURE(same_bytes);
  CAPTURE(noise_bytes);
  CHECK(same_bytes < 0.25 * noise_bytes);
}

TEST_CASE("SH bands above the requested degree are dropped") {
  GaussianFrame f = random_frame(50, 3, 2);
  const auto t = truncate_sh(f, 1);
  CHECK(t.sh_degree == 1);
  for (std::size_t i = 0; i < f.size(); ++i) {
    REQUIRE(t.splats[i].sh.size() == 9);
    for (int c = 0; c < 3; ++c) {
      for (int k = 0; k < 3; ++k) CHECK(t.splats[i].sh[c * 3 + k] == f.splats[i].sh[c * 8 + k]);
    }
    CHECK(t.splats[i].color == f.splats[i].color);
  }
  CHECK(truncate_sh(f, 0).splats[0].sh.empty());
  CHECK(kind_of([&] { truncate_sh(f, 3); }) == ErrorKind::kInvalidArgument);

  std::vector<GaussianFrame> frames(3, f);
  testing::TempDir dir;
  BakeOptions opt;
  opt.sh_degree = 1;
  const auto m = bake(frames_in_memory(frames), dir.path(), opt).manifest;
  CHECK(m.sh_degree == 1);
  CHECK(m.groups[0].sh_degree == 1);
}

TEST_CASE("baking from a directory of frame files") {
  testing::TempDir in, out;
  const auto frames = smooth_sequence(150, 5, 8);
  for (int i = 0; i < 5; ++i) {
    write_splats(in / ("frame_" + std::to_string(1000 + i) + (i % 2 ? ".ply" : ".txt")), frames[i]);
  }
  const auto src = frames_in_directory(in.path());
  CHECK(src.count == 5);
  const auto m = bake(src, out.path()).manifest;
  CHECK(m.frame_count == 5);

  std::ofstream(in / "frame_1002.txt") << "not a splat file\n";
  testing::TempDir out2;
  CHECK_THROWS_AS(bake(frames_in_directory(in.path()), out2.path()), Error);

  testing::TempDir empty;
  CHECK(kind_of([&] { frames_in_directory(empty.path()); }) == ErrorKind::kNotFound);
  CHECK(kind_of([&] { frames_in_directory(empty / "missing"); }) == ErrorKind::kNotFound);
}

TEST_CASE("option validation") {
  const auto frames = smooth_sequence(50, 2, 1);
  testing::TempDir dir;
  for (auto edit : std::vector<std::function<void(BakeOptions&)>>{
           [](BakeOptions& o) { o.group_size = 0; },
           [](BakeOptions& o) { o.prune_ratio = 1.0; },
           [](BakeOptions& o) { o.prune_ratio = -0.1; },
           [](BakeOptions& o) { o.target_count = 0; },
           [](BakeOptions& o) { o.sh_degree = 4; },
           [](BakeOptions& o) { o.fps = 0; },
           [](BakeOptions& o) { o.codec.base_qp = 52; }}) {
    BakeOptions o;
    edit(o);
    CHECK(kind_of([&] { bake(frames_in_memory(frames), dir.path(), o); }) == ErrorKind::kOutOfRange);
  }
  CHECK(kind_of([&] { bake(FrameSource{}, dir.path()); }) == ErrorKind::kInvalidArgument);
}

TEST_CASE("baking 100k-splat frames stays under two seconds per frame") {
  // 120k input splats, so the keyframe prune runs as well.
  std::vector<GaussianFrame> frames;
  const auto base = random_frame(120000, 77);
  for (int i = 0; i < 4; ++i) {
    GaussianFrame f = base;
    for (auto& s : f.splats) s.position[0] += 0.001f * i;
    f.update_bbox();
    frames.push_back(std::move(f));
  }
  testing::TempDir dir;
  const auto report = bake(frames_in_memory(frames), dir.path());
  MESSAGE("bake " << report.seconds_per_frame() << " s/frame");
  CHECK(report.manifest.groups[0].splat_count <= 100000);
  CHECK(report.seconds_per_frame() < 2.0);
}

TEST_CASE("group-size sweep reports bytes per frame for each size") {
  const auto frames = smooth_sequence(300, 30, 6);
  const std::vector<int> sizes{10, 30};
  const auto rows = group_size_sweep(frames, sizes);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].groups == 3);
  CHECK(rows[1].groups == 1);
  std::uint64_t bytes = 0;
  for (const auto& g : encode_sequence(frames, 10, CodecConfig{})) bytes += g.total_bytes();
  CHECK(rows[0].bytes_per_frame == doctest::Approx(bytes / 30.0));
  const auto csv = group_sweep_csv(rows);
  CHECK(csv.rfind("group_size,groups,kb_per_frame\n10,3,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
