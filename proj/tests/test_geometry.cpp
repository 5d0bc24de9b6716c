#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "archgeo/geometry.hpp"
#include "archgeo/rng.hpp"
#include "doctest.h"
#include "support/helpers.hpp"

using namespace archgeo;

namespace {

Architecture nb(const std::string& s, Nb201Space space = Nb201Space{}) {
  return parse_nb201(s, space);
}

std::set<std::string> level_strings(const std::vector<Architecture>& archs) {
  std::set<std::string> out;
  for (const auto& a : archs) out.insert(canonical_string(a));
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("sequence spaces admit 6*(k-1) single moves") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Architecture a{testsupport::random_nb201_arch(rng)};
    const auto moves = atomic_moves(a);
    CHECK(moves.size() == 24);  // 6 positions x 4 alternative codes
    std::set<std::string> results;
    for (const auto& m : moves) {
      const Architecture b = apply_move(a, m);
      CHECK(distance(a, b) == 1);
      results.insert(canonical_string(b));
    }
    CHECK(results.size() == 24);  // duplicate-free
  }
  CHECK(atomic_moves(nb("0", Nb201Space{1, 2})).size() == 1);
}

TEST_CASE("cell-pair moves match the brute-force edit generator") {
  SplitMix64 rng(12);
  for (int trial = 0; trial < 25; ++trial) {
    const DartsArch arch = testsupport::random_darts_arch(rng);
    const Architecture a{arch};
    const auto moves = atomic_moves(a);
    // regression constant: 48 op changes + 84 adjustments per cell
    CHECK(moves.size() == 264);
    std::set<std::string> via_moves;
    for (const auto& m : moves) {
      const Architecture b = apply_move(a, m);
      const auto& d = std::get<DartsArch>(b);
      CHECK(validate_darts_cell(d.normal).empty());
      CHECK(validate_darts_cell(d.reduction).empty());
      via_moves.insert(canonical_string(b));
    }
    CHECK(via_moves == testsupport::brute_force_darts_neighbors(arch));
  }
}

TEST_CASE("apply changes exactly the stated locus") {
  const Architecture a = nb("0|1|3|2|4|0");
  const Architecture b = apply_move(a, Nb201Set{2, 0});
  CHECK(canonical_string(b) == "0|1|0|2|4|0");
  // inverse move restores the original
  CHECK(apply_move(b, Nb201Set{2, 3}) == a);
}

TEST_CASE("connection adjustment moves an edge within a row") {
  const Architecture a{testsupport::figure_arch()};
  const Architecture b =
      apply_move(a, DartsConnAdjust{CellId::normal, 1, 2, 1, 6});
  const auto& cell = std::get<DartsArch>(b).normal;
  CHECK(cell.at(1, 2) == 0);
  CHECK(cell.at(1, 1) == 6);
  CHECK(distance(a, b) == 1);
}

TEST_CASE("apply rejects illegal moves") {
  const Architecture a = nb("0|1|3|2|4|0");
  CHECK_THROWS_AS(apply_move(a, Nb201Set{2, 3}), std::invalid_argument);  // no-op
  CHECK_THROWS_AS(apply_move(a, Nb201Set{9, 1}), std::invalid_argument);
  CHECK_THROWS_AS(apply_move(a, Nb201Set{0, 7}), std::invalid_argument);
  CHECK_THROWS_AS(apply_move(a, DartsOpChange{CellId::normal, 0, 0, 1}),
                  std::invalid_argument);  // wrong space

  const Architecture d{testsupport::figure_arch()};
  CHECK_THROWS_AS(apply_move(d, DartsOpChange{CellId::normal, 0, 2, 1}),
                  std::invalid_argument);  // no edge there
  CHECK_THROWS_AS(apply_move(d, DartsOpChange{CellId::normal, 0, 0, 0}),
                  std::invalid_argument);  // zero op
  CHECK_THROWS_AS(apply_move(d, DartsConnAdjust{CellId::normal, 0, 0, 2, 3}),
                  std::invalid_argument);  // col 2 illegal for row 0
  CHECK_THROWS_AS(apply_move(d, DartsConnAdjust{CellId::normal, 1, 1, 0, 3}),
                  std::invalid_argument);  // col 1 carries no edge
}

TEST_CASE("distance basics") {
  const Architecture a = nb("0|0|0|0|0|0");
  CHECK(distance(a, a) == 0);
  CHECK(distance(a, nb("1|1|1|1|1|1")) == 6);
  CHECK(distance(nb("0|1|3|2|4|0"), nb("0|1|0|2|4|0")) == 1);
  CHECK_THROWS_AS(distance(a, nb("0|1|2", Nb201Space{3, 3})),
                  std::invalid_argument);
  CHECK_THROWS_AS(distance(a, Architecture{testsupport::figure_arch()}),
                  std::invalid_argument);
}

TEST_CASE("cell-pair distance equals the BFS shortest-move count") {
  SplitMix64 rng(13);
  int nontrivial = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const DartsArch base = testsupport::random_darts_arch(rng);
    Architecture a{base};
    Architecture b = a;
    const int edits = 1 + static_cast<int>(rng.below(3));
    for (int e = 0; e < edits; ++e) {
      const auto moves = atomic_moves(b);
      b = apply_move(b, moves[rng.below(moves.size())]);
    }
    const int d = distance(a, b);
    CHECK(d <= edits);
    CHECK(distance(b, a) == d);
    if (d == 0) {
      CHECK(a == b);
      continue;
    }
    ++nontrivial;
    CHECK(testsupport::bfs_move_distance(a, b, 4) == d);
  }
  CHECK(nontrivial >= 40);
}

TEST_CASE("triangle inequality on sampled triples") {
  SplitMix64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const Architecture a{testsupport::random_nb201_arch(rng)};
    const Architecture b{testsupport::random_nb201_arch(rng)};
    const Architecture c{testsupport::random_nb201_arch(rng)};
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c));
  }
  for (int trial = 0; trial < 30; ++trial) {
    const Architecture a{testsupport::random_darts_arch(rng)};
    const Architecture b{testsupport::random_darts_arch(rng)};
    const Architecture c{testsupport::random_darts_arch(rng)};
    CHECK(distance(a, c) <= distance(a, b) + distance(b, c));
  }
}

TEST_CASE("radius neighborhoods have the closed-form sizes") {
  SplitMix64 rng(15);
  const Architecture a{testsupport::random_nb201_arch(rng)};
  CHECK(neighbors_at_radius(a, 1).size() == 24);
  CHECK(neighbors_at_radius(a, 2).size() == 240);
  CHECK(neighbors_at_radius(a, 6).size() == 4096);
  CHECK_THROWS_AS(neighbors_at_radius(a, 7), std::invalid_argument);
  CHECK_THROWS_AS(neighbors_at_radius(a, 0), std::invalid_argument);

  for (int r = 1; r <= 6; ++r) {
    const auto set = neighbors_at_radius(a, r);
    for (const auto& n : set) CHECK(distance(a, n) == r);
    std::set<std::string> uniq = level_strings(set);
    CHECK(uniq.size() == set.size());
  }
}

TEST_CASE("radius-1 symmetry between sequence architectures") {
  SplitMix64 rng(16);
  const Architecture a{testsupport::random_nb201_arch(rng)};
  for (int r = 1; r <= 3; ++r) {
    for (const auto& b : neighbors_at_radius(a, r)) {
      const auto back = neighbors_at_radius(b, r);
      CHECK(std::any_of(back.begin(), back.end(),
                        [&](const Architecture& x) { return x == a; }));
    }
    if (r == 2) break;  // radius 3 takes 1280 * 1280 membership checks
  }
}

TEST_CASE("cell-pair radius-1 neighborhood via BFS matches move results") {
  SplitMix64 rng(17);
  const DartsArch arch = testsupport::random_darts_arch(rng);
  const auto set = neighbors_at_radius(Architecture{arch}, 1);
  CHECK(level_strings(set) == testsupport::brute_force_darts_neighbors(arch));
}

TEST_CASE("neighbor tree of the 3-sequence toy space") {
  const Architecture root = nb("0|1|2", Nb201Space{3, 3});
  const NeighborTree tree = build_neighbor_tree(root, 3);
  REQUIRE(tree.levels.size() == 4);
  CHECK(tree.raw_counts == std::vector<std::uint64_t>{1, 6, 24, 48});
  CHECK(tree.unique_level(0).size() == 1);
  CHECK(tree.unique_level(1).size() == 6);
  CHECK(tree.unique_level(2).size() == 12);
  CHECK(tree.unique_level(3).size() == 8);

  for (std::size_t r = 0; r < tree.levels.size(); ++r) {
    for (const auto& node : tree.levels[r]) {
      CHECK(node.history.size() == r);
      CHECK(distance(root, node.arch) == static_cast<int>(r));
      std::set<int> loci(node.loci.begin(), node.loci.end());
      CHECK(loci.size() == r);  // no locus twice
    }
    if (r >= 1) {
      const auto uniq = tree.unique_level(static_cast<int>(r));
      const auto direct = neighbors_at_radius(root, static_cast<int>(r));
      CHECK(level_strings(uniq) == level_strings(direct));
    }
  }
}

TEST_CASE("neighbor tree trivia") {
  const Architecture root = nb("0|1|2", Nb201Space{3, 3});
  const NeighborTree single = build_neighbor_tree(root, 0);
  CHECK(single.levels.size() == 1);
  CHECK(single.raw_counts == std::vector<std::uint64_t>{1});

  CHECK_THROWS_AS(build_neighbor_tree(root, 3, 10), std::overflow_error);

  // raw level counts follow the falling-product formula P(L,r)*(k-1)^r
  SplitMix64 rng(18);
  const Architecture a{testsupport::random_nb201_arch(rng)};
  const NeighborTree tree = build_neighbor_tree(a, 2, 200000);
  CHECK(tree.raw_counts[1] == 24);        // 6 * 4
  CHECK(tree.raw_counts[2] == 6 * 5 * 16);  // P(6,2) * 4^2
}

TEST_CASE("locus rule keeps distinct rows for cell pairs") {
  SplitMix64 rng(19);
  const Architecture a{testsupport::random_darts_arch(rng)};
  const NeighborTree tree = build_neighbor_tree(a, 2, 500000);
  for (const auto& node : tree.levels[2]) {
    CHECK(distance(a, node.arch) == 2);
    CHECK(node.loci[0] != node.loci[1]);
  }
  // radius-1 level projects onto the exact radius-1 neighborhood
  CHECK(level_strings(tree.unique_level(1)) ==
        level_strings(neighbors_at_radius(a, 1)));
}

TEST_CASE("path tree of the toy pair matches the worked structure") {
  const Architecture a = nb("0|1|2", Nb201Space{3, 3});
  const Architecture b = nb("1|2|1", Nb201Space{3, 3});
  const PathTree tree = build_path_tree(a, b);
  REQUIRE(tree.total_distance() == 3);
  CHECK(tree.raw_counts == std::vector<std::uint64_t>{1, 3, 6, 6});
  CHECK(tree.levels[0].size() == 1);
  CHECK(tree.levels[1].size() == 3);
  CHECK(tree.levels[2].size() == 3);  // duplicates collapse
  CHECK(tree.levels[3].size() == 1);
  CHECK(level_strings(tree.levels[1]) ==
        std::set<std::string>{"1|1|2", "0|2|2", "0|1|1"});
  CHECK(level_strings(tree.levels[2]) ==
        std::set<std::string>{"1|2|2", "1|1|1", "0|2|1"});
}

TEST_CASE("path tree level invariants and symmetry") {
  SplitMix64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const Architecture a{testsupport::random_nb201_arch(rng)};
    Architecture b = a;
    while (b == a) b = Architecture{testsupport::random_nb201_arch(rng)};
    const int d = distance(a, b);
    const PathTree fwd = build_path_tree(a, b);
    const PathTree bwd = build_path_tree(b, a);
    REQUIRE(fwd.total_distance() == d);
    for (int r = 0; r <= d; ++r) {
      for (const auto& arch : fwd.levels[r]) {
        CHECK(distance(a, arch) == r);
        CHECK(distance(arch, b) == d - r);
      }
      CHECK(level_strings(fwd.levels[r]) == level_strings(bwd.levels[d - r]));
    }
    // unique level sizes are binomial for sequence spaces
    for (int r = 0; r <= d; ++r) {
      std::uint64_t binom = 1;
      for (int i = 0; i < r; ++i) binom = binom * (d - i) / (i + 1);
      CHECK(fwd.levels[r].size() == binom);
    }
  }
}

TEST_CASE("distance-3 sequence pairs have 3-3 intermediate levels") {
  SplitMix64 rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    const Architecture a{testsupport::random_nb201_arch(rng)};
    Architecture b = a;
    // pick three distinct positions and change them
    const auto& codes = std::get<Nb201Arch>(a).codes;
    std::set<int> positions;
    while (positions.size() < 3)
      positions.insert(static_cast<int>(rng.below(codes.size())));
    for (int pos : positions) {
      int code = codes[pos];
      while (code == codes[pos]) code = static_cast<int>(rng.below(5));
      b = apply_move(b, Nb201Set{pos, code});
    }
    REQUIRE(distance(a, b) == 3);
    const PathTree tree = build_path_tree(a, b);
    CHECK(tree.levels[1].size() == 3);
    CHECK(tree.levels[2].size() == 3);
  }
}

TEST_CASE("path trees for cell pairs use distance-decreasing moves") {
  SplitMix64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const Architecture a{testsupport::random_darts_arch(rng)};
    Architecture b = a;
    for (int e = 0; e < 3; ++e) {
      const auto moves = atomic_moves(b);
      b = apply_move(b, moves[rng.below(moves.size())]);
    }
    if (a == b) continue;
    const int d = distance(a, b);
    const PathTree fwd = build_path_tree(a, b);
    const PathTree bwd = build_path_tree(b, a);
    REQUIRE(fwd.total_distance() == d);
    for (int r = 0; r <= d; ++r) {
      for (const auto& arch : fwd.levels[r]) {
        CHECK(distance(a, arch) == r);
        CHECK(distance(arch, b) == d - r);
      }
      CHECK(level_strings(fwd.levels[r]) == level_strings(bwd.levels[d - r]));
    }
  }
}

TEST_CASE("path tree trivial and error cases") {
  const Architecture a = nb("0|0|0|0|0|0");
  const Architecture b = nb("1|0|0|0|0|0");
  const PathTree tree = build_path_tree(a, b);
  CHECK(tree.levels.size() == 2);
  CHECK(tree.levels[0][0] == a);
  CHECK(tree.levels[1][0] == b);
  CHECK_THROWS_AS(build_path_tree(a, a), std::invalid_argument);
  CHECK_THROWS_AS(build_path_tree(a, nb("1|1|1|1|1|1"), 3),
                  std::overflow_error);
}

TEST_SUITE_END();
