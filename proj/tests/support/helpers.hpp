#pragma once

// Shared test fixtures and independent oracles. Everything here is kept
// deliberately separate from the library's own enumeration/validation code
// paths so tests cross-check rather than echo the implementation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "archgeo/arch_space.hpp"
#include "archgeo/geometry.hpp"
#include "archgeo/rng.hpp"

namespace testsupport {

using namespace archgeo;

struct CellEntry {
  int row, col, op;
};

inline DartsCell make_cell(std::initializer_list<CellEntry> entries,
                           int nodes = 4, int num_ops = 8) {
  DartsCell cell(nodes, num_ops);
  for (const auto& e : entries) cell.at(e.row, e.col) = e.op;
  return cell;
}

/// A valid cell laid out like the adjacency-matrix illustration: row 1 has
/// predecessors at columns 0 and 2, so moving the column-2 edge to column 1
/// is a legal connection adjustment.
inline DartsCell figure_cell() {
  return make_cell({{0, 0, 4}, {0, 1, 3}, {1, 0, 1}, {1, 2, 5},
                    {2, 1, 6}, {2, 3, 2}, {3, 0, 7}, {3, 4, 1}});
}

inline DartsArch figure_arch() {
  DartsCell reduction = make_cell({{0, 0, 2}, {0, 1, 1}, {1, 1, 4}, {1, 2, 3},
                                   {2, 0, 5}, {2, 2, 7}, {3, 2, 6}, {3, 3, 4}});
  return DartsArch(figure_cell(), reduction);
}

/// Independent row scanner: valid iff every row has exactly two non-zero
/// entries, on distinct columns, each at column <= row+1, ops in range.
inline bool brute_force_cell_valid(const DartsCell& cell) {
  for (int r = 0; r < cell.nodes; ++r) {
    std::vector<int> cols;
    for (int c = 0; c < cell.cols(); ++c) {
      const int op = cell.at(r, c);
      if (op < 0 || op >= cell.num_ops) return false;
      if (op != 0) cols.push_back(c);
    }
    if (cols.size() != 2) return false;
    if (cols[0] == cols[1]) return false;
    for (int c : cols)
      if (c > r + 1) return false;
  }
  return true;
}

inline DartsCell random_valid_cell(SplitMix64& rng, int nodes = 4,
                                   int num_ops = 8) {
  DartsCell cell(nodes, num_ops);
  for (int r = 0; r < nodes; ++r) {
    const int legal = std::min(r + 2, cell.cols());
    int c1 = static_cast<int>(rng.below(legal));
    int c2 = static_cast<int>(rng.below(legal - 1));
    if (c2 >= c1) ++c2;
    cell.at(r, c1) = 1 + static_cast<int>(rng.below(num_ops - 1));
    cell.at(r, c2) = 1 + static_cast<int>(rng.below(num_ops - 1));
  }
  return cell;
}

inline DartsArch random_darts_arch(SplitMix64& rng, int nodes = 4,
                                   int num_ops = 8) {
  return DartsArch(random_valid_cell(rng, nodes, num_ops),
                   random_valid_cell(rng, nodes, num_ops));
}

inline Nb201Arch random_nb201_arch(SplitMix64& rng,
                                   const Nb201Space& space = Nb201Space{}) {
  std::vector<int> codes(space.length);
  for (auto& c : codes) c = static_cast<int>(rng.below(space.num_ops));
  return Nb201Arch(std::move(codes), space.num_ops);
}

/// Brute-force neighbor generator for cell-pair architectures: every single
/// entry write, and every zero-one-entry + write-another-entry pair within a
/// row, filtered by the independent validity scanner. Returns canonical
/// strings of the distinct resulting architectures.
inline std::set<std::string> brute_force_darts_neighbors(const DartsArch& a) {
  std::set<std::string> out;
  auto consider = [&](const DartsArch& cand) {
    if (cand == a) return;
    if (brute_force_cell_valid(cand.normal) &&
        brute_force_cell_valid(cand.reduction))
      out.insert(canonical_string(Architecture{cand}));
  };
  for (int which = 0; which < 2; ++which) {
    const DartsCell& cell = which == 0 ? a.normal : a.reduction;
    auto with_cell = [&](const DartsCell& c) {
      DartsArch cand = a;
      (which == 0 ? cand.normal : cand.reduction) = c;
      return cand;
    };
    // single-entry writes
    for (int r = 0; r < cell.nodes; ++r)
      for (int c = 0; c < cell.cols(); ++c)
        for (int op = 0; op < cell.num_ops; ++op) {
          if (op == cell.at(r, c)) continue;
          DartsCell mod = cell;
          mod.at(r, c) = op;
          consider(with_cell(mod));
        }
    // zero one entry, write another (same row)
    for (int r = 0; r < cell.nodes; ++r)
      for (int c1 = 0; c1 < cell.cols(); ++c1) {
        if (cell.at(r, c1) == 0) continue;
        for (int c2 = 0; c2 < cell.cols(); ++c2) {
          if (c2 == c1 || cell.at(r, c2) != 0) continue;
          for (int op = 1; op < cell.num_ops; ++op) {
            DartsCell mod = cell;
            mod.at(r, c1) = 0;
            mod.at(r, c2) = op;
            consider(with_cell(mod));
          }
        }
      }
  }
  return out;
}

/// Plain bidirectional BFS shortest-move-count oracle. Expands the smaller
/// frontier first; depth_cap bounds the total search depth.
inline int bfs_move_distance(const Architecture& a, const Architecture& b,
                             int depth_cap = 6) {
  if (a == b) return 0;
  std::map<std::string, int> da{{canonical_string(a), 0}};
  std::map<std::string, int> db{{canonical_string(b), 0}};
  std::vector<Architecture> fa{a}, fb{b};
  int depth_a = 0, depth_b = 0;
  auto meet = [&]() -> int {
    int best = -1;
    for (const auto& [s, dist_a] : da) {
      auto it = db.find(s);
      if (it != db.end()) {
        const int total = dist_a + it->second;
        if (best < 0 || total < best) best = total;
      }
    }
    return best;
  };
  while (depth_a + depth_b < depth_cap) {
    int found = meet();
    if (found >= 0) return found;
    auto expand = [&](std::vector<Architecture>& frontier,
                      std::map<std::string, int>& seen, int& depth) {
      ++depth;
      std::vector<Architecture> next;
      for (const auto& cur : frontier)
        for (const auto& m : atomic_moves(cur)) {
          Architecture child = apply_move(cur, m);
          auto key = canonical_string(child);
          if (seen.emplace(std::move(key), depth).second)
            next.push_back(std::move(child));
        }
      frontier = std::move(next);
    };
    if (fa.size() <= fb.size())
      expand(fa, da, depth_a);
    else
      expand(fb, db, depth_b);
  }
  const int found = meet();
  return found >= 0 ? found : -1;
}

}  // namespace testsupport
