#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include "archgeo/arch_space.hpp"

namespace archgeo {

// ---------------------------------------------------------------------------
// Atomic modifications
// ---------------------------------------------------------------------------

enum class CellId { normal, reduction };

inline const char* to_string(CellId c) {
  return c == CellId::normal ? "normal" : "reduction";
}

/// Set one sequence position to a different code.
struct Nb201Set {
  int position;
  int new_code;
  friend auto operator<=>(const Nb201Set&, const Nb201Set&) = default;
};

/// Replace the operation on an existing cell edge.
struct DartsOpChange {
  CellId cell;
  int row;
  int column;
  int new_op;
  friend auto operator<=>(const DartsOpChange&, const DartsOpChange&) = default;
};

/// Move one predecessor of a row to a free legal column, choosing the new
/// edge's operation. Touches two matrix entries but counts as one move.
struct DartsConnAdjust {
  CellId cell;
  int row;
  int removed_column;
  int added_column;
  int added_op;
  friend auto operator<=>(const DartsConnAdjust&,
                          const DartsConnAdjust&) = default;
};

using AtomicMove = std::variant<Nb201Set, DartsOpChange, DartsConnAdjust>;

/// The locus a move touches: an NB201 position, or a DARTS (cell,row) slot
/// encoded as cell*nodes + row. Neighbor trees never revisit a locus.
inline int locus_of(const AtomicMove& m, const SpaceDesc& space) {
  if (const auto* s = std::get_if<Nb201Set>(&m)) return s->position;
  const int nodes = std::get<DartsSpace>(space).nodes;
  if (const auto* oc = std::get_if<DartsOpChange>(&m))
    return static_cast<int>(oc->cell) * nodes + oc->row;
  const auto& ca = std::get<DartsConnAdjust>(m);
  return static_cast<int>(ca.cell) * nodes + ca.row;
}

// ---------------------------------------------------------------------------
// Moves and distance
// ---------------------------------------------------------------------------

namespace detail {
inline const DartsCell& cell_of(const DartsArch& a, CellId id) {
  return id == CellId::normal ? a.normal : a.reduction;
}
inline DartsCell& cell_of(DartsArch& a, CellId id) {
  return id == CellId::normal ? a.normal : a.reduction;
}

inline void append_cell_moves(const DartsCell& cell, CellId id,
                              std::vector<AtomicMove>& out) {
  for (int row = 0; row < cell.nodes; ++row) {
    for (int col = 0; col < cell.cols(); ++col) {
      const int cur = cell.at(row, col);
      if (cur == 0) continue;
      for (int op = 1; op < cell.num_ops; ++op)
        if (op != cur) out.push_back(DartsOpChange{id, row, col, op});
    }
    for (int removed = 0; removed < cell.cols(); ++removed) {
      if (cell.at(row, removed) == 0) continue;
      for (int added = 0; added < cell.cols(); ++added) {
        if (cell.at(row, added) != 0 || !DartsCell::col_legal(row, added))
          continue;
        for (int op = 1; op < cell.num_ops; ++op)
          out.push_back(DartsConnAdjust{id, row, removed, added, op});
      }
    }
  }
}

inline int cell_distance(const DartsCell& a, const DartsCell& b) {
  int d = 0;
  for (int row = 0; row < a.nodes; ++row) {
    for (int col = 0; col < a.cols(); ++col) {
      const int va = a.at(row, col);
      const int vb = b.at(row, col);
      if (va != 0 && vb != 0 && va != vb) ++d;  // shared edge, different op
      if (va != 0 && vb == 0) ++d;              // edge to relocate
    }
  }
  return d;
}
}  // namespace detail

/// Every legal atomic move from `a`, duplicate-free, in a fixed order
/// (cell, row, column, op ascending).
inline std::vector<AtomicMove> atomic_moves(const Architecture& a) {
  std::vector<AtomicMove> out;
  if (const auto* n = std::get_if<Nb201Arch>(&a)) {
    for (int pos = 0; pos < static_cast<int>(n->codes.size()); ++pos)
      for (int code = 0; code < n->num_ops; ++code)
        if (code != n->codes[pos]) out.push_back(Nb201Set{pos, code});
    return out;
  }
  const auto& d = std::get<DartsArch>(a);
  detail::append_cell_moves(d.normal, CellId::normal, out);
  detail::append_cell_moves(d.reduction, CellId::reduction, out);
  return out;
}

/// Applies one atomic move; throws std::invalid_argument when the move does
/// not match the architecture's current state or violates a constraint.
inline Architecture apply_move(const Architecture& a, const AtomicMove& m) {
  if (const auto* n = std::get_if<Nb201Arch>(&a)) {
    const auto* s = std::get_if<Nb201Set>(&m);
    if (!s) throw std::invalid_argument("apply: move is for the wrong space");
    if (s->position < 0 || s->position >= static_cast<int>(n->codes.size()))
      throw std::invalid_argument("apply: position out of range");
    if (s->new_code < 0 || s->new_code >= n->num_ops)
      throw std::invalid_argument("apply: code out of range");
    if (s->new_code == n->codes[s->position])
      throw std::invalid_argument("apply: code equals current value");
    Nb201Arch out = *n;
    out.codes[s->position] = s->new_code;
    return out;
  }

  DartsArch out = std::get<DartsArch>(a);
  if (const auto* oc = std::get_if<DartsOpChange>(&m)) {
    DartsCell& cell = detail::cell_of(out, oc->cell);
    if (oc->row < 0 || oc->row >= cell.nodes || oc->column < 0 ||
        oc->column >= cell.cols())
      throw std::invalid_argument("apply: row/column out of range");
    if (cell.at(oc->row, oc->column) == 0)
      throw std::invalid_argument("apply: no edge at (row,column)");
    if (oc->new_op <= 0 || oc->new_op >= cell.num_ops)
      throw std::invalid_argument("apply: op out of range");
    if (oc->new_op == cell.at(oc->row, oc->column))
      throw std::invalid_argument("apply: op equals current value");
    cell.at(oc->row, oc->column) = oc->new_op;
    return out;
  }
  if (const auto* ca = std::get_if<DartsConnAdjust>(&m)) {
    DartsCell& cell = detail::cell_of(out, ca->cell);
    if (ca->row < 0 || ca->row >= cell.nodes || ca->removed_column < 0 ||
        ca->removed_column >= cell.cols() || ca->added_column < 0 ||
        ca->added_column >= cell.cols())
      throw std::invalid_argument("apply: row/column out of range");
    if (cell.at(ca->row, ca->removed_column) == 0)
      throw std::invalid_argument("apply: removed column has no edge");
    if (cell.at(ca->row, ca->added_column) != 0)
      throw std::invalid_argument("apply: added column already has an edge");
    if (!DartsCell::col_legal(ca->row, ca->added_column))
      throw std::invalid_argument("apply: predecessor after node");
    if (ca->added_op <= 0 || ca->added_op >= cell.num_ops)
      throw std::invalid_argument("apply: op out of range");
    cell.at(ca->row, ca->removed_column) = 0;
    cell.at(ca->row, ca->added_column) = ca->added_op;
    return out;
  }
  throw std::invalid_argument("apply: move is for the wrong space");
}

/// Architectural distance: the minimal number of atomic moves between two
/// architectures of the same space. Sequences use Hamming distance; cell
/// pairs sum, per row, op mismatches on shared predecessors plus
/// predecessors that must be relocated.
inline int distance(const Architecture& a, const Architecture& b) {
  if (!(space_of(a) == space_of(b)))
    throw std::invalid_argument("distance: architectures from different spaces");
  if (const auto* na = std::get_if<Nb201Arch>(&a)) {
    const auto& nb = std::get<Nb201Arch>(b);
    int d = 0;
    for (std::size_t i = 0; i < na->codes.size(); ++i)
      d += na->codes[i] != nb.codes[i];
    return d;
  }
  const auto& da = std::get<DartsArch>(a);
  const auto& db = std::get<DartsArch>(b);
  return detail::cell_distance(da.normal, db.normal) +
         detail::cell_distance(da.reduction, db.reduction);
}

/// Largest distance two architectures of the space can have.
inline int max_distance(const SpaceDesc& space) {
  if (const auto* n = std::get_if<Nb201Space>(&space)) return n->length;
  return 4 * std::get<DartsSpace>(space).nodes;  // 2 per row, 2 cells
}

// ---------------------------------------------------------------------------
// Neighborhoods
// ---------------------------------------------------------------------------

namespace detail {
// Enumerates the exact radius-r set of a sequence space directly: choose r
// positions, assign each a code differing from the current one.
inline void nb201_radius_rec(const Nb201Arch& base, int r, int first_pos,
                             Nb201Arch& scratch,
                             std::vector<Architecture>& out) {
  if (r == 0) {
    out.push_back(scratch);
    return;
  }
  const int len = static_cast<int>(base.codes.size());
  for (int pos = first_pos; pos <= len - r; ++pos) {
    for (int code = 0; code < base.num_ops; ++code) {
      if (code == base.codes[pos]) continue;
      scratch.codes[pos] = code;
      nb201_radius_rec(base, r - 1, pos + 1, scratch, out);
      scratch.codes[pos] = base.codes[pos];
    }
  }
}
}  // namespace detail

/// All unique architectures at distance exactly r from `a`.
/// Cell-pair spaces fall back to breadth-first expansion; `cap` bounds the
/// number of distinct architectures visited before failing loudly.
inline std::vector<Architecture> neighbors_at_radius(const Architecture& a,
                                                     int r,
                                                     std::uint64_t cap = 1000000) {
  if (r < 1) throw std::invalid_argument("neighbors_at_radius: radius < 1");
  const int max_r = max_distance(space_of(a));
  if (r > max_r)
    throw std::invalid_argument("neighbors_at_radius: radius exceeds " +
                                std::to_string(max_r));
  if (const auto* n = std::get_if<Nb201Arch>(&a)) {
    std::vector<Architecture> out;
    Nb201Arch scratch = *n;
    detail::nb201_radius_rec(*n, r, 0, scratch, out);
    return out;
  }
  // BFS by exact level; every arch first reached at depth d has distance d.
  std::unordered_set<std::string> seen{canonical_string(a)};
  std::vector<Architecture> frontier{a};
  for (int depth = 1; depth <= r; ++depth) {
    std::vector<Architecture> next;
    for (const auto& cur : frontier) {
      for (const auto& m : atomic_moves(cur)) {
        Architecture child = apply_move(cur, m);
        if (seen.insert(canonical_string(child)).second) {
          next.push_back(std::move(child));
          if (seen.size() > cap)
            throw std::overflow_error(
                "neighbors_at_radius: expansion exceeds cap");
        }
      }
    }
    frontier = std::move(next);
  }
  std::sort(frontier.begin(), frontier.end(), arch_less);
  return frontier;
}

// ---------------------------------------------------------------------------
// Neighbor trees
// ---------------------------------------------------------------------------

struct TreeNode {
  Architecture arch;
  std::vector<AtomicMove> history;  // moves from the root, in order
  std::vector<int> loci;            // loci touched by the history
};

/// Level-structured enumeration of non-reverting modification sequences:
/// level r holds every sequence of r moves on r distinct loci. For sequence
/// spaces the unique architectures of level r are exactly the radius-r
/// neighborhood; for cell pairs deeper levels omit architectures that need
/// two moves on one (cell,row) slot.
struct NeighborTree {
  Architecture root;
  std::vector<std::vector<TreeNode>> levels;  // levels[0] = {root}
  std::vector<std::uint64_t> raw_counts;      // nodes per level

  /// Unique architectures of one level, sorted.
  std::vector<Architecture> unique_level(int r) const {
    std::vector<Architecture> out;
    out.reserve(levels.at(r).size());
    for (const auto& node : levels.at(r)) out.push_back(node.arch);
    std::sort(out.begin(), out.end(), arch_less);
    out.erase(std::unique(out.begin(), out.end(),
                          [](const auto& x, const auto& y) { return x == y; }),
              out.end());
    return out;
  }
};

inline NeighborTree build_neighbor_tree(const Architecture& root, int max_r,
                                        std::uint64_t node_cap = 1000000) {
  if (max_r < 0) throw std::invalid_argument("build_neighbor_tree: max_r < 0");
  const SpaceDesc space = space_of(root);
  NeighborTree tree{root, {}, {}};
  tree.levels.push_back({TreeNode{root, {}, {}}});
  tree.raw_counts.push_back(1);
  std::uint64_t total = 1;
  for (int r = 1; r <= max_r; ++r) {
    std::vector<TreeNode> level;
    for (const auto& node : tree.levels.back()) {
      for (const auto& m : atomic_moves(node.arch)) {
        const int locus = locus_of(m, space);
        bool fresh = true;
        for (int l : node.loci)
          if (l == locus) {
            fresh = false;
            break;
          }
        if (!fresh) continue;
        TreeNode child{apply_move(node.arch, m), node.history, node.loci};
        child.history.push_back(m);
        child.loci.push_back(locus);
        level.push_back(std::move(child));
        if (++total > node_cap)
          throw std::overflow_error("build_neighbor_tree: node cap " +
                                    std::to_string(node_cap) + " exceeded");
      }
    }
    if (level.empty()) break;  // every locus touched already
    tree.raw_counts.push_back(level.size());
    tree.levels.push_back(std::move(level));
  }
  return tree;
}

// ---------------------------------------------------------------------------
// Path trees
// ---------------------------------------------------------------------------

/// All shortest modification sequences from source to target, collapsed to
/// unique architectures per level. raw_counts[r] is the number of distinct
/// r-move prefixes over all shortest paths.
struct PathTree {
  Architecture source;
  Architecture target;
  std::vector<std::vector<Architecture>> levels;  // unique, sorted per level
  std::vector<std::uint64_t> raw_counts;

  int total_distance() const { return static_cast<int>(levels.size()) - 1; }
};

namespace detail {
/// Directed moves: one atomic move that brings `cur` strictly closer to
/// `target`. Sequences admit the closed form "set one differing position to
/// the target's code"; cell pairs filter all moves by the distance drop.
inline std::vector<Architecture> directed_children(const Architecture& cur,
                                                   const Architecture& target) {
  std::vector<Architecture> out;
  if (const auto* n = std::get_if<Nb201Arch>(&cur)) {
    const auto& t = std::get<Nb201Arch>(target);
    for (int pos = 0; pos < static_cast<int>(n->codes.size()); ++pos)
      if (n->codes[pos] != t.codes[pos])
        out.push_back(apply_move(cur, Nb201Set{pos, t.codes[pos]}));
    return out;
  }
  const int d = distance(cur, target);
  for (const auto& m : atomic_moves(cur)) {
    Architecture child = apply_move(cur, m);
    if (distance(child, target) == d - 1) out.push_back(std::move(child));
  }
  return out;
}
}  // namespace detail

inline PathTree build_path_tree(const Architecture& source,
                                const Architecture& target,
                                std::uint64_t node_cap = 1000000) {
  if (source == target)
    throw std::invalid_argument("build_path_tree: source equals target");
  if (!(space_of(source) == space_of(target)))
    throw std::invalid_argument("build_path_tree: different spaces");

  PathTree tree{source, target, {}, {}};
  // Multiplicity = number of distinct move sequences reaching the arch.
  auto cmp = [](const Architecture& x, const Architecture& y) {
    return arch_less(x, y);
  };
  std::map<Architecture, std::uint64_t, decltype(cmp)> frontier(cmp);
  frontier.emplace(source, 1);
  const int d = distance(source, target);
  std::uint64_t total = 1;
  for (int r = 0; r < d; ++r) {
    std::vector<Architecture> level;
    std::uint64_t raw = 0;
    for (const auto& [arch, mult] : frontier) {
      level.push_back(arch);
      raw += mult;
    }
    tree.levels.push_back(std::move(level));
    tree.raw_counts.push_back(raw);

    std::map<Architecture, std::uint64_t, decltype(cmp)> next(cmp);
    for (const auto& [arch, mult] : frontier) {
      for (auto& child : detail::directed_children(arch, target)) {
        next[std::move(child)] += mult;
        if (++total > node_cap)
          throw std::overflow_error("build_path_tree: node cap " +
                                    std::to_string(node_cap) + " exceeded");
      }
    }
    frontier = std::move(next);
  }
  std::vector<Architecture> last;
  std::uint64_t raw = 0;
  for (const auto& [arch, mult] : frontier) {
    last.push_back(arch);
    raw += mult;
  }
  tree.levels.push_back(std::move(last));
  tree.raw_counts.push_back(raw);
  return tree;
}

}  // namespace archgeo
