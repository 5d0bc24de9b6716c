#pragma once

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace archgeo {

// ---------------------------------------------------------------------------
// Operation sets
// ---------------------------------------------------------------------------

/// Ordered list of candidate operation labels for a cell edge. When the set
/// contains a "no edge" operation its index is recorded in zero_index.
class OperationSet {
 public:
  OperationSet(std::vector<std::string> names, std::optional<int> zero_index)
      : names_(std::move(names)), zero_index_(zero_index) {
    if (names_.empty()) throw std::invalid_argument("OperationSet: empty");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty())
        throw std::invalid_argument("OperationSet: empty label");
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j])
          throw std::invalid_argument("OperationSet: duplicate label '" +
                                      names_[i] + "'");
    }
    if (zero_index_ && (*zero_index_ < 0 ||
                        *zero_index_ >= static_cast<int>(names_.size())))
      throw std::invalid_argument("OperationSet: zero_index out of range");
  }

  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(int i) const { return names_.at(i); }
  const std::vector<std::string>& names() const { return names_; }
  std::optional<int> zero_index() const { return zero_index_; }

  int index_of(std::string_view label) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == label) return static_cast<int>(i);
    throw std::invalid_argument("OperationSet: unknown op '" +
                                std::string(label) + "'");
  }

 private:
  std::vector<std::string> names_;
  std::optional<int> zero_index_;
};

/// The five NAS-Bench-201 edge operations, zero op at index 0.
inline const OperationSet& nb201_ops() {
  static const OperationSet ops({"none", "skip_connect", "nor_conv_1x1",
                                 "nor_conv_3x3", "avg_pool_3x3"},
                                0);
  return ops;
}

/// The eight DARTS edge operations, zero op at index 0.
inline const OperationSet& darts_ops() {
  static const OperationSet ops(
      {"none", "max_pool_3x3", "avg_pool_3x3", "skip_connect", "sep_conv_3x3",
       "sep_conv_5x5", "dil_conv_3x3", "dil_conv_5x5"},
      0);
  return ops;
}

// ---------------------------------------------------------------------------
// Space descriptors
// ---------------------------------------------------------------------------

/// Sequence space: architectures are length-L code vectors over k operations.
struct Nb201Space {
  int length = 6;
  int num_ops = 5;
  friend bool operator==(const Nb201Space&, const Nb201Space&) = default;
};

/// Cell-pair space: normal + reduction cells with `nodes` intermediate nodes
/// and num_ops operations (index 0 = no edge).
struct DartsSpace {
  int nodes = 4;
  int num_ops = 8;
  friend bool operator==(const DartsSpace&, const DartsSpace&) = default;
};

using SpaceDesc = std::variant<Nb201Space, DartsSpace>;

inline bool operator==(const SpaceDesc& a, const SpaceDesc& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<Nb201Space>(a))
    return std::get<Nb201Space>(a) == std::get<Nb201Space>(b);
  return std::get<DartsSpace>(a) == std::get<DartsSpace>(b);
}

// ---------------------------------------------------------------------------
// Architectures
// ---------------------------------------------------------------------------

/// NAS-Bench-201 style architecture: a code per edge of the fixed 4-node DAG,
/// listed in the canonical edge order (0,1),(0,2),(1,2),(0,3),(1,3),(2,3).
struct Nb201Arch {
  std::vector<int> codes;
  int num_ops = 5;

  Nb201Arch() = default;
  Nb201Arch(std::vector<int> c, int k) : codes(std::move(c)), num_ops(k) {
    if (num_ops < 1) throw std::invalid_argument("Nb201Arch: num_ops < 1");
    if (codes.empty()) throw std::invalid_argument("Nb201Arch: empty codes");
    for (int v : codes)
      if (v < 0 || v >= num_ops)
        throw std::invalid_argument("Nb201Arch: code " + std::to_string(v) +
                                    " out of range [0," +
                                    std::to_string(num_ops) + ")");
  }

  Nb201Space space() const {
    return Nb201Space{static_cast<int>(codes.size()), num_ops};
  }

  friend bool operator==(const Nb201Arch&, const Nb201Arch&) = default;
  friend auto operator<=>(const Nb201Arch&, const Nb201Arch&) = default;
};

/// One DARTS cell as a nodes x (nodes+1) operation matrix, row-major.
/// Row i is intermediate node i; columns 0,1 are the two cell inputs and
/// column j >= 2 is intermediate node j-2, so a predecessor is legal at
/// column j iff j <= i+1. Entry 0 means no edge.
struct DartsCell {
  int nodes = 4;
  int num_ops = 8;
  std::vector<int> ops;  // nodes rows x (nodes+1) columns

  DartsCell() : ops(static_cast<std::size_t>(nodes) * (nodes + 1), 0) {}
  DartsCell(int n, int k)
      : nodes(n), num_ops(k),
        ops(static_cast<std::size_t>(n) * (n + 1), 0) {
    if (n < 1 || k < 2)
      throw std::invalid_argument("DartsCell: need nodes >= 1, num_ops >= 2");
  }

  int cols() const { return nodes + 1; }
  int at(int row, int col) const {
    return ops.at(static_cast<std::size_t>(row) * cols() + col);
  }
  int& at(int row, int col) {
    return ops.at(static_cast<std::size_t>(row) * cols() + col);
  }
  static bool col_legal(int row, int col) { return col <= row + 1; }

  /// Columns of the non-zero entries of one row, ascending.
  std::vector<int> predecessors(int row) const {
    std::vector<int> out;
    for (int c = 0; c < cols(); ++c)
      if (at(row, c) != 0) out.push_back(c);
    return out;
  }

  friend bool operator==(const DartsCell&, const DartsCell&) = default;
  friend auto operator<=>(const DartsCell&, const DartsCell&) = default;
};

struct CellViolation {
  int row;
  std::string message;
  friend bool operator==(const CellViolation&, const CellViolation&) = default;
};

/// Reports every violated row constraint; an empty report means valid.
inline std::vector<CellViolation> validate_darts_cell(const DartsCell& cell) {
  std::vector<CellViolation> report;
  for (int r = 0; r < cell.nodes; ++r) {
    int count = 0;
    for (int c = 0; c < cell.cols(); ++c) {
      const int op = cell.at(r, c);
      if (op < 0 || op >= cell.num_ops)
        report.push_back({r, "op " + std::to_string(op) + " out of range"});
      if (op != 0) {
        ++count;
        if (!DartsCell::col_legal(r, c))
          report.push_back({r, "predecessor after node"});
      }
    }
    if (count != 2)
      report.push_back({r, "predecessor count " + std::to_string(count)});
  }
  return report;
}

inline bool is_valid(const DartsCell& cell) {
  return validate_darts_cell(cell).empty();
}

/// DARTS architecture: a normal and a reduction cell over the same op set.
struct DartsArch {
  DartsCell normal;
  DartsCell reduction;

  DartsArch() = default;
  DartsArch(DartsCell n, DartsCell r)
      : normal(std::move(n)), reduction(std::move(r)) {
    if (normal.nodes != reduction.nodes || normal.num_ops != reduction.num_ops)
      throw std::invalid_argument("DartsArch: cells disagree on space");
    auto check = [](const DartsCell& c, const char* which) {
      auto rep = validate_darts_cell(c);
      if (!rep.empty())
        throw std::invalid_argument(std::string("DartsArch: invalid ") +
                                    which + " cell (row " +
                                    std::to_string(rep.front().row) + ": " +
                                    rep.front().message + ")");
    };
    check(normal, "normal");
    check(reduction, "reduction");
  }

  DartsSpace space() const { return DartsSpace{normal.nodes, normal.num_ops}; }

  friend bool operator==(const DartsArch&, const DartsArch&) = default;
  friend auto operator<=>(const DartsArch&, const DartsArch&) = default;
};

using Architecture = std::variant<Nb201Arch, DartsArch>;

inline SpaceDesc space_of(const Architecture& a) {
  return std::visit([](const auto& x) -> SpaceDesc { return x.space(); }, a);
}

inline bool operator==(const Architecture& a, const Architecture& b) {
  if (a.index() != b.index()) return false;
  if (std::holds_alternative<Nb201Arch>(a))
    return std::get<Nb201Arch>(a) == std::get<Nb201Arch>(b);
  return std::get<DartsArch>(a) == std::get<DartsArch>(b);
}

/// Deterministic total order (NB201 before DARTS, then lexicographic).
inline bool arch_less(const Architecture& a, const Architecture& b) {
  if (a.index() != b.index()) return a.index() < b.index();
  if (std::holds_alternative<Nb201Arch>(a))
    return std::get<Nb201Arch>(a) < std::get<Nb201Arch>(b);
  return std::get<DartsArch>(a) < std::get<DartsArch>(b);
}

// ---------------------------------------------------------------------------
// Canonical text formats
// ---------------------------------------------------------------------------

namespace detail {
inline int parse_int(std::string_view tok, const char* what) {
  int value = 0;
  const auto* first = tok.data();
  const auto* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw std::invalid_argument(std::string(what) + ": non-integer token '" +
                                std::string(tok) + "'");
  return value;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}
}  // namespace detail

/// Canonical NB201 text: codes joined by '|', e.g. "0|1|3|2|4|0".
inline std::string format_nb201(const Nb201Arch& a) {
  std::string out;
  for (std::size_t i = 0; i < a.codes.size(); ++i) {
    if (i) out += '|';
    out += std::to_string(a.codes[i]);
  }
  return out;
}

inline Nb201Arch parse_nb201(std::string_view s,
                             const Nb201Space& space = Nb201Space{}) {
  const auto toks = detail::split(s, '|');
  if (static_cast<int>(toks.size()) != space.length)
    throw std::invalid_argument(
        "parse_nb201: expected " + std::to_string(space.length) +
        " codes, got " + std::to_string(toks.size()));
  std::vector<int> codes;
  codes.reserve(toks.size());
  for (auto tok : toks) {
    const int v = detail::parse_int(tok, "parse_nb201");
    if (v < 0 || v >= space.num_ops)
      throw std::invalid_argument("parse_nb201: code " + std::to_string(v) +
                                  " out of range [0," +
                                  std::to_string(space.num_ops) + ")");
    codes.push_back(v);
  }
  return Nb201Arch(std::move(codes), space.num_ops);
}

/// Canonical DARTS text: the two cells' row-major digit strings joined by
/// ';', e.g. "4300000403...;...". Requires num_ops <= 10.
inline std::string format_darts(const DartsArch& a) {
  auto cell_str = [](const DartsCell& c) {
    std::string s;
    s.reserve(c.ops.size());
    for (int v : c.ops) {
      if (v > 9) throw std::invalid_argument("format_darts: op index > 9");
      s += static_cast<char>('0' + v);
    }
    return s;
  };
  return cell_str(a.normal) + ";" + cell_str(a.reduction);
}

inline DartsArch parse_darts(std::string_view s,
                             const DartsSpace& space = DartsSpace{}) {
  const auto parts = detail::split(s, ';');
  if (parts.size() != 2)
    throw std::invalid_argument("parse_darts: expected 'normal;reduction'");
  auto parse_cell = [&](std::string_view body) {
    DartsCell cell(space.nodes, space.num_ops);
    if (body.size() != cell.ops.size())
      throw std::invalid_argument(
          "parse_darts: cell needs " + std::to_string(cell.ops.size()) +
          " digits, got " + std::to_string(body.size()));
    for (std::size_t i = 0; i < body.size(); ++i) {
      const char ch = body[i];
      if (ch < '0' || ch > '9')
        throw std::invalid_argument("parse_darts: non-digit in cell");
      const int v = ch - '0';
      if (v >= space.num_ops)
        throw std::invalid_argument("parse_darts: op " + std::to_string(v) +
                                    " out of range");
      cell.ops[i] = v;
    }
    return cell;
  };
  return DartsArch(parse_cell(parts[0]), parse_cell(parts[1]));
}

inline std::string canonical_string(const Architecture& a) {
  if (const auto* n = std::get_if<Nb201Arch>(&a)) return format_nb201(*n);
  return format_darts(std::get<DartsArch>(a));
}

inline Architecture parse_architecture(std::string_view s,
                                       const SpaceDesc& space) {
  if (const auto* n = std::get_if<Nb201Space>(&space))
    return parse_nb201(s, *n);
  return parse_darts(s, std::get<DartsSpace>(space));
}

// ---------------------------------------------------------------------------
// DAG encoding (NB201)
// ---------------------------------------------------------------------------

/// Edge map of a cell DAG: (src,dst) -> operation label.
using EdgeMap = std::map<std::pair<int, int>, std::string>;

/// Flattens a DAG into the NB201 code vector. Edges are visited with the
/// destination node ascending and the source node ascending within it, so
/// for 4 nodes the order is (0,1),(0,2),(1,2),(0,3),(1,3),(2,3). An absent
/// edge encodes as the op set's zero index.
inline Nb201Arch encode_dag_nb201(const EdgeMap& edges,
                                  const OperationSet& op_set, int n_nodes) {
  if (n_nodes < 2)
    throw std::invalid_argument("encode_dag_nb201: need at least 2 nodes");
  for (const auto& [edge, label] : edges) {
    const auto [src, dst] = edge;
    if (src < 0 || dst <= src || dst >= n_nodes)
      throw std::invalid_argument("encode_dag_nb201: invalid edge (" +
                                  std::to_string(src) + "," +
                                  std::to_string(dst) + ")");
    op_set.index_of(label);  // throws on unknown label
  }
  std::vector<int> codes;
  for (int dst = 1; dst < n_nodes; ++dst) {
    for (int src = 0; src < dst; ++src) {
      auto it = edges.find({src, dst});
      if (it == edges.end()) {
        if (!op_set.zero_index())
          throw std::invalid_argument(
              "encode_dag_nb201: missing edge but op set has no zero op");
        codes.push_back(*op_set.zero_index());
      } else {
        codes.push_back(op_set.index_of(it->second));
      }
    }
  }
  return Nb201Arch(std::move(codes), op_set.size());
}

/// Inverse of encode_dag_nb201: emits every edge with its op label
/// (including the zero op) for a complete DAG representation.
inline EdgeMap decode_nb201_dag(const Nb201Arch& a, const OperationSet& op_set,
                                int n_nodes) {
  const int expected = n_nodes * (n_nodes - 1) / 2;
  if (static_cast<int>(a.codes.size()) != expected)
    throw std::invalid_argument("decode_nb201_dag: code count mismatch");
  if (op_set.size() != a.num_ops)
    throw std::invalid_argument("decode_nb201_dag: op set size mismatch");
  EdgeMap edges;
  std::size_t i = 0;
  for (int dst = 1; dst < n_nodes; ++dst)
    for (int src = 0; src < dst; ++src)
      edges[{src, dst}] = op_set.name(a.codes[i++]);
  return edges;
}

// ---------------------------------------------------------------------------
// Native benchmark genotype strings
// ---------------------------------------------------------------------------

/// Parses the benchmark's "|op~0|+|op~0|op~1|+|op~0|op~1|op~2|" form.
/// Token order matches the canonical edge order exactly.
inline Nb201Arch parse_nb201_genotype(std::string_view s,
                                      const OperationSet& op_set = nb201_ops()) {
  std::vector<int> codes;
  int dst = 1;
  for (auto group : detail::split(s, '+')) {
    int src = 0;
    for (auto tok : detail::split(group, '|')) {
      if (tok.empty()) continue;
      const auto tilde = tok.find('~');
      if (tilde == std::string_view::npos)
        throw std::invalid_argument("parse_nb201_genotype: token '" +
                                    std::string(tok) + "' lacks '~'");
      const int idx = op_set.index_of(tok.substr(0, tilde));
      const int from = detail::parse_int(tok.substr(tilde + 1),
                                         "parse_nb201_genotype");
      if (from != src)
        throw std::invalid_argument(
            "parse_nb201_genotype: expected source " + std::to_string(src) +
            ", got " + std::to_string(from));
      codes.push_back(idx);
      ++src;
    }
    if (src != dst)
      throw std::invalid_argument("parse_nb201_genotype: node " +
                                  std::to_string(dst) + " lists " +
                                  std::to_string(src) + " inputs");
    ++dst;
  }
  if (codes.empty())
    throw std::invalid_argument("parse_nb201_genotype: empty string");
  return Nb201Arch(std::move(codes), op_set.size());
}

inline std::string format_nb201_genotype(const Nb201Arch& a,
                                         const OperationSet& op_set = nb201_ops()) {
  if (op_set.size() != a.num_ops)
    throw std::invalid_argument("format_nb201_genotype: op set size mismatch");
  std::string out;
  std::size_t i = 0;
  int dst = 1;
  while (i < a.codes.size()) {
    if (dst > 1) out += '+';
    out += '|';
    for (int src = 0; src < dst && i < a.codes.size(); ++src, ++i)
      out += op_set.name(a.codes[i]) + "~" + std::to_string(src) + "|";
    ++dst;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Space counting and enumeration
// ---------------------------------------------------------------------------

namespace detail {
inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b)
    throw std::overflow_error("count_space: overflow");
  return a * b;
}
}  // namespace detail

/// Number of discretized cells: product over intermediate nodes q = 1..M of
/// C(q+1, 2) column pairs times nonzero_ops^2 op choices.
inline std::uint64_t count_darts_cell(const DartsSpace& space) {
  const std::uint64_t nonzero = static_cast<std::uint64_t>(space.num_ops - 1);
  std::uint64_t total = 1;
  for (int q = 1; q <= space.nodes; ++q) {
    const std::uint64_t pairs =
        static_cast<std::uint64_t>(q + 1) * q / 2;  // C(q+1, 2)
    total = detail::checked_mul(total, pairs);
    total = detail::checked_mul(total, nonzero * nonzero);
  }
  return total;
}

/// Exact architecture count: k^L for sequence spaces, the per-cell product
/// squared for cell-pair spaces.
inline std::uint64_t count_space(const SpaceDesc& space) {
  if (const auto* n = std::get_if<Nb201Space>(&space)) {
    std::uint64_t total = 1;
    for (int i = 0; i < n->length; ++i)
      total = detail::checked_mul(total, static_cast<std::uint64_t>(n->num_ops));
    return total;
  }
  const std::uint64_t cell = count_darts_cell(std::get<DartsSpace>(space));
  return detail::checked_mul(cell, cell);
}

/// Materializes every architecture of a sequence space in lexicographic
/// order. Guarded by a cap; cell-pair spaces are far beyond enumeration.
inline std::vector<Nb201Arch> enumerate_nb201(const Nb201Space& space,
                                              std::uint64_t cap = 1000000) {
  const std::uint64_t total = count_space(space);
  if (total > cap)
    throw std::invalid_argument("enumerate_nb201: space size " +
                                std::to_string(total) + " exceeds cap " +
                                std::to_string(cap));
  std::vector<Nb201Arch> out;
  out.reserve(total);
  std::vector<int> codes(space.length, 0);
  while (true) {
    out.emplace_back(codes, space.num_ops);
    int i = space.length - 1;
    while (i >= 0 && codes[i] == space.num_ops - 1) codes[i--] = 0;
    if (i < 0) break;
    ++codes[i];
  }
  return out;
}

}  // namespace archgeo
