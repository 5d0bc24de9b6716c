#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "archgeo/arch_space.hpp"
#include "archgeo/geometry.hpp"
#include "archgeo/rng.hpp"

namespace archgeo {

struct AccEntry {
  double test_acc = 0.0;
  double valid_acc = 0.0;
};

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Read-only accuracy source over one architecture space. Queries return
/// test accuracy in percent. Implementations are immutable after
/// construction and safe to share between threads.
class AccuracyOracle {
 public:
  virtual ~AccuracyOracle() = default;

  virtual double query(const Architecture& a,
                       std::string_view dataset) const = 0;
  virtual SpaceDesc space() const = 0;

  /// All architectures the oracle can score, in a deterministic order.
  /// The default enumerates the whole space (sequence spaces only).
  virtual std::vector<Architecture> architectures(
      std::string_view dataset) const {
    (void)dataset;
    const SpaceDesc desc = space();
    const auto* seq = std::get_if<Nb201Space>(&desc);
    if (!seq)
      throw std::invalid_argument(
          "AccuracyOracle::architectures: cell-pair space is not enumerable");
    std::vector<Architecture> out;
    for (auto& a : enumerate_nb201(*seq)) out.emplace_back(std::move(a));
    return out;
  }
};

enum class TableFormat { csv, genotype };

/// Tabulated accuracies keyed by (canonical arch string, dataset tag).
class AccuracyTable final : public AccuracyOracle {
 public:
  explicit AccuracyTable(SpaceDesc space) : space_(space) {}

  /// Loads `arch,dataset,test_acc,valid_acc` rows. The header line is
  /// required verbatim; '#' lines are skipped. With TableFormat::genotype
  /// the arch column carries the benchmark's op~src token string.
  static AccuracyTable load(const std::string& path, TableFormat format,
                            SpaceDesc space = Nb201Space{}) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("table not found: " + path);
    return from_stream(in, format, space, path);
  }

  static AccuracyTable from_stream(std::istream& in, TableFormat format,
                                   SpaceDesc space = Nb201Space{},
                                   std::string_view name = "<stream>") {
    AccuracyTable table(space);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    auto fail = [&](const std::string& what) {
      throw std::runtime_error(std::string(name) + ":" +
                               std::to_string(line_no) + ": " + what);
    };
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen) {
        if (line != "arch,dataset,test_acc,valid_acc")
          fail("expected header 'arch,dataset,test_acc,valid_acc'");
        header_seen = true;
        continue;
      }
      const auto fields = detail::split(line, ',');
      if (fields.size() != 4) fail("expected 4 fields, got " +
                                   std::to_string(fields.size()));
      std::string arch_str;
      try {
        if (format == TableFormat::genotype) {
          const auto* seq = std::get_if<Nb201Space>(&space);
          if (!seq) fail("genotype format requires a sequence space");
          const Nb201Arch arch = parse_nb201_genotype(fields[0]);
          if (!(arch.space() == *seq)) fail("genotype space mismatch");
          arch_str = format_nb201(arch);
        } else {
          arch_str = canonical_string(parse_architecture(fields[0], space));
        }
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
      AccEntry entry;
      auto parse_acc = [&](std::string_view tok) {
        double value = 0.0;
        const auto* last = tok.data() + tok.size();
        const auto [ptr, ec] = std::from_chars(tok.data(), last, value);
        if (ec != std::errc() || ptr != last) fail("non-numeric accuracy");
        return value;
      };
      entry.test_acc = parse_acc(fields[2]);
      entry.valid_acc = parse_acc(fields[3]);
      try {
        table.insert(arch_str, std::string(fields[1]), entry);
      } catch (const std::invalid_argument& e) {
        fail(e.what());
      }
    }
    if (!header_seen)
      throw std::runtime_error(std::string(name) + ": empty table");
    return table;
  }

  void insert(const std::string& arch_str, const std::string& dataset,
              AccEntry entry) {
    if (entry.test_acc < 0 || entry.test_acc > 100 || entry.valid_acc < 0 ||
        entry.valid_acc > 100)
      throw std::invalid_argument("accuracy out of [0,100]");
    auto& per_arch = entries_[dataset];
    if (!per_arch.emplace(arch_str, entry).second)
      throw std::invalid_argument("duplicate key (" + arch_str + "," +
                                  dataset + ")");
  }

  const AccEntry& lookup(const Architecture& a,
                         std::string_view dataset) const {
    if (!(space_of(a) == space_))
      throw std::invalid_argument("lookup: architecture from another space");
    const auto ds = entries_.find(std::string(dataset));
    if (ds == entries_.end())
      throw std::out_of_range("unknown dataset '" + std::string(dataset) +
                              "'");
    const auto it = ds->second.find(canonical_string(a));
    if (it == ds->second.end())
      throw std::out_of_range("no entry for " + canonical_string(a) + " on " +
                              std::string(dataset));
    return it->second;
  }

  double query(const Architecture& a,
               std::string_view dataset) const override {
    return lookup(a, dataset).test_acc;
  }

  SpaceDesc space() const override { return space_; }

  std::vector<std::string> datasets() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : entries_) out.push_back(name);
    return out;
  }

  std::size_t size(std::string_view dataset) const {
    const auto it = entries_.find(std::string(dataset));
    return it == entries_.end() ? 0 : it->second.size();
  }

  bool complete(std::string_view dataset) const {
    return size(dataset) == count_space(space_);
  }

  std::vector<Architecture> architectures(
      std::string_view dataset) const override {
    std::vector<Architecture> out;
    for (const auto& [arch_str, _] : per_dataset(dataset))
      out.push_back(parse_architecture(arch_str, space_));
    return out;
  }

  /// Test accuracies of every tabulated architecture, in key order.
  std::vector<double> accuracies(std::string_view dataset) const {
    std::vector<double> out;
    for (const auto& [_, entry] : per_dataset(dataset))
      out.push_back(entry.test_acc);
    return out;
  }

  /// Architectures whose test accuracy falls in [lo, hi].
  std::vector<Architecture> archs_in_band(std::string_view dataset, double lo,
                                          double hi) const {
    std::vector<Architecture> out;
    for (const auto& [arch_str, entry] : per_dataset(dataset))
      if (entry.test_acc >= lo && entry.test_acc <= hi)
        out.push_back(parse_architecture(arch_str, space_));
    return out;
  }

 private:
  const std::map<std::string, AccEntry>& per_dataset(
      std::string_view dataset) const {
    const auto it = entries_.find(std::string(dataset));
    if (it == entries_.end())
      throw std::out_of_range("unknown dataset '" + std::string(dataset) +
                              "'");
    return it->second;
  }

  SpaceDesc space_;
  std::map<std::string, std::map<std::string, AccEntry>> entries_;
};

/// Synthetic landscape with one planted optimum: accuracy decays linearly
/// with distance from the center, plus seeded per-architecture noise, and is
/// clamped to [0,100]. Deterministic given (seed, architecture).
class PlantedLandscape final : public AccuracyOracle {
 public:
  PlantedLandscape(Architecture center, double peak_acc, double decay,
                   double noise_amplitude, std::uint64_t seed)
      : center_(std::move(center)), peak_(peak_acc), decay_(decay),
        noise_(noise_amplitude), seed_(seed) {
    if (peak_ < 0 || peak_ > 100)
      throw std::invalid_argument("PlantedLandscape: peak outside [0,100]");
    if (decay_ < 0 || noise_ < 0)
      throw std::invalid_argument(
          "PlantedLandscape: decay and noise must be >= 0");
  }

  double query(const Architecture& a, std::string_view) const override {
    if (!(space_of(a) == space_of(center_)))
      throw std::invalid_argument("query: architecture from another space");
    double acc = peak_ - decay_ * distance(a, center_);
    if (noise_ > 0) {
      const double u =
          static_cast<double>(fnv1a64(canonical_string(a), seed_) >> 11) *
          0x1.0p-53;
      acc += noise_ * (2.0 * u - 1.0);
    }
    return std::clamp(acc, 0.0, 100.0);
  }

  SpaceDesc space() const override { return space_of(center_); }
  const Architecture& center() const { return center_; }

 private:
  Architecture center_;
  double peak_, decay_, noise_;
  std::uint64_t seed_;
};

/// Synthetic landscape opposing a flat basin to a sharp spike: every
/// architecture within plateau_radius of the plateau center scores the
/// plateau accuracy; the sharp center scores highest of all but its radius-1
/// shell scores below the background. Plateau membership takes precedence,
/// and the two regions must not overlap.
class PlateauVsPeakLandscape final : public AccuracyOracle {
 public:
  PlateauVsPeakLandscape(Architecture plateau_center, double plateau_acc,
                         int plateau_radius, Architecture sharp_center,
                         double sharp_acc, double sharp_neighbor_acc,
                         double background_acc, std::uint64_t seed)
      : plateau_center_(std::move(plateau_center)), plateau_acc_(plateau_acc),
        plateau_radius_(plateau_radius), sharp_center_(std::move(sharp_center)),
        sharp_acc_(sharp_acc), sharp_neighbor_acc_(sharp_neighbor_acc),
        background_acc_(background_acc), seed_(seed) {
    if (!(space_of(plateau_center_) == space_of(sharp_center_)))
      throw std::invalid_argument("PlateauVsPeak: centers in different spaces");
    for (double v : {plateau_acc_, sharp_acc_, sharp_neighbor_acc_,
                     background_acc_})
      if (v < 0 || v > 100)
        throw std::invalid_argument("PlateauVsPeak: accuracy outside [0,100]");
    if (plateau_radius_ < 0)
      throw std::invalid_argument("PlateauVsPeak: negative radius");
    if (!(sharp_acc_ > plateau_acc_))
      throw std::invalid_argument(
          "PlateauVsPeak: sharp peak must beat the plateau");
    if (!(sharp_neighbor_acc_ < background_acc_))
      throw std::invalid_argument(
          "PlateauVsPeak: sharp neighbors must fall below background");
    if (distance(plateau_center_, sharp_center_) <= plateau_radius_ + 1)
      throw std::invalid_argument(
          "PlateauVsPeak: plateau and sharp peak overlap");
  }

  double query(const Architecture& a, std::string_view) const override {
    if (distance(a, plateau_center_) <= plateau_radius_) return plateau_acc_;
    const int ds = distance(a, sharp_center_);
    if (ds == 0) return sharp_acc_;
    if (ds == 1) return sharp_neighbor_acc_;
    return background_acc_;
  }

  SpaceDesc space() const override { return space_of(plateau_center_); }
  const Architecture& plateau_center() const { return plateau_center_; }
  const Architecture& sharp_center() const { return sharp_center_; }
  std::uint64_t seed() const { return seed_; }

 private:
  Architecture plateau_center_;
  double plateau_acc_;
  int plateau_radius_;
  Architecture sharp_center_;
  double sharp_acc_, sharp_neighbor_acc_, background_acc_;
  std::uint64_t seed_;
};

/// Fixed synthetic stand-in used by the CLI when no table is supplied.
inline PlantedLandscape default_planted_landscape() {
  return PlantedLandscape(Architecture{parse_nb201("3|1|2|4|0|3")}, 95.0, 8.0,
                          2.0, 1234);
}

// ---------------------------------------------------------------------------
// Accuracy paths and barriers
// ---------------------------------------------------------------------------

/// Accuracy profile along the path tree between two architectures. The
/// barrier is the endpoint-mean accuracy minus the lowest accuracy over the
/// unique intermediate architectures; distance-1 pairs have no intermediates
/// and a barrier of zero by convention.
struct BarrierReport {
  Architecture source;
  Architecture target;
  std::vector<double> level_mean_acc;  // one entry per radius level
  std::optional<double> path_min_acc;  // min over intermediate levels
  double barrier = 0.0;
};

inline BarrierReport accuracy_path(const AccuracyOracle& oracle,
                                   const Architecture& a,
                                   const Architecture& b,
                                   std::string_view dataset,
                                   std::uint64_t node_cap = 1000000) {
  const PathTree tree = build_path_tree(a, b, node_cap);
  BarrierReport report{a, b, {}, std::nullopt, 0.0};
  const int d = tree.total_distance();
  report.level_mean_acc.reserve(d + 1);
  for (int r = 0; r <= d; ++r) {
    double sum = 0.0;
    for (const auto& arch : tree.levels[r]) {
      const double acc = oracle.query(arch, dataset);
      sum += acc;
      if (r > 0 && r < d)
        report.path_min_acc = report.path_min_acc
                                  ? std::min(*report.path_min_acc, acc)
                                  : acc;
    }
    report.level_mean_acc.push_back(sum /
                                    static_cast<double>(tree.levels[r].size()));
  }
  if (report.path_min_acc) {
    const double endpoint_mean =
        0.5 * (report.level_mean_acc.front() + report.level_mean_acc.back());
    report.barrier = endpoint_mean - *report.path_min_acc;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Histograms and difference distributions
// ---------------------------------------------------------------------------

struct BinSpec {
  int bins = 50;
  std::optional<std::pair<double, double>> range;  // default: union [min,max]
};

struct Histogram {
  std::vector<double> edges;          // bins + 1 monotone edges
  std::vector<std::uint64_t> counts;  // per bin
  std::vector<double> density;        // counts / (sample_size * width)
  std::size_t sample_size = 0;
};

inline Histogram make_histogram(std::span<const double> sample, int bins,
                                double lo, double hi) {
  if (bins < 1) throw std::invalid_argument("make_histogram: bins < 1");
  if (!(lo < hi)) throw std::invalid_argument("make_histogram: empty range");
  Histogram h;
  h.sample_size = sample.size();
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int i = 0; i <= bins; ++i) h.edges[i] = lo + width * i;
  h.edges.back() = hi;
  h.counts.assign(bins, 0);
  for (double v : sample) {
    if (v < lo || v > hi) continue;
    int bin = static_cast<int>((v - lo) / width);
    if (bin >= bins) bin = bins - 1;  // right edge closes the last bin
    ++h.counts[bin];
  }
  h.density.resize(bins);
  for (int i = 0; i < bins; ++i)
    h.density[i] = sample.empty()
                       ? 0.0
                       : static_cast<double>(h.counts[i]) /
                             (static_cast<double>(h.sample_size) * width);
  return h;
}

struct NeighborhoodHistogram {
  Histogram neighbors;  // radius-r neighbor accuracies, ref multiplicity kept
  Histogram space;      // accuracies over every scored architecture
};

/// Density histogram pair contrasting the radius-r neighborhoods of the
/// reference architectures against the whole space. Neighbor accuracies are
/// pooled with multiplicity: one contribution per (reference, neighbor).
inline NeighborhoodHistogram neighborhood_histogram(
    const AccuracyOracle& oracle, const std::vector<Architecture>& refs,
    int radius, std::string_view dataset, const BinSpec& spec = {}) {
  if (refs.empty())
    throw std::invalid_argument("neighborhood_histogram: no references");
  std::vector<double> neighbor_sample;
  for (const auto& ref : refs)
    for (const auto& n : neighbors_at_radius(ref, radius))
      neighbor_sample.push_back(oracle.query(n, dataset));

  std::vector<double> space_sample;
  for (const auto& a : oracle.architectures(dataset))
    space_sample.push_back(oracle.query(a, dataset));

  double lo, hi;
  if (spec.range) {
    lo = spec.range->first;
    hi = spec.range->second;
  } else {
    lo = space_sample.front();
    hi = space_sample.front();
    for (const auto* sample : {&neighbor_sample, &space_sample})
      for (double v : *sample) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (lo == hi) {  // degenerate constant sample
      lo -= 0.5;
      hi += 0.5;
    }
  }
  return NeighborhoodHistogram{
      make_histogram(neighbor_sample, spec.bins, lo, hi),
      make_histogram(space_sample, spec.bins, lo, hi)};
}

/// Per-tier |accuracy difference| samples between each reference and its
/// radius-r neighbors, plus a "random" tier of seeded architecture pairs
/// drawn uniformly without repeating a pair.
inline std::map<std::string, std::vector<double>> diff_distributions(
    const AccuracyOracle& oracle,
    const std::map<std::string, std::vector<Architecture>>& refs_per_tier,
    int radius, int n_random_pairs, std::uint64_t seed,
    std::string_view dataset) {
  if (n_random_pairs < 1)
    throw std::invalid_argument("diff_distributions: need n_random_pairs >= 1");
  if (refs_per_tier.count("random"))
    throw std::invalid_argument(
        "diff_distributions: tier name 'random' is reserved");

  std::map<std::string, std::vector<double>> out;
  for (const auto& [tier, refs] : refs_per_tier) {
    auto& sample = out[tier];
    for (const auto& ref : refs) {
      const double ref_acc = oracle.query(ref, dataset);
      for (const auto& n : neighbors_at_radius(ref, radius))
        sample.push_back(std::abs(ref_acc - oracle.query(n, dataset)));
    }
  }

  const auto archs = oracle.architectures(dataset);
  const std::uint64_t n = archs.size();
  if (n < 2)
    throw std::invalid_argument("diff_distributions: fewer than 2 architectures");
  const std::uint64_t total_pairs = n * (n - 1) / 2;
  if (static_cast<std::uint64_t>(n_random_pairs) > total_pairs)
    throw std::invalid_argument("diff_distributions: more pairs than exist");

  SplitMix64 rng(seed);
  std::set<std::pair<std::uint64_t, std::uint64_t>> drawn;
  auto& random_sample = out["random"];
  while (random_sample.size() < static_cast<std::size_t>(n_random_pairs)) {
    std::uint64_t i = rng.below(n);
    std::uint64_t j = rng.below(n - 1);
    if (j >= i) ++j;
    if (i > j) std::swap(i, j);
    if (!drawn.emplace(i, j).second) continue;
    random_sample.push_back(std::abs(oracle.query(archs[i], dataset) -
                                     oracle.query(archs[j], dataset)));
  }
  return out;
}

}  // namespace archgeo
