#include "psgeval/mask.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <utility>

#include "psgeval/errors.hpp"

namespace psgeval {
namespace {

// Half-open [begin, end) spans of set pixels in linear scan order.
using Interval = std::pair<std::uint64_t, std::uint64_t>;

std::uint64_t pixel_count(const RleMask& m) {
  return static_cast<std::uint64_t>(m.width) * static_cast<std::uint64_t>(m.height);
}

std::vector<Interval> to_intervals(const RleMask& m) {
  std::uint64_t pos = 0;
  std::vector<Interval> out;
  for (std::size_t i = 0; i < m.runs.size(); ++i) {
    std::uint64_t len = m.runs[i];
    if (i % 2 == 1 && len > 0) out.emplace_back(pos, pos + len);
    pos += len;
  }
  if (pos != pixel_count(m)) {
    throw ValidationError("RLE run sum " + std::to_string(pos) + " does not match " +
                          std::to_string(m.width) + "x" + std::to_string(m.height) + " grid");
  }
  return out;
}

RleMask from_intervals(const std::vector<Interval>& intervals, int width, int height) {
  RleMask m;
  m.width = width;
  m.height = height;
  const std::uint64_t total = static_cast<std::uint64_t>(width) * height;
  std::uint64_t pos = 0;
  for (const auto& [b, e] : intervals) {
    if (b == pos && !m.runs.empty()) {
      // adjacent to the previous 1-run: extend it
      m.runs.back() += static_cast<std::uint32_t>(e - b);
    } else {
      m.runs.push_back(static_cast<std::uint32_t>(b - pos));
      m.runs.push_back(static_cast<std::uint32_t>(e - b));
    }
    pos = e;
  }
  if (m.runs.empty() || pos < total) m.runs.push_back(static_cast<std::uint32_t>(total - pos));
  return m;
}

void check_same_dims(const RleMask& a, const RleMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ValidationError("mask dimension mismatch: " + std::to_string(a.width) + "x" +
                          std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                          std::to_string(b.height));
  }
}

std::uint64_t interval_area(const std::vector<Interval>& v) {
  std::uint64_t a = 0;
  for (const auto& [b, e] : v) a += e - b;
  return a;
}

std::uint64_t interval_intersection_area(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::uint64_t area = 0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    std::uint64_t lo = std::max(a[i].first, b[j].first);
    std::uint64_t hi = std::min(a[i].second, b[j].second);
    if (lo < hi) area += hi - lo;
    if (a[i].second < b[j].second) ++i; else ++j;
  }
  return area;
}

std::vector<Interval> interval_union(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<Interval> merged;
  merged.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
  std::vector<Interval> out;
  for (const auto& iv : merged) {
    if (!out.empty() && iv.first <= out.back().second) {
      out.back().second = std::max(out.back().second, iv.second);
    } else {
      out.push_back(iv);
    }
  }
  return out;
}

std::vector<Interval> interval_subtract(const std::vector<Interval>& a, const std::vector<Interval>& b) {
  std::vector<Interval> out;
  std::size_t j = 0;
  for (auto [begin, end] : a) {
    std::uint64_t cur = begin;
    while (j < b.size() && b[j].second <= cur) ++j;
    std::size_t k = j;
    while (k < b.size() && b[k].first < end) {
      if (b[k].first > cur) out.emplace_back(cur, b[k].first);
      cur = std::max(cur, b[k].second);
      if (cur >= end) break;
      ++k;
    }
    if (cur < end) out.emplace_back(cur, end);
  }
  return out;
}

// Union-find over mask indices.
struct Dsu {
  std::vector<int> parent;
  explicit Dsu(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void unite(int a, int b) {
    a = find(a); b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

PatchGrid covering_grid(int width, int height, int patch_size) {
  if (patch_size <= 0) throw ValidationError("patch size must be positive");
  PatchGrid g;
  g.patch_size = patch_size;
  g.grid_w = (width + patch_size - 1) / patch_size;
  g.grid_h = (height + patch_size - 1) / patch_size;
  return g;
}

std::vector<std::uint8_t> rle_decode(const RleMask& mask) {
  if (mask.width <= 0 || mask.height <= 0) throw ValidationError("mask dimensions must be positive");
  std::vector<std::uint8_t> grid(pixel_count(mask), 0);
  for (const auto& [b, e] : to_intervals(mask)) {
    std::fill(grid.begin() + static_cast<std::ptrdiff_t>(b), grid.begin() + static_cast<std::ptrdiff_t>(e), 1);
  }
  return grid;
}

RleMask rle_encode(const std::vector<std::uint8_t>& grid, int width, int height) {
  if (width <= 0 || height <= 0) throw ValidationError("mask dimensions must be positive");
  if (grid.size() != static_cast<std::size_t>(width) * height) {
    throw ValidationError("dense grid size does not match dimensions");
  }
  std::vector<Interval> intervals;
  std::size_t i = 0;
  while (i < grid.size()) {
    if (!grid[i]) { ++i; continue; }
    std::size_t b = i;
    while (i < grid.size() && grid[i]) ++i;
    intervals.emplace_back(b, i);
  }
  return from_intervals(intervals, width, height);
}

std::uint64_t mask_area(const RleMask& mask) { return interval_area(to_intervals(mask)); }

std::uint64_t intersection_area(const RleMask& a, const RleMask& b) {
  check_same_dims(a, b);
  return interval_intersection_area(to_intervals(a), to_intervals(b));
}

double iou(const RleMask& a, const RleMask& b) {
  check_same_dims(a, b);
  const auto ia = to_intervals(a);
  const auto ib = to_intervals(b);
  const std::uint64_t inter = interval_intersection_area(ia, ib);
  const std::uint64_t uni = interval_area(ia) + interval_area(ib) - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

RleMask mask_union(const RleMask& a, const RleMask& b) {
  check_same_dims(a, b);
  return from_intervals(interval_union(to_intervals(a), to_intervals(b)), a.width, a.height);
}

RleMask mask_subtract(const RleMask& a, const RleMask& b) {
  check_same_dims(a, b);
  return from_intervals(interval_subtract(to_intervals(a), to_intervals(b)), a.width, a.height);
}

std::vector<double> patch_coverage(const RleMask& mask, const PatchGrid& grid) {
  const int ps = grid.patch_size;
  if (ps <= 0 || grid.grid_w <= 0 || grid.grid_h <= 0) throw ValidationError("invalid patch grid");
  if (ps * grid.grid_w < mask.width || ps * grid.grid_h < mask.height) {
    throw ValidationError("patch grid does not cover the mask extent");
  }
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(grid.grid_w) * grid.grid_h, 0);
  const std::uint64_t w = static_cast<std::uint64_t>(mask.width);
  for (const auto& [b, e] : to_intervals(mask)) {
    // split the interval into row segments, then distribute over patch columns
    for (std::uint64_t p = b; p < e;) {
      const std::uint64_t row = p / w;
      const std::uint64_t row_end = std::min(e, (row + 1) * w);
      const int pr = static_cast<int>(row) / ps;
      std::uint64_t c1 = p - row * w;
      const std::uint64_t c2 = row_end - row * w;
      while (c1 < c2) {
        const int pc = static_cast<int>(c1) / ps;
        const std::uint64_t col_end = std::min<std::uint64_t>(c2, static_cast<std::uint64_t>(pc + 1) * ps);
        counts[static_cast<std::size_t>(pr) * grid.grid_w + pc] += col_end - c1;
        c1 = col_end;
      }
      p = row_end;
    }
  }
  std::vector<double> ratios(counts.size());
  const double denom = static_cast<double>(ps) * ps;
  for (std::size_t i = 0; i < counts.size(); ++i) ratios[i] = static_cast<double>(counts[i]) / denom;
  return ratios;
}

MergeResult merge_masks(const std::vector<ScoredMask>& masks, double merge_threshold) {
  const std::size_t n = masks.size();
  MergeResult result;
  result.remap.assign(n, -1);
  if (n == 0) return result;

  for (std::size_t i = 1; i < n; ++i) check_same_dims(masks[0].mask, masks[i].mask);
  for (const auto& m : masks) {
    if (m.confidence < 0.0 || m.confidence > 1.0) throw ValidationError("mask confidence outside [0,1]");
  }

  std::vector<std::vector<Interval>> ivs(n);
  for (std::size_t i = 0; i < n; ++i) ivs[i] = to_intervals(masks[i].mask);

  Dsu dsu(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t area_i = interval_area(ivs[i]);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (masks[i].class_id != masks[j].class_id) continue;
      const std::uint64_t inter = interval_intersection_area(ivs[i], ivs[j]);
      const std::uint64_t uni = area_i + interval_area(ivs[j]) - inter;
      if (uni == 0) continue;
      if (static_cast<double>(inter) / static_cast<double>(uni) > merge_threshold) {
        dsu.unite(static_cast<int>(i), static_cast<int>(j));
      }
    }
  }

  // clusters keyed by their lowest member index; that index fixes output order
  std::vector<int> cluster_of(n);
  std::vector<int> roots;
  for (std::size_t i = 0; i < n; ++i) {
    const int r = dsu.find(static_cast<int>(i));
    if (r == static_cast<int>(i)) roots.push_back(r);
    cluster_of[i] = r;
  }

  struct Cluster {
    int root;
    int class_id;
    double confidence;  // max over members
    std::vector<Interval> pixels;
  };
  std::vector<Cluster> clusters;
  clusters.reserve(roots.size());
  for (int r : roots) {
    Cluster c{r, masks[r].class_id, 0.0, {}};
    for (std::size_t i = 0; i < n; ++i) {
      if (cluster_of[i] != r) continue;
      c.confidence = std::max(c.confidence, masks[i].confidence);
      c.pixels = interval_union(c.pixels, ivs[i]);
    }
    clusters.push_back(std::move(c));
  }

  // contested pixels go to the cluster with the higher confidence
  std::vector<std::size_t> priority(clusters.size());
  std::iota(priority.begin(), priority.end(), 0);
  std::stable_sort(priority.begin(), priority.end(), [&](std::size_t a, std::size_t b) {
    return clusters[a].confidence > clusters[b].confidence;
  });
  std::vector<Interval> claimed;
  for (std::size_t p : priority) {
    auto mine = interval_subtract(clusters[p].pixels, claimed);
    claimed = interval_union(claimed, clusters[p].pixels);
    clusters[p].pixels = std::move(mine);
  }

  std::vector<int> output_index(clusters.size(), -1);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    if (clusters[c].pixels.empty()) continue;  // fully contested or empty: dropped
    output_index[c] = static_cast<int>(result.masks.size());
    result.masks.push_back({clusters[c].class_id, clusters[c].confidence,
                            from_intervals(clusters[c].pixels, masks[0].mask.width, masks[0].mask.height)});
  }
  std::vector<int> root_to_cluster(n, -1);
  for (std::size_t c = 0; c < clusters.size(); ++c) root_to_cluster[clusters[c].root] = static_cast<int>(c);
  for (std::size_t i = 0; i < n; ++i) result.remap[i] = output_index[root_to_cluster[cluster_of[i]]];
  return result;
}

}  // namespace psgeval
