#pragma once

#include <cstdint>
#include <vector>

namespace psgeval {

/// Binary H x W mask stored as alternating run lengths over the row-major
/// pixel scan. runs[0] counts leading 0-pixels and may be zero; in canonical
/// form every later run is >= 1 and sum(runs) == width * height.
struct RleMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint32_t> runs;

  bool operator==(const RleMask&) const = default;
};

/// Fixed-size patch tiling of an image. The last patch row/column may extend
/// past the image; padding pixels count as background.
struct PatchGrid {
  int patch_size = 8;
  int grid_w = 0;
  int grid_h = 0;
};

/// Smallest grid of patch_size patches that covers a width x height image.
PatchGrid covering_grid(int width, int height, int patch_size);

/// Row-major dense bit grid (one byte per pixel, 0 or 1).
std::vector<std::uint8_t> rle_decode(const RleMask& mask);
RleMask rle_encode(const std::vector<std::uint8_t>& grid, int width, int height);

std::uint64_t mask_area(const RleMask& mask);
std::uint64_t intersection_area(const RleMask& a, const RleMask& b);

/// |a n b| / |a u b|; 0 when both masks are empty. Masks must share dimensions.
double iou(const RleMask& a, const RleMask& b);

RleMask mask_union(const RleMask& a, const RleMask& b);
RleMask mask_subtract(const RleMask& a, const RleMask& b);

/// Fraction of each patch covered by the mask, row-major over the grid.
/// The grid must cover the mask extent.
std::vector<double> patch_coverage(const RleMask& mask, const PatchGrid& grid);

struct ScoredMask {
  int class_id = 0;
  double confidence = 0.0;
  RleMask mask;

  bool operator==(const ScoredMask&) const = default;
};

struct MergeResult {
  std::vector<ScoredMask> masks;  // pairwise disjoint
  std::vector<int> remap;         // input index -> output index, -1 if dropped
};

/// Collapses near-duplicate masks into disjoint ones. Masks of equal class
/// with pairwise IoU above merge_threshold form a cluster; each cluster
/// emits the pixelwise union of its members. Residual overlap between
/// clusters is resolved in favor of the cluster with the higher member
/// confidence (ties: lower cluster index). Clusters left empty are dropped
/// and their inputs remap to -1.
MergeResult merge_masks(const std::vector<ScoredMask>& masks, double merge_threshold);

}  // namespace psgeval
