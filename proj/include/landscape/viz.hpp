#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "landscape/sampler.hpp"
#include "landscape/topology.hpp"

namespace landscape {

inline constexpr std::size_t kDefaultProfileLevels = 64;

struct ProfileSample {
  double level = 0.0;
  double width = 0.0;  // fraction of all grid points
};

// One basin of the landscape profile. Widths count the sublevel points of the
// branch's own stable manifold plus every descendant branch that has merged
// into it by that level, normalised by N (the root spans width 1 at f_max).
struct ProfileBranch {
  std::size_t minimum = 0;
  std::optional<std::size_t> parent;  // index into ProfileLayout::branches
  double birth = 0.0;
  double death = 0.0;  // f_max for the essential branch
  bool essential = false;
  double persistence = 0.0;
  std::vector<ProfileSample> samples;  // ascending level, birth..death inclusive
  double center = 0.5;                 // horizontal placement in [0, 1]
  double merge_width = 0.0;            // own subtree width when it joins the parent
  double parent_width_at_merge = 0.0;  // parent subtree width just before the join
  double depth = 0.0;                  // (birth - f_min) / R, 0 = deepest
  std::string color;
};

// Branches are ordered parents before children; branch 0 is essential.
struct ProfileLayout {
  std::vector<ProfileBranch> branches;
  std::size_t levels = kDefaultProfileLevels;
  double f_min = 0.0;
  double f_max = 0.0;
};

ProfileLayout layout_profile(const Barcode& barcode, const StableManifolds& manifolds, const LandscapeGrid& grid,
                             std::size_t levels = kDefaultProfileLevels);

// Subtree width of every branch (keyed by minimum) at level h. Branches that
// have not yet merged at h partition the sublevel set, so their widths sum to
// the fraction of points with value <= h.
std::map<std::size_t, double> profile_slice(const Barcode& barcode, const StableManifolds& manifolds,
                                            const LandscapeGrid& grid, double h);

struct Segment {
  double x0, y0, x1, y1;  // x along the last axis, y along the first, in index units
};

// Marching squares on a 2D grid; a corner is "inside" when its value exceeds
// the level. Saddle cells are resolved by the mean of the four corners.
std::vector<Segment> contour_segments(const LandscapeGrid& grid, double level);

// `count` evenly spaced levels strictly inside (f_min, f_max); empty when R = 0.
std::vector<double> contour_levels(const LandscapeGrid& grid, std::size_t count);

// SVG 1.1 documents. Numbers are printed with 6 significant digits so equal
// inputs give byte-identical output.
std::string render_barcode(const Barcode& barcode);
std::string render_merge_tree(const MergeTree& tree);
std::string render_profile(const ProfileLayout& layout);
std::string render_contour(const LandscapeGrid& grid, std::size_t levels = 10);

}  // namespace landscape
