#include "landscape/viz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "landscape/error.hpp"

namespace landscape {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x + 0.0);
  return buf;
}

std::string lerp_color(double t) {
  // Deep basins dark blue, shallow ones pale yellow.
  t = std::clamp(t, 0.0, 1.0);
  const double from[3] = {8, 48, 107};
  const double to[3] = {255, 237, 160};
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(from[0] + t * (to[0] - from[0]))),
                static_cast<int>(std::lround(from[1] + t * (to[1] - from[1]))),
                static_cast<int>(std::lround(from[2] + t * (to[2] - from[2]))));
  return buf;
}

class SvgWriter {
 public:
  SvgWriter(double width, double height) : width_(width), height_(height) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width) << "\" height=\""
         << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n"
         << "<rect x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
         << "\" fill=\"white\"/>\n";
  }

  SvgWriter& raw(const std::string& s) {
    out_ << s;
    return *this;
  }

  void line(double x0, double y0, double x1, double y1, const std::string& stroke, double width,
            const std::string& extra = "") {
    out_ << "<line x1=\"" << num(x0) << "\" y1=\"" << num(y0) << "\" x2=\"" << num(x1) << "\" y2=\"" << num(y1)
         << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"" << extra << "/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& anchor = "start") {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"11\" "
         << "text-anchor=\"" << anchor << "\">" << s << "</text>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

  double width() const { return width_; }
  double height() const { return height_; }

 private:
  double width_, height_;
  std::ostringstream out_;
};

}  // namespace

// ---------------------------------------------------------------------------

namespace {

// Branch hierarchy of a barcode plus sorted basin values for sublevel counting.
class BranchWidths {
 public:
  BranchWidths(const Barcode& barcode, const StableManifolds& manifolds, const LandscapeGrid& grid) {
    if (barcode.grid_digest != manifolds.grid_digest) {
      throw UsageError("barcode and stable manifolds come from different grids");
    }
    const auto& values = grid.values();
    for (std::size_t i = 0; i < manifolds.assignment.size(); ++i) {
      basin_values_[manifolds.assignment[i]].push_back(values[i]);
    }
    for (auto& [m, v] : basin_values_) std::sort(v.begin(), v.end());
    for (const auto& p : barcode.pairs) {
      if (p.essential) essential_ = &p;
      else children_[p.survivor].push_back(&p);
    }
    if (!essential_) throw UsageError("barcode has no essential pair");
    for (auto& [m, kids] : children_) {
      std::sort(kids.begin(), kids.end(), [](const PersistencePair* a, const PersistencePair* b) {
        if (a->persistence != b->persistence) return a->persistence > b->persistence;
        return a->minimum < b->minimum;
      });
    }
  }

  const PersistencePair* essential() const { return essential_; }

  const std::vector<const PersistencePair*>& children(std::size_t minimum) const {
    static const std::vector<const PersistencePair*> none;
    const auto it = children_.find(minimum);
    return it == children_.end() ? none : it->second;
  }

  double own(std::size_t minimum, double h) const {
    const auto it = basin_values_.find(minimum);
    if (it == basin_values_.end()) return 0.0;
    return static_cast<double>(std::upper_bound(it->second.begin(), it->second.end(), h) - it->second.begin());
  }

  // Own basin plus every descendant merged by h.
  double subtree(std::size_t minimum, double h) const {
    const auto key = std::make_pair(minimum, h);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double w = own(minimum, h);
    for (const PersistencePair* c : children(minimum)) {
      if (c->death <= h) w += subtree(c->minimum, h);
    }
    memo_[key] = w;
    return w;
  }

 private:
  std::map<std::size_t, std::vector<double>> basin_values_;
  std::map<std::size_t, std::vector<const PersistencePair*>> children_;
  const PersistencePair* essential_ = nullptr;
  mutable std::map<std::pair<std::size_t, double>, double> memo_;
};

}  // namespace

std::map<std::size_t, double> profile_slice(const Barcode& barcode, const StableManifolds& manifolds,
                                            const LandscapeGrid& grid, double h) {
  const BranchWidths widths(barcode, manifolds, grid);
  const double n = static_cast<double>(grid.size());
  std::map<std::size_t, double> out;
  for (const auto& p : barcode.pairs) out[p.minimum] = widths.subtree(p.minimum, h) / n;
  return out;
}

ProfileLayout layout_profile(const Barcode& barcode, const StableManifolds& manifolds, const LandscapeGrid& grid,
                             std::size_t levels) {
  if (levels < 2) throw UsageError("profile needs at least 2 levels");
  const BranchWidths widths(barcode, manifolds, grid);
  const double n = static_cast<double>(grid.size());

  ProfileLayout layout;
  layout.levels = levels;
  layout.f_min = grid.f_min();
  layout.f_max = grid.f_max();
  const double range = grid.value_range();

  // Parents first: breadth-first from the essential branch.
  std::vector<const PersistencePair*> order{widths.essential()};
  std::map<std::size_t, std::size_t> index_of{{widths.essential()->minimum, 0}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const PersistencePair* c : widths.children(order[i]->minimum)) {
      index_of[c->minimum] = order.size();
      order.push_back(c);
    }
  }

  for (const PersistencePair* p : order) {
    ProfileBranch b;
    b.minimum = p->minimum;
    b.birth = p->birth;
    b.death = p->essential ? grid.f_max() : p->death;
    b.essential = p->essential;
    b.persistence = p->persistence;
    b.depth = range > 0.0 ? (p->birth - grid.f_min()) / range : 0.0;
    b.color = lerp_color(b.depth);
    if (!p->essential) b.parent = index_of.at(p->survivor);
    for (std::size_t i = 0; i < levels; ++i) {
      const double h = (i + 1 == levels) ? b.death
                                         : b.birth + (b.death - b.birth) * (static_cast<double>(i) /
                                                                            static_cast<double>(levels - 1));
      b.samples.push_back(ProfileSample{h, widths.subtree(p->minimum, h) / n});
    }
    if (!p->essential) {
      // Children of one parent join in saddle order (value, then index).
      b.merge_width = widths.subtree(p->minimum, p->death) / n;
      double before = widths.own(p->survivor, p->death);
      for (const PersistencePair* s : widths.children(p->survivor)) {
        if (s == p) continue;
        const bool earlier = s->death < p->death || (s->death == p->death && *s->saddle < *p->saddle);
        if (earlier) before += widths.subtree(s->minimum, p->death);
      }
      b.parent_width_at_merge = before / n;
    }
    layout.branches.push_back(std::move(b));
  }

  // Horizontal placement: children left to right by persistence, then the
  // parent's own basin.
  layout.branches[0].center = 0.5;
  for (std::size_t i = 0; i < layout.branches.size(); ++i) {
    const auto& parent = layout.branches[i];
    const double top_width = parent.samples.back().width;
    double cursor = parent.center - 0.5 * top_width;
    for (const PersistencePair* c : widths.children(parent.minimum)) {
      auto& child = layout.branches[index_of.at(c->minimum)];
      child.center = cursor + 0.5 * child.merge_width;
      cursor += child.merge_width;
    }
  }
  return layout;
}

// ---------------------------------------------------------------------------

namespace {

// Crossing on the edge between grid points p and q, always interpolated from
// the lower linear index so neighbouring cells agree bit-for-bit.
std::pair<double, double> crossing(const LandscapeGrid& grid, std::size_t cols, std::size_t p, std::size_t q,
                                   double level) {
  if (q < p) std::swap(p, q);
  const double vp = grid.value(p), vq = grid.value(q);
  const double t = (level - vp) / (vq - vp);
  const double yp = static_cast<double>(p / cols), xp = static_cast<double>(p % cols);
  const double yq = static_cast<double>(q / cols), xq = static_cast<double>(q % cols);
  return {xp + t * (xq - xp), yp + t * (yq - yp)};
}

}  // namespace

std::vector<Segment> contour_segments(const LandscapeGrid& grid, double level) {
  if (grid.ndim() != 2) {
    throw UsageError("contour rendering needs a 2D grid, this grid has " + std::to_string(grid.ndim()) + " axes");
  }
  const std::size_t rows = grid.axes()[0].steps, cols = grid.axes()[1].steps;
  std::vector<Segment> out;
  if (rows < 2 || cols < 2) return out;

  for (std::size_t i = 0; i + 1 < rows; ++i) {
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      const std::size_t a = i * cols + j, b = a + 1, c = a + cols + 1, d = a + cols;
      const int mask = (grid.value(a) > level ? 8 : 0) | (grid.value(b) > level ? 4 : 0) |
                       (grid.value(c) > level ? 2 : 0) | (grid.value(d) > level ? 1 : 0);
      if (mask == 0 || mask == 15) continue;
      auto top = [&] { return crossing(grid, cols, a, b, level); };
      auto right = [&] { return crossing(grid, cols, b, c, level); };
      auto bottom = [&] { return crossing(grid, cols, d, c, level); };
      auto left = [&] { return crossing(grid, cols, a, d, level); };
      auto emit = [&](std::pair<double, double> p, std::pair<double, double> q) {
        out.push_back(Segment{p.first, p.second, q.first, q.second});
      };
      const double centre = 0.25 * (grid.value(a) + grid.value(b) + grid.value(c) + grid.value(d));
      switch (mask) {
        case 1: case 14: emit(left(), bottom()); break;
        case 2: case 13: emit(bottom(), right()); break;
        case 3: case 12: emit(left(), right()); break;
        case 4: case 11: emit(top(), right()); break;
        case 6: case 9: emit(top(), bottom()); break;
        case 7: case 8: emit(left(), top()); break;
        case 5:
          if (centre > level) {
            emit(left(), top());
            emit(bottom(), right());
          } else {
            emit(top(), right());
            emit(left(), bottom());
          }
          break;
        case 10:
          if (centre > level) {
            emit(top(), right());
            emit(left(), bottom());
          } else {
            emit(left(), top());
            emit(bottom(), right());
          }
          break;
        default:
          break;
      }
    }
  }
  return out;
}

std::vector<double> contour_levels(const LandscapeGrid& grid, std::size_t count) {
  std::vector<double> out;
  const double range = grid.value_range();
  if (range <= 0.0) return out;
  for (std::size_t i = 1; i <= count; ++i) {
    out.push_back(grid.f_min() + range * static_cast<double>(i) / static_cast<double>(count + 1));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string render_barcode(const Barcode& barcode) {
  std::vector<const PersistencePair*> bars;
  for (const auto& p : barcode.pairs) bars.push_back(&p);
  std::sort(bars.begin(), bars.end(), [](const PersistencePair* a, const PersistencePair* b) {
    if (a->birth != b->birth) return a->birth < b->birth;
    if (a->persistence != b->persistence) return a->persistence > b->persistence;
    return a->minimum < b->minimum;
  });

  double lo = 0.0, hi = 1.0;
  if (!bars.empty()) {
    lo = bars.front()->birth;
    hi = lo;
    for (const auto* p : bars) {
      lo = std::min(lo, p->birth);
      hi = std::max(hi, p->death);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  const double left = 60.0, right = 580.0, row = 16.0, top = 30.0;
  SvgWriter svg(640.0, top + row * static_cast<double>(bars.size()) + 40.0);
  auto x_of = [&](double v) { return left + (right - left) * (v - lo) / span; };

  svg.raw("<g id=\"bars\">\n");
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const auto* p = bars[i];
    const double y = top + row * static_cast<double>(i) + row / 2.0;
    if (p->essential) {
      svg.line(x_of(p->birth), y, x_of(p->death), y, "#b2182b", 6.0, " stroke-dasharray=\"8 3\" class=\"essential\"");
    } else {
      svg.line(x_of(p->birth), y, x_of(p->death), y, "#2166ac", 6.0, " class=\"finite\"");
    }
  }
  svg.raw("</g>\n");
  const double axis_y = top + row * static_cast<double>(bars.size()) + 10.0;
  svg.line(left, axis_y, right, axis_y, "black", 1.0);
  svg.text(left, axis_y + 15.0, num(lo), "middle");
  svg.text(right, axis_y + 15.0, num(hi), "middle");
  svg.text(left - 50.0, 18.0, "persistence barcode (" + std::to_string(bars.size()) + " bars)");
  return svg.finish();
}

std::string render_merge_tree(const MergeTree& tree) {
  const std::size_t count = tree.nodes.size();
  std::vector<std::vector<std::size_t>> kids(count);
  for (const auto& e : tree.edges) kids[e.parent].push_back(e.child);
  for (auto& k : kids) {
    std::sort(k.begin(), k.end(), [&](std::size_t a, std::size_t b) {
      const auto& na = tree.nodes[a];
      const auto& nb = tree.nodes[b];
      if (na.value != nb.value) return na.value < nb.value;
      return na.grid_index < nb.grid_index;
    });
  }

  // In-order leaf layout: leaves take consecutive slots, parents sit at the
  // mean of their children.
  std::vector<double> slot(count, 0.0);
  double next_leaf = 0.0;
  auto place = [&](auto&& self, std::size_t node) -> void {
    if (kids[node].empty()) {
      slot[node] = next_leaf;
      next_leaf += 1.0;
      return;
    }
    double sum = 0.0;
    for (std::size_t c : kids[node]) {
      self(self, c);
      sum += slot[c];
    }
    slot[node] = sum / static_cast<double>(kids[node].size());
  };
  if (count > 0) place(place, tree.root);

  double lo = 0.0, hi = 1.0;
  if (count > 0) {
    lo = hi = tree.nodes.front().value;
    for (const auto& n : tree.nodes) {
      lo = std::min(lo, n.value);
      hi = std::max(hi, n.value);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  const double leaves = std::max(1.0, next_leaf);
  const double left = 40.0, right = 600.0, top = 30.0, bottom = 440.0;
  auto x_of = [&](double s) { return leaves <= 1.0 ? 0.5 * (left + right) : left + (right - left) * s / (leaves - 1.0); };
  auto y_of = [&](double v) { return bottom - (bottom - top) * (v - lo) / span; };

  SvgWriter svg(640.0, 480.0);
  svg.raw("<g id=\"edges\" fill=\"none\">\n");
  for (const auto& e : tree.edges) {
    const double xc = x_of(slot[e.child]), yc = y_of(tree.nodes[e.child].value);
    const double xp = x_of(slot[e.parent]), yp = y_of(tree.nodes[e.parent].value);
    svg.raw("<path d=\"M " + num(xc) + " " + num(yc) + " L " + num(xc) + " " + num(yp) + " L " + num(xp) + " " +
            num(yp) + "\" stroke=\"#333333\" stroke-width=\"1.5\"/>\n");
  }
  svg.raw("</g>\n<g id=\"nodes\">\n");
  for (const auto& n : tree.nodes) {
    const char* fill = n.kind == NodeKind::kMinimum ? "#2166ac" : (n.kind == NodeKind::kSaddle ? "#f4a582" : "#b2182b");
    svg.raw("<circle cx=\"" + num(x_of(slot[n.id])) + "\" cy=\"" + num(y_of(n.value)) + "\" r=\"4\" fill=\"" + fill +
            "\" class=\"" + node_kind_name(n.kind) + "\"/>\n");
  }
  svg.raw("</g>\n");
  svg.text(8.0, y_of(lo) + 4.0, num(lo));
  svg.text(8.0, y_of(hi) + 4.0, num(hi));
  svg.text(left, 18.0, "merge tree (" + std::to_string(tree.minimum_count()) + " minima)");
  return svg.finish();
}

std::string render_profile(const ProfileLayout& layout) {
  const double left = 40.0, right = 600.0, top = 30.0, bottom = 440.0;
  const double span = layout.f_max > layout.f_min ? layout.f_max - layout.f_min : 1.0;
  auto x_of = [&](double u) { return left + (right - left) * u; };
  auto y_of = [&](double v) { return bottom - (bottom - top) * (v - layout.f_min) / span; };

  SvgWriter svg(640.0, 480.0);
  svg.raw("<g id=\"branches\" stroke=\"#222222\" stroke-width=\"0.5\">\n");
  for (const auto& b : layout.branches) {
    std::string points;
    for (const auto& s : b.samples) {
      points += num(x_of(b.center + 0.5 * s.width)) + "," + num(y_of(s.level)) + " ";
    }
    for (auto it = b.samples.rbegin(); it != b.samples.rend(); ++it) {
      points += num(x_of(b.center - 0.5 * it->width)) + "," + num(y_of(it->level)) + " ";
    }
    if (!points.empty()) points.pop_back();
    svg.raw("<polygon points=\"" + points + "\" fill=\"" + b.color + "\" class=\"" +
            std::string(b.essential ? "root" : "branch") + "\"/>\n");
  }
  svg.raw("</g>\n");
  svg.text(8.0, y_of(layout.f_min) + 4.0, num(layout.f_min));
  svg.text(8.0, y_of(layout.f_max) + 4.0, num(layout.f_max));
  svg.text(left, 18.0, "landscape profile (" + std::to_string(layout.branches.size()) + " basins)");
  return svg.finish();
}

std::string render_contour(const LandscapeGrid& grid, std::size_t levels) {
  if (grid.ndim() != 2) {
    throw UsageError("contour rendering needs a 2D grid, this grid has " + std::to_string(grid.ndim()) + " axes");
  }
  const std::size_t rows = grid.axes()[0].steps, cols = grid.axes()[1].steps;
  const double size = 480.0, margin = 20.0;
  const double cell = (size - 2.0 * margin) / static_cast<double>(std::max(rows, cols));
  const double range = grid.value_range();

  SvgWriter svg(size, size);
  svg.raw("<g id=\"heat\" stroke=\"none\">\n");
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double t = range > 0.0 ? (grid.value(i * cols + j) - grid.f_min()) / range : 0.0;
      svg.raw("<rect x=\"" + num(margin + cell * static_cast<double>(j)) + "\" y=\"" +
              num(margin + cell * static_cast<double>(i)) + "\" width=\"" + num(cell) + "\" height=\"" + num(cell) +
              "\" fill=\"" + lerp_color(t) + "\"/>\n");
    }
  }
  svg.raw("</g>\n<g id=\"isolines\" fill=\"none\" stroke=\"black\" stroke-width=\"1\">\n");
  // Grid points sit at cell centres.
  auto px = [&](double x) { return margin + cell * (x + 0.5); };
  for (double level : contour_levels(grid, levels)) {
    const auto segments = contour_segments(grid, level);
    if (segments.empty()) continue;
    std::string d;
    for (const auto& s : segments) {
      d += "M " + num(px(s.x0)) + " " + num(px(s.y0)) + " L " + num(px(s.x1)) + " " + num(px(s.y1)) + " ";
    }
    d.pop_back();
    svg.raw("<path class=\"isoline\" data-level=\"" + num(level) + "\" d=\"" + d + "\"/>\n");
  }
  svg.raw("</g>\n");
  return svg.finish();
}

}  // namespace landscape
