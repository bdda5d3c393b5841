#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "airdrop/dubins.hpp"
#include "airdrop/error.hpp"
#include "airdrop/pipeline.hpp"

namespace airdrop {

enum class SvgStyle { CoveragePath, DropOverview, MgvNetwork };

inline std::string_view svg_style_name(SvgStyle s) {
  switch (s) {
    case SvgStyle::CoveragePath: return "coverage_path";
    case SvgStyle::DropOverview: return "drop_overview";
    case SvgStyle::MgvNetwork: return "mgv_network";
  }
  return "?";
}

inline SvgStyle parse_svg_style(std::string_view name) {
  if (name == "coverage_path") return SvgStyle::CoveragePath;
  if (name == "drop_overview") return SvgStyle::DropOverview;
  if (name == "mgv_network") return SvgStyle::MgvNetwork;
  throw Error(ErrorCode::InvalidArgument, "unknown render style '" + std::string(name) + "'");
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// World meters to SVG pixels, north up.
class SvgCanvas {
 public:
  explicit SvgCanvas(const AreaOfInterest& area, double width_px = 1000.0)
      : area_(area), scale_(width_px / std::max(area.d_x, area.d_y)) {}

  double px(double x) const { return kMargin + (x - area_.min_x()) * scale_; }
  double py(double y) const { return kMargin + (area_.max_y() - y) * scale_; }
  double len(double d) const { return d * scale_; }
  double width() const { return 2.0 * kMargin + area_.d_x * scale_; }
  double height() const { return 2.0 * kMargin + area_.d_y * scale_; }

  void raw(const std::string& s) { body_ += s; }

  void line(const char* cls, Point2 a, Point2 b, const char* extra = "") {
    body_ += fmt("<line class=\"%s\" x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\"%s/>\n", cls, px(a.x), py(a.y),
                 px(b.x), py(b.y), extra);
  }

  void circle(const char* cls, Point2 c, double r_px, const std::string& title = "") {
    std::string s = fmt("<circle class=\"%s\" cx=\"%.3f\" cy=\"%.3f\" r=\"%.3f\"", cls, px(c.x), py(c.y), r_px);
    body_ += title.empty() ? s + "/>\n" : s + "><title>" + xml_escape(title) + "</title></circle>\n";
  }

  void polyline(const char* cls, const std::vector<Point2>& pts, bool closed = false) {
    if (pts.empty()) return;
    std::string s = fmt("<%s class=\"%s\" points=\"", closed ? "polygon" : "polyline", cls);
    for (std::size_t i = 0; i < pts.size(); ++i) s += fmt(i ? " %.3f,%.3f" : "%.3f,%.3f", px(pts[i].x), py(pts[i].y));
    body_ += s + "\"/>\n";
  }

  void rect(const char* cls, double x0, double y0, double x1, double y1) {
    body_ += fmt("<rect class=\"%s\" x=\"%.3f\" y=\"%.3f\" width=\"%.3f\" height=\"%.3f\"/>\n", cls, px(x0), py(y1),
                 len(x1 - x0), len(y1 - y0));
  }

  std::string finish(std::string_view title, std::string_view style) const {
    std::string head = fmt(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.3f\" height=\"%.3f\" viewBox=\"0 0 %.3f %.3f\">\n",
        width(), height(), width(), height());
    head += "<title>" + xml_escape(title) + " (" + std::string(style) + ")</title>\n";
    head +=
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
        "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\"/></marker></defs>\n"
        "<style>.area{fill:#f7f7f2;stroke:#333}.footprint{fill:#6fa8dc;fill-opacity:0.25;stroke:none}"
        ".tour{fill:none;stroke:#c0392b;stroke-width:1.5}.viewpoint{fill:#c0392b}"
        ".cell{fill:none;stroke:#555;stroke-dasharray:4 3}.drop{fill:#e67e22;stroke:#000}"
        ".trace{fill:none;stroke:#27ae60}.comm{fill:#8e44ad;fill-opacity:0.08;stroke:#8e44ad}"
        ".mgv{fill:#2c3e50}.target{fill:none;stroke:#2c3e50;stroke-width:2}"
        ".assignment{stroke:#7f8c8d;stroke-dasharray:2 2}.drive{fill:none;stroke:#2980b9;stroke-width:1.5}"
        ".link{stroke:#8e44ad;stroke-width:0.8}</style>\n";
    return head + body_ + "</svg>\n";
  }

  template <class... Args>
  static std::string fmt(const char* f, Args... args) {
    const int n = std::snprintf(nullptr, 0, f, args...);
    std::string s(static_cast<std::size_t>(n) + 1, '\0');
    std::snprintf(s.data(), s.size(), f, args...);
    s.resize(static_cast<std::size_t>(n));
    return s;
  }

 private:
  static constexpr double kMargin = 20.0;
  AreaOfInterest area_;
  double scale_;
  std::string body_;
};

inline std::vector<Point2> path_points(const DubinsPath& p) {
  std::vector<Point2> pts;
  const double ds = std::max(p.radius / 6.0, p.total_length / 400.0);
  for (const auto& q : sample_path(p, ds > 0.0 ? ds : 1.0)) pts.push_back(q.xy());
  if (pts.empty()) pts.push_back(p.start.xy());
  return pts;
}

inline void draw_plan_path(SvgCanvas& c, const MissionPlan& plan, const char* cls) {
  std::vector<Point2> pts;
  for (const auto& leg : plan.legs) {
    const auto seg = path_points(leg);
    pts.insert(pts.end(), seg.begin(), seg.end());
  }
  c.polyline(cls, pts);
}

}  // namespace detail

/// SVG figure for one pipeline stage. Throws MissingPhase when the report
/// lacks the data the style needs.
inline std::string render_svg(const RunReport& r, SvgStyle style) {
  const Scenario& s = r.scenario;
  detail::SvgCanvas c(s.area);
  c.rect("area", s.area.min_x(), s.area.min_y(), s.area.max_x(), s.area.max_y());

  switch (style) {
    case SvgStyle::CoveragePath: {
      if (!r.coverage_plan) throw Error(ErrorCode::MissingPhase, "coverage_path needs the rapid coverage plan");
      const MissionPlan& plan = *r.coverage_plan;
      const double half = footprint_halfwidth(s.coverage_altitude, s.camera.fov);
      for (const auto& v : plan.viewpoints) {
        if (s.camera.footprint == FootprintShape::Disk) {
          c.circle("footprint", v, c.len(half));
        } else {
          c.rect("footprint", v.x - half, v.y - half, v.x + half, v.y + half);
        }
      }
      detail::draw_plan_path(c, plan, "tour");
      for (std::size_t i = 0; i < plan.viewpoints.size(); ++i) {
        c.circle("viewpoint", plan.viewpoints[i], 4.0, "viewpoint " + std::to_string(i));
      }
      break;
    }
    case SvgStyle::DropOverview: {
      if (!r.drop_plan) throw Error(ErrorCode::MissingPhase, "drop_overview needs the drop tour");
      for (const auto& d : r.drops) c.polyline("cell", d.cell.polygon, true);
      for (const auto& t : r.trajectories) {
        std::vector<Point2> pts;
        for (const auto& smp : t.samples) pts.push_back(smp.pose.xy());
        c.polyline("trace", pts);
      }
      detail::draw_plan_path(c, *r.drop_plan, "tour");
      for (const auto& d : r.drop_plan->drop_points) {
        char label[160];
        std::snprintf(label, sizeof label, "%s %s z=%.1f", d.agent_id.c_str(),
                      std::string(agent_kind_name(d.agent_kind)).c_str(), d.altitude);
        c.circle("drop", d.position, 5.0, label);
      }
      break;
    }
    case SvgStyle::MgvNetwork: {
      if (!r.mgv) throw Error(ErrorCode::MissingPhase, "mgv_network needs the MGV redistribution phase");
      const MgvOutcome& m = *r.mgv;
      for (const auto& d : r.drops) c.polyline("cell", d.cell.polygon, true);
      const auto& nodes = m.network.node_positions;
      for (const auto& n : nodes) c.circle("comm", n, c.len(m.network.comm_range));
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
          if (distance(nodes[i], nodes[j]) <= m.network.comm_range) c.line("link", nodes[i], nodes[j]);
        }
      }
      for (std::size_t k = 0; k < m.assignment.pairs.size(); ++k) {
        const auto [i, j] = m.assignment.pairs[k];
        c.line("assignment", m.landing[i].xy(), m.targets[j], " marker-end=\"url(#arrow)\"");
        c.polyline("drive", detail::path_points(m.paths[k]));
      }
      for (std::size_t i = 0; i < m.landing.size(); ++i) c.circle("mgv", m.landing[i].xy(), 4.0, m.agent_ids[i]);
      for (std::size_t j = 0; j < m.targets.size(); ++j) {
        c.circle("target", m.targets[j], 6.0, "target " + std::to_string(j));
      }
      break;
    }
  }
  return c.finish(s.name, svg_style_name(style));
}

}  // namespace airdrop
