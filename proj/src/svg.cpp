#include "amp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "amp/errors.hpp"

namespace amp {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void write_trajectory_svg(const std::string& path, const OccupancyGrid& grid,
                          const RefTrajectory& ref, const Trace& trace,
                          const PrimitiveLibrary& lib) {
    std::ofstream out(path);
    if (!out) throw IoError("svg: cannot write " + path);

    const double scale = 24.0;  // px per meter
    const double w = grid.width * grid.resolution;
    const double h = grid.height * grid.resolution;
    auto X = [&](double x) { return (x - grid.origin_x) * scale; };
    auto Y = [&](double y) { return (grid.origin_y + h - y) * scale; };  // y up

    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << num(w * scale) << "' height='"
        << num(h * scale) << "' viewBox='0 0 " << num(w * scale) << " " << num(h * scale) << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";

    // occupied cells, merged into horizontal runs
    out << "<g fill='#444'>\n";
    for (int j = 0; j < grid.height; ++j) {
        int i = 0;
        while (i < grid.width) {
            if (!grid.occupied(i, j)) {
                ++i;
                continue;
            }
            int i2 = i;
            while (i2 < grid.width && grid.occupied(i2, j)) ++i2;
            const double x0 = grid.origin_x + i * grid.resolution;
            const double y1 = grid.origin_y + (j + 1) * grid.resolution;
            out << "<rect x='" << num(X(x0)) << "' y='" << num(Y(y1)) << "' width='"
                << num((i2 - i) * grid.resolution * scale) << "' height='"
                << num(grid.resolution * scale) << "'/>\n";
            i = i2;
        }
    }
    out << "</g>\n";

    // selected tubes
    out << "<g fill='#3b7dd8' fill-opacity='0.12' stroke='none'>\n";
    for (const auto& rec : trace.plans) {
        if (rec.chosen_id < 0) continue;
        const MotionPrimitive* prim = nullptr;
        for (const auto& p : lib.primitives)
            if (p.id == rec.chosen_id) prim = &p;
        if (!prim) continue;
        for (double t = 0.0; t <= prim->t_f * 0.25; t += 0.1) {
            const PrimitiveSample s = prim->world_pose_at(rec.anchor, t);
            out << "<circle cx='" << num(X(s.x)) << "' cy='" << num(Y(s.y)) << "' r='"
                << num(std::max(rec.theta, 0.02) * scale) << "'/>\n";
        }
    }
    out << "</g>\n";

    // reference
    out << "<polyline fill='none' stroke='#999' stroke-dasharray='6,4' stroke-width='2' points='";
    for (const auto& p : ref.points()) out << num(X(p.x)) << "," << num(Y(p.y)) << " ";
    out << "'/>\n";

    // executed path
    out << "<polyline fill='none' stroke='" << (trace.collided ? "#c0392b" : "#111") <<
        "' stroke-width='2' points='";
    for (std::size_t i = 0; i < trace.states.size(); i += 5) {
        const auto& s = trace.states[i].state;
        out << num(X(s.position.x)) << "," << num(Y(s.position.y)) << " ";
    }
    out << "'/>\n";
    out << "</svg>\n";
}

void write_margin_svg(const std::string& path, const Trace& trace) {
    std::ofstream out(path);
    if (!out) throw IoError("svg: cannot write " + path);
    const double W = 900, H = 300, pad = 40;
    double t_max = 1.0, y_max = 0.1;
    for (const auto& r : trace.plans) {
        t_max = std::max(t_max, r.t);
        if (std::isfinite(r.theta)) y_max = std::max(y_max, r.theta);
        y_max = std::max(y_max, r.sigma_hat);
    }
    auto X = [&](double t) { return pad + t / t_max * (W - 2 * pad); };
    auto Y = [&](double v) { return H - pad - v / y_max * (H - 2 * pad); };
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect width='100%' height='100%' fill='white'/>\n";
    out << "<line x1='" << pad << "' y1='" << H - pad << "' x2='" << W - pad << "' y2='" << H - pad
        << "' stroke='black'/>\n";
    out << "<line x1='" << pad << "' y1='" << pad << "' x2='" << pad << "' y2='" << H - pad
        << "' stroke='black'/>\n";
    out << "<text x='" << W / 2 << "' y='" << H - 8 << "' font-size='12'>time [s]</text>\n";

    auto polyline = [&](const char* color, auto getter) {
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (const auto& r : trace.plans) {
            const double v = getter(r);
            if (!std::isfinite(v)) continue;
            out << num(X(r.t)) << "," << num(Y(v)) << " ";
        }
        out << "'/>\n";
    };
    polyline("#3b7dd8", [](const PlanRecord& r) { return r.theta; });
    polyline("#c0392b", [](const PlanRecord& r) { return r.sigma_hat; });
    polyline("#e67e22", [](const PlanRecord& r) { return r.sigma_level; });
    out << "<text x='" << W - pad - 220 << "' y='" << pad
        << "' font-size='12' fill='#3b7dd8'>margin [m]</text>\n";
    out << "<text x='" << W - pad - 140 << "' y='" << pad
        << "' font-size='12' fill='#c0392b'>sigma est</text>\n";
    out << "<text x='" << W - pad - 60 << "' y='" << pad
        << "' font-size='12' fill='#e67e22'>level</text>\n";
    out << "</svg>\n";
}

}  // namespace amp
