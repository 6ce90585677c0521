#include "amp/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "amp/errors.hpp"
#include "amp/util.hpp"

namespace amp {

OccupancyGrid make_empty_grid(double resolution, double origin_x, double origin_y, int width,
                              int height) {
    if (resolution <= 0 || width <= 0 || height <= 0)
        throw ParamError("grid: resolution, width, height must be positive");
    OccupancyGrid g;
    g.resolution = resolution;
    g.origin_x = origin_x;
    g.origin_y = origin_y;
    g.width = width;
    g.height = height;
    g.cells.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
    return g;
}

bool is_free_disc(const OccupancyGrid& grid, double cx, double cy, double radius) {
    if (radius < 0) throw ParamError("is_free_disc: radius must be >= 0");
    if (!grid.point_free(cx, cy)) return false;

    const double res = grid.resolution;
    // Cells whose center could lie within the radius. Indices may fall
    // outside the map; those count as occupied.
    const int i_lo = static_cast<int>(std::floor((cx - radius - grid.origin_x) / res - 0.5));
    const int i_hi = static_cast<int>(std::ceil((cx + radius - grid.origin_x) / res - 0.5));
    const int j_lo = static_cast<int>(std::floor((cy - radius - grid.origin_y) / res - 0.5));
    const int j_hi = static_cast<int>(std::ceil((cy + radius - grid.origin_y) / res - 0.5));
    // Conservative: ties (and half-ulp near-ties) count as collision.
    const double r2 = radius * radius + 1e-12;
    for (int j = j_lo; j <= j_hi; ++j) {
        const double dy = cy - grid.cell_center_y(j);
        const double dy2 = dy * dy;
        if (dy2 > r2) continue;
        for (int i = i_lo; i <= i_hi; ++i) {
            if (!grid.occupied(i, j)) continue;
            const double dx = cx - grid.cell_center_x(i);
            if (dx * dx + dy2 <= r2) return false;
        }
    }
    return true;
}

bool tube_is_free(const OccupancyGrid& grid, const MotionPrimitive& prim, const Pose& anchor,
                  double radius, double check_period) {
    if (check_period <= 0 || check_period > prim.sample_period + 1e-12)
        throw ParamError("tube_is_free: check_period must be in (0, sample_period]");
    double dt = check_period;
    if (prim.linear_speed > 0)
        dt = std::min(dt, 0.5 * grid.resolution / prim.linear_speed);
    const int n = static_cast<int>(std::ceil(prim.t_f / dt));
    for (int i = 0; i <= n; ++i) {
        const double t = std::min(i * dt, prim.t_f);
        const PrimitiveSample p = prim.world_pose_at(anchor, t);
        if (!is_free_disc(grid, p.x, p.y, radius)) return false;
        if (t >= prim.t_f) break;
    }
    return true;
}

OccupancyGrid rasterize(const ObstacleMap& omap) {
    OccupancyGrid g = make_empty_grid(omap.resolution, omap.origin_x, omap.origin_y, omap.width,
                                      omap.height);
    for (const auto& r : omap.rects) {
        const int i0 = std::max(0, g.cell_i(r.xmin));
        const int i1 = std::min(g.width - 1, g.cell_i(r.xmax));
        const int j0 = std::max(0, g.cell_j(r.ymin));
        const int j1 = std::min(g.height - 1, g.cell_j(r.ymax));
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) {
                const double x = g.cell_center_x(i), y = g.cell_center_y(j);
                if (x >= r.xmin && x <= r.xmax && y >= r.ymin && y <= r.ymax) g.set(i, j, true);
            }
    }
    for (const auto& c : omap.circles) {
        const int i0 = std::max(0, g.cell_i(c.cx - c.r));
        const int i1 = std::min(g.width - 1, g.cell_i(c.cx + c.r));
        const int j0 = std::max(0, g.cell_j(c.cy - c.r));
        const int j1 = std::min(g.height - 1, g.cell_j(c.cy + c.r));
        for (int j = j0; j <= j1; ++j)
            for (int i = i0; i <= i1; ++i) {
                const double dx = g.cell_center_x(i) - c.cx, dy = g.cell_center_y(j) - c.cy;
                if (dx * dx + dy * dy <= c.r * c.r) g.set(i, j, true);
            }
    }
    return g;
}

namespace {

struct Header {
    double resolution = 0.0;
    double origin_x = 0.0, origin_y = 0.0;
    int width = 0, height = 0;
};

// Reads the three header lines; leaves the stream at the body.
Header read_header(std::istream& in, const std::string& path) {
    Header h;
    bool got_res = false, got_origin = false, got_size = false;
    std::string line;
    while ((!got_res || !got_origin || !got_size) && std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "resolution") {
            if (!(ss >> h.resolution)) throw IoError("map: bad resolution line in " + path);
            got_res = true;
        } else if (key == "origin") {
            if (!(ss >> h.origin_x >> h.origin_y)) throw IoError("map: bad origin line in " + path);
            got_origin = true;
        } else if (key == "size") {
            if (!(ss >> h.width >> h.height)) throw IoError("map: bad size line in " + path);
            got_size = true;
        } else {
            throw IoError("map: unexpected header line in " + path + ": " + line);
        }
    }
    if (!got_res || !got_origin || !got_size)
        throw IoError("map: missing header (resolution/origin/size) in " + path);
    if (h.resolution <= 0 || h.width <= 0 || h.height <= 0)
        throw IoError("map: non-positive resolution or size in " + path);
    return h;
}

void write_header(std::ostream& out, double res, double ox, double oy, int w, int ht) {
    out << "resolution " << fmt_double(res) << "\n";
    out << "origin " << fmt_double(ox) << " " << fmt_double(oy) << "\n";
    out << "size " << w << " " << ht << "\n";
}

}  // namespace

OccupancyGrid load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("map: cannot open " + path);
    const Header h = read_header(in, path);
    OccupancyGrid g = make_empty_grid(h.resolution, h.origin_x, h.origin_y, h.width, h.height);
    std::string line;
    int rows = 0;
    while (rows < h.height && std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;  // '#' is an occupied cell here, not a comment
        if (static_cast<int>(line.size()) < h.width)
            throw IoError("map: row " + std::to_string(rows) + " too short in " + path);
        const int j = h.height - 1 - rows;  // top row of the file is the highest j
        for (int i = 0; i < h.width; ++i) {
            const char c = line[static_cast<std::size_t>(i)];
            if (c == '#')
                g.set(i, j, true);
            else if (c != '.')
                throw IoError(std::string("map: unexpected character '") + c + "' in " + path);
        }
        ++rows;
    }
    if (rows != h.height) throw IoError("map: expected " + std::to_string(h.height) + " rows in " + path);
    return g;
}

void save_grid(const OccupancyGrid& grid, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("map: cannot write " + path);
    write_header(out, grid.resolution, grid.origin_x, grid.origin_y, grid.width, grid.height);
    std::string row(static_cast<std::size_t>(grid.width), '.');
    for (int j = grid.height - 1; j >= 0; --j) {
        for (int i = 0; i < grid.width; ++i)
            row[static_cast<std::size_t>(i)] = grid.occupied(i, j) ? '#' : '.';
        out << row << "\n";
    }
}

ObstacleMap load_obstacles(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("map: cannot open " + path);
    const Header h = read_header(in, path);
    ObstacleMap m;
    m.resolution = h.resolution;
    m.origin_x = h.origin_x;
    m.origin_y = h.origin_y;
    m.width = h.width;
    m.height = h.height;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string kind;
        ss >> kind;
        if (kind == "rect") {
            RectObstacle r{};
            if (!(ss >> r.xmin >> r.ymin >> r.xmax >> r.ymax) || r.xmax < r.xmin || r.ymax < r.ymin)
                throw IoError("map: bad rect line in " + path + ": " + line);
            m.rects.push_back(r);
        } else if (kind == "circle") {
            CircleObstacle c{};
            if (!(ss >> c.cx >> c.cy >> c.r) || c.r < 0)
                throw IoError("map: bad circle line in " + path + ": " + line);
            m.circles.push_back(c);
        } else {
            throw IoError("map: unknown shape '" + kind + "' in " + path);
        }
    }
    return m;
}

void save_obstacles(const ObstacleMap& omap, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("map: cannot write " + path);
    write_header(out, omap.resolution, omap.origin_x, omap.origin_y, omap.width, omap.height);
    for (const auto& r : omap.rects)
        out << "rect " << fmt_double(r.xmin) << " " << fmt_double(r.ymin) << " "
            << fmt_double(r.xmax) << " " << fmt_double(r.ymax) << "\n";
    for (const auto& c : omap.circles)
        out << "circle " << fmt_double(c.cx) << " " << fmt_double(c.cy) << " " << fmt_double(c.r)
            << "\n";
}

OccupancyGrid load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("map: cannot open " + path);
    read_header(in, path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("rect", 0) == 0 || line.rfind("circle", 0) == 0)
            return rasterize(load_obstacles(path));
        break;  // anything else is a grid row ('#' at column 0 is an occupied cell)
    }
    return load_grid(path);
}

}  // namespace amp
