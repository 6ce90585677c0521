#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "amp/geom.hpp"
#include "amp/primitives.hpp"

namespace amp {

/// 2D occupancy grid. Cell (i, j) covers
/// [origin + (i,j)*resolution, origin + (i+1,j+1)*resolution); its center is
/// origin + (i+0.5, j+0.5)*resolution. Everything outside the map is treated
/// as occupied. Immutable after load; safe for concurrent readers.
struct OccupancyGrid {
    double resolution = 0.05;  // [m/cell]
    double origin_x = 0.0;     // [m], world x of cell (0,0) corner
    double origin_y = 0.0;
    int width = 0;   // cells
    int height = 0;  // cells
    std::vector<std::uint8_t> cells;  // row-major, 1 = occupied

    bool in_bounds(int i, int j) const { return i >= 0 && i < width && j >= 0 && j < height; }
    bool occupied(int i, int j) const {
        if (!in_bounds(i, j)) return true;
        return cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
                     static_cast<std::size_t>(i)] != 0;
    }
    void set(int i, int j, bool occ) {
        cells[static_cast<std::size_t>(j) * static_cast<std::size_t>(width) +
              static_cast<std::size_t>(i)] = occ ? 1 : 0;
    }
    double cell_center_x(int i) const { return origin_x + (i + 0.5) * resolution; }
    double cell_center_y(int j) const { return origin_y + (j + 0.5) * resolution; }
    int cell_i(double x) const { return static_cast<int>(std::floor((x - origin_x) / resolution)); }
    int cell_j(double y) const { return static_cast<int>(std::floor((y - origin_y) / resolution)); }

    /// Point test: is the cell containing (x, y) free and inside the map?
    bool point_free(double x, double y) const { return !occupied(cell_i(x), cell_j(y)); }
};

OccupancyGrid make_empty_grid(double resolution, double origin_x, double origin_y, int width,
                              int height);

/// True iff the disc of radius `radius` centered at (cx, cy) is collision
/// free: the containing cell is free, and no occupied cell center (including
/// the virtual occupied cells tiling the outside of the map) lies within
/// `radius` of the center. Ties count as collision.
bool is_free_disc(const OccupancyGrid& grid, double cx, double cy, double radius);

/// True iff is_free_disc holds along the primitive placed at `anchor`,
/// sampled densely enough that inter-sample gaps along the arc are below half
/// a cell. `check_period` must not exceed the primitive's sample period.
bool tube_is_free(const OccupancyGrid& grid, const MotionPrimitive& prim, const Pose& anchor,
                  double radius, double check_period);

// --- obstacle lists -------------------------------------------------------

struct RectObstacle {
    double xmin, ymin, xmax, ymax;
};
struct CircleObstacle {
    double cx, cy, r;
};

struct ObstacleMap {
    double resolution = 0.05;
    double origin_x = 0.0;
    double origin_y = 0.0;
    int width = 0;
    int height = 0;
    std::vector<RectObstacle> rects;
    std::vector<CircleObstacle> circles;
};

/// Rasterize: a cell is occupied iff its center lies inside any shape
/// (boundary inclusive).
OccupancyGrid rasterize(const ObstacleMap& omap);

// --- file formats ---------------------------------------------------------
// Grid format: header lines `resolution R`, `origin X Y`, `size W H`, then H
// ASCII rows ('.' free, '#' occupied), top row = highest j. Obstacle format:
// same header followed by `rect xmin ymin xmax ymax` / `circle cx cy r`
// lines. save_* output is canonical, so write -> read -> write is
// byte-identical.

OccupancyGrid load_grid(const std::string& path);
void save_grid(const OccupancyGrid& grid, const std::string& path);

ObstacleMap load_obstacles(const std::string& path);
void save_obstacles(const ObstacleMap& omap, const std::string& path);

/// Load either format (sniffs the body), rasterizing obstacle lists.
OccupancyGrid load_map(const std::string& path);

}  // namespace amp
