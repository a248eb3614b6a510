#pragma once

#include <string>
#include <vector>

#include "tvortex/cgl.hpp"
#include "tvortex/dynamics.hpp"

namespace tvortex::output {

// Header t,j,x,y,lx,ly,qx,qy,W,xix,xiy,speed; one row per (sample, vortex),
// j is 1-based, floats printed with 17 significant digits.
std::string trajectory_csv(const TrajectoryRecord& rec);

// t,E
std::string energy_csv(const PdeRun& run);
// t,j,x,y,degree with wrapped positions
std::string tracking_csv(const PdeRun& run);
// eps,n,dt,max_err
std::string compare_csv(const std::vector<CompareRow>& rows);

struct SvgPath {
    std::vector<Vec2> lifted;  // consecutive positions on the cover
    int degree = 1;
    std::string colour;
};

// Unit square with y pointing up. Each path is wrapped onto the square and
// split into separate polylines where it crosses the seam. +1 paths are solid,
// -1 dashed; the first point gets a start marker.
std::string svg_plot(const std::vector<SvgPath>& paths, const std::string& title);

// One path per vortex of a trajectory record.
std::vector<SvgPath> trajectory_paths(const TrajectoryRecord& rec);
std::vector<SvgPath> track_paths(const PdeRun& run);

// Wrapped pieces of a lifted path, cut where it leaves a unit cell; the cut
// point is repeated on both sides of the seam.
std::vector<std::vector<Vec2>> split_at_seams(const std::vector<Vec2>& lifted);

}  // namespace tvortex::output
