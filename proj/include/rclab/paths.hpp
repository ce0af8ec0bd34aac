#pragma once

#include <optional>
#include <vector>

#include "rclab/lattice.hpp"
#include "rclab/rcmodel.hpp"

namespace rclab {

/// Open left-right crossing of a rectangle. Lengths count edges.
struct CrossingResult {
    bool exists = false;
    std::optional<int> shortest_length;
    std::optional<std::vector<int>> shortest_path;  // edge ids, left to right
};

/// A crossing starts on the left column, never re-enters it, and ends at the
/// first vertex it reaches on the right column.
struct LowestCrossing {
    std::vector<int> path;          // edge ids, left to right
    std::vector<Vertex> vertices;   // path.size() + 1 vertices
    long below_area = 0;            // unit faces of the box strictly below the path
};

// All functions below require config to live on `box` (same domain object).

bool has_horizontal_crossing(const Configuration& config, const RectDomain& box);
CrossingResult horizontal_crossing(const Configuration& config, const RectDomain& box);
/// S_n: breadth-first search from the whole left column.
std::optional<int> chemical_distance(const Configuration& config, const RectDomain& box);

/// Closed dual path from the dual row below the box to the dual row above it,
/// crossing only closed edges of the box.
bool has_dual_vertical_crossing(const Configuration& config, const RectDomain& box);

/// The crossing minimal in the below-region order: right-first exploration
/// from the lowest left-column vertex upwards.
std::optional<LowestCrossing> lowest_crossing(const Configuration& config, const RectDomain& box);

/// Faces of the box reachable from the dual row below it without crossing `path`.
long below_area(const RectDomain& box, const std::vector<int>& path);

/// Number of path edges e = (a, b) for which Ann(a; 1, r) carries an OOC arm
/// event, r = min(cap_radius, distance from a to the box boundary). Edges with
/// r <= 1 pass vacuously.
int three_arm_point_count(const Configuration& config, const RectDomain& box, const LowestCrossing& crossing,
                          int cap_radius);

/// Shortest open path from the box center to its boundary, in edges.
std::optional<int> radial_chemical_distance(const Configuration& config, const RectDomain& box);

}  // namespace rclab
