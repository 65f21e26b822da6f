#pragma once

#include "venuesense/floorplan.hpp"

#include <span>

namespace venuesense {

/// Mean of the locations of check-ins judged correct. Throws on an empty list.
Point2 estimate_venue_location(std::span<const Point2> correct_locations);

/// Tags the polygon enclosing `location` (or the nearest one) with `venue`,
/// removing any label the venue held before.
Floorplan label_floorplan(const VenueId& venue, const Point2& location, Floorplan plan, int floor = 0);

/// Fraction of ground-truth venues whose label sits on their true polygon.
double labeling_accuracy(const Floorplan& plan, const std::map<std::string, VenueId>& ground_truth);

} // namespace venuesense
