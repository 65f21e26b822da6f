#include "venuesense/labeling.hpp"

namespace venuesense {

Point2 estimate_venue_location(std::span<const Point2> correct_locations)
{
    if (correct_locations.empty()) {
        throw Error("no correct check-ins");
    }
    Point2 sum = Point2::Zero();
    for (const auto& p : correct_locations) {
        sum += p;
    }
    return sum / static_cast<double>(correct_locations.size());
}

Floorplan label_floorplan(const VenueId& venue, const Point2& location, Floorplan plan, int floor)
{
    if (plan.polygons.empty()) {
        throw Error("cannot label an empty floorplan");
    }
    const std::string target = locate_polygon(plan, location, floor).id;
    std::erase_if(plan.labels, [&](const auto& entry) { return entry.second == venue; });
    plan.labels[target] = venue;
    return plan;
}

double labeling_accuracy(const Floorplan& plan, const std::map<std::string, VenueId>& ground_truth)
{
    if (ground_truth.empty()) {
        return 0.0;
    }
    std::size_t correct = 0;
    for (const auto& [polygon, venue] : ground_truth) {
        const auto it = plan.labels.find(polygon);
        if (it != plan.labels.end() && it->second == venue) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(ground_truth.size());
}

} // namespace venuesense
