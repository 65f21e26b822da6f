#pragma once

#include "venuesense/rtree.hpp"
#include "venuesense/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace venuesense {

struct Polygon {
    std::string id;
    int floor = 0;
    std::vector<Point2> vertices;  // either orientation, implicitly closed
};

/// Closed polygon test: points on the boundary count as inside.
bool point_in_polygon(const Point2& p, std::span<const Point2> vertices);

/// Distance from `p` to the nearest polygon edge.
double boundary_distance(const Point2& p, std::span<const Point2> vertices);

/// True when no two non-adjacent edges touch.
bool is_simple_polygon(std::span<const Point2> vertices);

struct WalkNode {
    Point2 xy = Point2::Zero();
    int floor = 0;
};

struct WalkEdge {
    std::size_t a = 0;
    std::size_t b = 0;
    double length = 0.0;  // meters
};

class WalkGraph;

/// Shortest walking distances from one origin point to everywhere else.
class WalkField {
public:
    /// Walking distance to `q`: origin snap offset + graph path + target snap
    /// offset when both ends snap onto connected nodes, Euclidean otherwise.
    double to(const Point2& q, int floor) const;

    bool snapped() const { return origin_node_.has_value(); }

private:
    friend class WalkGraph;

    const WalkGraph* graph_ = nullptr;
    Point2 origin_ = Point2::Zero();
    std::optional<std::size_t> origin_node_;
    double origin_offset_ = 0.0;
    double snap_radius_ = 0.0;
    std::vector<double> dist_;
};

/// Undirected corridor graph. Immutable after construction so lookups are
/// safe to share between threads.
class WalkGraph {
public:
    WalkGraph() = default;
    WalkGraph(std::vector<WalkNode> nodes, std::vector<WalkEdge> edges);

    const std::vector<WalkNode>& nodes() const { return nodes_; }
    const std::vector<WalkEdge>& edges() const { return edges_; }
    bool empty() const { return nodes_.empty(); }

    /// Nearest node on `floor` no farther than `radius`.
    std::optional<std::size_t> snap(const Point2& p, int floor, double radius) const;

    /// Dijkstra from `source`; unreachable nodes get +infinity.
    std::vector<double> shortest_distances(std::size_t source) const;

    WalkField field_from(const Point2& origin, int floor, double snap_radius) const;

    double walk_distance(const Point2& a, const Point2& b, int floor, double snap_radius) const
    {
        return field_from(a, floor, snap_radius).to(b, floor);
    }

    /// True when every floor's nodes form one component using same-floor edges.
    bool connected_per_floor() const;

private:
    std::vector<WalkNode> nodes_;
    std::vector<WalkEdge> edges_;
    std::vector<std::vector<std::pair<std::size_t, double>>> adjacency_;
    std::map<int, PointRTree<double>> by_floor_;
};

struct Floorplan {
    std::string mall;
    std::vector<Polygon> polygons;
    WalkGraph walk_graph;
    std::map<std::string, VenueId> labels;        // polygon id -> venue id
    std::map<std::string, VenueId> ground_truth;  // optional, for evaluation

    const Polygon* polygon(const std::string& id) const;

    /// Throws when polygon ids repeat, polygons are degenerate or not simple,
    /// edges are invalid, or a floor's walk graph is disconnected.
    void validate() const;
};

/// Polygon containing `p` on `floor`, else the one with the nearest boundary.
/// Ties go to the earlier polygon. Throws on an empty floorplan.
const Polygon& locate_polygon(const Floorplan& plan, const Point2& p, int floor);

inline constexpr int kFloorplanSchemaVersion = 1;

std::string floorplan_document(const Floorplan& plan);
Floorplan parse_floorplan(const std::string& text, const std::string& source);
void save_floorplan(const Floorplan& plan, const std::filesystem::path& path);
Floorplan load_floorplan(const std::filesystem::path& path);

} // namespace venuesense
