#include "venuesense/floorplan.hpp"
#include "venuesense/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

namespace venuesense {

namespace {

constexpr double kBoundaryTolerance = 1e-9;

double segment_distance(const Point2& p, const Point2& a, const Point2& b)
{
    const Point2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (p - (a + t * ab)).norm();
}

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool on_segment(const Point2& p, const Point2& a, const Point2& b)
{
    return p.x() >= std::min(a.x(), b.x()) - kBoundaryTolerance && p.x() <= std::max(a.x(), b.x()) + kBoundaryTolerance &&
           p.y() >= std::min(a.y(), b.y()) - kBoundaryTolerance && p.y() <= std::max(a.y(), b.y()) + kBoundaryTolerance;
}

int orientation(const Point2& a, const Point2& b, const Point2& c)
{
    const double v = cross(b - a, c - a);
    if (std::abs(v) <= kBoundaryTolerance) {
        return 0;
    }
    return v > 0 ? 1 : -1;
}

bool segments_touch(const Point2& p1, const Point2& p2, const Point2& q1, const Point2& q2)
{
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0) {
        return true;
    }
    return (o1 == 0 && on_segment(q1, p1, p2)) || (o2 == 0 && on_segment(q2, p1, p2)) ||
           (o3 == 0 && on_segment(p1, q1, q2)) || (o4 == 0 && on_segment(p2, q1, q2));
}

} // namespace

bool point_in_polygon(const Point2& p, std::span<const Point2> v)
{
    const std::size_t n = v.size();
    if (n < 3) {
        return false;
    }
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if (segment_distance(p, v[j], v[i]) <= kBoundaryTolerance) {
            return true;
        }
        // Even-odd ray cast toward +x.
        if ((v[i].y() > p.y()) != (v[j].y() > p.y())) {
            const double x = v[j].x() + (p.y() - v[j].y()) * (v[i].x() - v[j].x()) / (v[i].y() - v[j].y());
            if (p.x() < x) {
                inside = !inside;
            }
        }
    }
    return inside;
}

double boundary_distance(const Point2& p, std::span<const Point2> v)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        best = std::min(best, segment_distance(p, v[j], v[i]));
    }
    return best;
}

bool is_simple_polygon(std::span<const Point2> v)
{
    const std::size_t n = v.size();
    if (n < 3) {
        return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                continue;
            }
            if (segments_touch(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) {
                return false;
            }
        }
    }
    // Zero-area outlines pass the edge test but enclose nothing.
    double area2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        area2 += cross(v[i], v[(i + 1) % n]);
    }
    return std::abs(area2) > kBoundaryTolerance;
}

WalkGraph::WalkGraph(std::vector<WalkNode> nodes, std::vector<WalkEdge> edges)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), adjacency_(nodes_.size())
{
    for (const auto& e : edges_) {
        if (e.a >= nodes_.size() || e.b >= nodes_.size()) {
            throw Error("walk graph edge references a missing node");
        }
        if (!(e.length >= 0.0) || !std::isfinite(e.length)) {
            throw Error("walk graph edge length must be finite and non-negative");
        }
        adjacency_[e.a].emplace_back(e.b, e.length);
        adjacency_[e.b].emplace_back(e.a, e.length);
    }
    std::map<int, std::vector<PointRTree<double>::Item>> items;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        items[nodes_[i].floor].emplace_back(nodes_[i].xy, i);
    }
    for (auto& [floor, list] : items) {
        by_floor_.emplace(floor, PointRTree<double>(std::move(list)));
    }
}

std::optional<std::size_t> WalkGraph::snap(const Point2& p, int floor, double radius) const
{
    const auto it = by_floor_.find(floor);
    if (it == by_floor_.end()) {
        return std::nullopt;
    }
    const auto hit = it->second.nearest(p, 1);
    if (hit.empty() || (nodes_[hit.front()].xy - p).norm() > radius) {
        return std::nullopt;
    }
    return hit.front();
}

std::vector<double> WalkGraph::shortest_distances(std::size_t source) const
{
    std::vector<double> dist(nodes_.size(), std::numeric_limits<double>::infinity());
    using Entry = std::pair<double, std::size_t>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    dist.at(source) = 0.0;
    queue.emplace(0.0, source);
    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (d > dist[u]) {
            continue;
        }
        for (const auto& [v, w] : adjacency_[u]) {
            if (d + w < dist[v]) {
                dist[v] = d + w;
                queue.emplace(dist[v], v);
            }
        }
    }
    return dist;
}

WalkField WalkGraph::field_from(const Point2& origin, int floor, double snap_radius) const
{
    WalkField field;
    field.graph_ = this;
    field.origin_ = origin;
    field.snap_radius_ = snap_radius;
    field.origin_node_ = snap(origin, floor, snap_radius);
    if (field.origin_node_) {
        field.origin_offset_ = (nodes_[*field.origin_node_].xy - origin).norm();
        field.dist_ = shortest_distances(*field.origin_node_);
    }
    return field;
}

double WalkField::to(const Point2& q, int floor) const
{
    if (origin_node_) {
        if (const auto node = graph_->snap(q, floor, snap_radius_)) {
            const double path = dist_[*node];
            if (std::isfinite(path)) {
                return origin_offset_ + path + (graph_->nodes()[*node].xy - q).norm();
            }
        }
    }
    return (q - origin_).norm();
}

bool WalkGraph::connected_per_floor() const
{
    // Union-find over same-floor edges.
    std::vector<std::size_t> parent(nodes_.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    for (const auto& e : edges_) {
        if (nodes_[e.a].floor == nodes_[e.b].floor) {
            parent[find(e.a)] = find(e.b);
        }
    }
    std::map<int, std::size_t> root_of_floor;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto [it, inserted] = root_of_floor.emplace(nodes_[i].floor, find(i));
        if (!inserted && it->second != find(i)) {
            return false;
        }
    }
    return true;
}

const Polygon* Floorplan::polygon(const std::string& id) const
{
    for (const auto& p : polygons) {
        if (p.id == id) {
            return &p;
        }
    }
    return nullptr;
}

void Floorplan::validate() const
{
    std::set<std::string> ids;
    for (const auto& p : polygons) {
        if (!ids.insert(p.id).second) {
            throw Error("floorplan " + mall + ": duplicate polygon id " + p.id);
        }
        if (!is_simple_polygon(p.vertices)) {
            throw Error("floorplan " + mall + ": polygon " + p.id + " is not simple");
        }
    }
    for (const auto& [polygon_id, venue] : labels) {
        if (ids.count(polygon_id) == 0) {
            throw Error("floorplan " + mall + ": label on unknown polygon " + polygon_id);
        }
    }
    if (!walk_graph.connected_per_floor()) {
        throw Error("floorplan " + mall + ": walk graph is disconnected");
    }
}

const Polygon& locate_polygon(const Floorplan& plan, const Point2& p, int floor)
{
    const Polygon* best = nullptr;
    double best_distance = std::numeric_limits<double>::infinity();
    for (const auto& poly : plan.polygons) {
        if (poly.floor != floor) {
            continue;
        }
        if (point_in_polygon(p, poly.vertices)) {
            return poly;
        }
        const double d = boundary_distance(p, poly.vertices);
        if (d < best_distance) {
            best_distance = d;
            best = &poly;
        }
    }
    if (best == nullptr) {
        throw Error("floorplan " + plan.mall + " has no polygons on floor " + std::to_string(floor));
    }
    return *best;
}

std::string floorplan_document(const Floorplan& plan)
{
    Json polygons = Json::array();
    for (const auto& p : plan.polygons) {
        Json vertices = Json::array();
        for (const auto& v : p.vertices) {
            vertices.push_back(json_io::encode(v));
        }
        polygons.push_back(Json{{"id", p.id}, {"floor", p.floor}, {"vertices", vertices}});
    }
    Json nodes = Json::array();
    for (const auto& n : plan.walk_graph.nodes()) {
        nodes.push_back(Json{{"xy", json_io::encode(n.xy)}, {"floor", n.floor}});
    }
    Json edges = Json::array();
    for (const auto& e : plan.walk_graph.edges()) {
        edges.push_back(Json{{"a", e.a}, {"b", e.b}, {"length", e.length}});
    }
    Json doc{{"schema_version", kFloorplanSchemaVersion},
             {"mall", plan.mall},
             {"polygons", polygons},
             {"walk_graph", Json{{"nodes", nodes}, {"edges", edges}}},
             {"labels", plan.labels},
             {"ground_truth", plan.ground_truth}};
    return doc.dump(1) + "\n";
}

Floorplan parse_floorplan(const std::string& text, const std::string& source)
{
    using json_io::field;
    using json_io::value;
    const Json doc = json_io::parse_document(text, source);
    const int version = value<int>(doc, "schema_version", source);
    if (version != kFloorplanSchemaVersion) {
        throw VersionError(source + ": floorplan schema_version " + std::to_string(version) + " is not supported");
    }
    Floorplan plan;
    plan.mall = value<std::string>(doc, "mall", source);
    const Json& polygons = field(doc, "polygons", source);
    if (!polygons.is_array()) {
        throw ParseError(source + ".polygons: expected an array");
    }
    for (std::size_t i = 0; i < polygons.size(); ++i) {
        const std::string path = source + ":polygons[" + std::to_string(i) + "]";
        Polygon poly;
        poly.id = value<std::string>(polygons[i], "id", path);
        poly.floor = value<int>(polygons[i], "floor", path);
        const Json& vertices = field(polygons[i], "vertices", path);
        if (!vertices.is_array()) {
            throw ParseError(path + ".vertices: expected an array");
        }
        for (std::size_t k = 0; k < vertices.size(); ++k) {
            poly.vertices.push_back(json_io::decode_point(vertices[k], path + ".vertices[" + std::to_string(k) + "]"));
        }
        plan.polygons.push_back(std::move(poly));
    }
    const Json& graph = field(doc, "walk_graph", source);
    const std::string gpath = source + ":walk_graph";
    const Json& nodes = field(graph, "nodes", gpath);
    const Json& edges = field(graph, "edges", gpath);
    if (!nodes.is_array() || !edges.is_array()) {
        throw ParseError(gpath + ": nodes and edges must be arrays");
    }
    std::vector<WalkNode> walk_nodes;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::string path = gpath + ".nodes[" + std::to_string(i) + "]";
        walk_nodes.push_back({json_io::decode_point(field(nodes[i], "xy", path), path + ".xy"),
                              value<int>(nodes[i], "floor", path)});
    }
    std::vector<WalkEdge> walk_edges;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const std::string path = gpath + ".edges[" + std::to_string(i) + "]";
        walk_edges.push_back({value<std::size_t>(edges[i], "a", path), value<std::size_t>(edges[i], "b", path),
                              value<double>(edges[i], "length", path)});
    }
    plan.labels = value<std::map<std::string, VenueId>>(doc, "labels", source);
    plan.ground_truth = value<std::map<std::string, VenueId>>(doc, "ground_truth", source);
    try {
        plan.walk_graph = WalkGraph(std::move(walk_nodes), std::move(walk_edges));
        plan.validate();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(source + ": " + e.what());
    }
    return plan;
}

void save_floorplan(const Floorplan& plan, const std::filesystem::path& path)
{
    json_io::write_file(path, floorplan_document(plan));
}

Floorplan load_floorplan(const std::filesystem::path& path)
{
    return parse_floorplan(json_io::read_file(path), path.string());
}

} // namespace venuesense
