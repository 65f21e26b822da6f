#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <tuple>
#include <utility>
#include <vector>

namespace venuesense {

/// Static R-tree over 2-D points, bulk loaded with Sort-Tile-Recursive packing.
/// Each point carries a key; nearest-neighbour results come back ordered by
/// (squared distance, key), the same order a sorted linear scan produces.
template <typename Scalar>
class PointRTree {
public:
    using Point = Eigen::Matrix<Scalar, 2, 1>;
    using Item = std::pair<Point, std::size_t>;

    PointRTree() = default;

    explicit PointRTree(std::vector<Item> items, std::size_t fanout = 16)
        : items_(std::move(items)), fanout_(std::max<std::size_t>(fanout, 2))
    {
        build();
    }

    std::size_t size() const { return items_.size(); }
    bool empty() const { return items_.empty(); }

    /// Keys of the `n` points closest to `query`.
    std::vector<std::size_t> nearest(const Point& query, std::size_t n) const
    {
        std::vector<std::size_t> out;
        if (items_.empty() || n == 0) {
            return out;
        }
        // (distance, is_item, key-or-index). Nodes precede items at equal
        // distance so an item is only emitted once nothing closer can remain.
        using Entry = std::tuple<Scalar, int, std::size_t>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
        queue.emplace(min_dist2(nodes_[root_], query), 0, root_);
        while (!queue.empty() && out.size() < n) {
            const auto [d, is_item, ref] = queue.top();
            queue.pop();
            if (is_item != 0) {
                out.push_back(ref);
                continue;
            }
            const Node& node = nodes_[ref];
            for (std::size_t c = node.first; c < node.first + node.count; ++c) {
                if (node.leaf) {
                    const auto& [p, key] = items_[c];
                    queue.emplace((p - query).squaredNorm(), 1, key);
                } else {
                    queue.emplace(min_dist2(nodes_[c], query), 0, c);
                }
            }
        }
        return out;
    }

    /// Keys of all points within `radius` of `query`, ordered like `nearest`.
    std::vector<std::size_t> within(const Point& query, Scalar radius) const
    {
        std::vector<std::pair<Scalar, std::size_t>> hits;
        if (items_.empty()) {
            return {};
        }
        const Scalar r2 = radius * radius;
        std::vector<std::size_t> stack{root_};
        while (!stack.empty()) {
            const Node& node = nodes_[stack.back()];
            stack.pop_back();
            if (min_dist2(node, query) > r2) {
                continue;
            }
            for (std::size_t c = node.first; c < node.first + node.count; ++c) {
                if (node.leaf) {
                    const Scalar d = (items_[c].first - query).squaredNorm();
                    if (d <= r2) {
                        hits.emplace_back(d, items_[c].second);
                    }
                } else {
                    stack.push_back(c);
                }
            }
        }
        std::sort(hits.begin(), hits.end());
        std::vector<std::size_t> out;
        out.reserve(hits.size());
        for (const auto& h : hits) {
            out.push_back(h.second);
        }
        return out;
    }

private:
    struct Node {
        Point lo;
        Point hi;
        std::size_t first = 0;  // into items_ for leaves, nodes_ otherwise
        std::size_t count = 0;
        bool leaf = true;
    };

    static Scalar min_dist2(const Node& node, const Point& q)
    {
        const Point clamped = q.cwiseMax(node.lo).cwiseMin(node.hi);
        return (clamped - q).squaredNorm();
    }

    // Orders [begin, end) into vertical slices, each sorted by y.
    template <typename It, typename CenterFn>
    void tile(It begin, It end, CenterFn center)
    {
        const auto n = static_cast<std::size_t>(end - begin);
        const auto leaves = (n + fanout_ - 1) / fanout_;
        const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(leaves))));
        const auto per_slice = slices * fanout_;
        std::sort(begin, end, [&](const auto& a, const auto& b) { return center(a)[0] < center(b)[0]; });
        for (std::size_t s = 0; s < n; s += per_slice) {
            auto slice_end = begin + static_cast<std::ptrdiff_t>(std::min(n, s + per_slice));
            std::sort(begin + static_cast<std::ptrdiff_t>(s), slice_end,
                      [&](const auto& a, const auto& b) { return center(a)[1] < center(b)[1]; });
        }
    }

    void build()
    {
        nodes_.clear();
        if (items_.empty()) {
            return;
        }
        tile(items_.begin(), items_.end(), [](const Item& it) -> const Point& { return it.first; });

        std::vector<Node> level;
        for (std::size_t i = 0; i < items_.size(); i += fanout_) {
            Node node;
            node.first = i;
            node.count = std::min(fanout_, items_.size() - i);
            node.lo = node.hi = items_[i].first;
            for (std::size_t c = i; c < i + node.count; ++c) {
                node.lo = node.lo.cwiseMin(items_[c].first);
                node.hi = node.hi.cwiseMax(items_[c].first);
            }
            level.push_back(node);
        }

        while (level.size() > 1) {
            tile(level.begin(), level.end(), [](const Node& nd) -> Point { return (nd.lo + nd.hi) / Scalar(2); });
            const std::size_t base = nodes_.size();
            nodes_.insert(nodes_.end(), level.begin(), level.end());
            std::vector<Node> parents;
            for (std::size_t i = 0; i < level.size(); i += fanout_) {
                Node parent;
                parent.leaf = false;
                parent.first = base + i;
                parent.count = std::min(fanout_, level.size() - i);
                parent.lo = level[i].lo;
                parent.hi = level[i].hi;
                for (std::size_t c = i; c < i + parent.count; ++c) {
                    parent.lo = parent.lo.cwiseMin(level[c].lo);
                    parent.hi = parent.hi.cwiseMax(level[c].hi);
                }
                parents.push_back(parent);
            }
            level = std::move(parents);
        }
        root_ = nodes_.size();
        nodes_.push_back(level.front());
    }

    std::vector<Item> items_;
    std::vector<Node> nodes_;
    std::size_t fanout_ = 16;
    std::size_t root_ = 0;
};

} // namespace venuesense
