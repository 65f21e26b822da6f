#include "venuesense/integrity.hpp"
#include "venuesense/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace venuesense {

namespace {

constexpr double kTie = 1e-9;

} // namespace

double rss_distance(const CheckInBind& a, const CheckInBind& b, double missing_dbm)
{
    auto ia = a.rss.begin();
    auto ib = b.rss.begin();
    double sum = 0.0;
    while (ia != a.rss.end() || ib != b.rss.end()) {
        double x = missing_dbm;
        double y = missing_dbm;
        if (ib == b.rss.end() || (ia != a.rss.end() && ia->first < ib->first)) {
            x = (ia++)->second;
        } else if (ia == a.rss.end() || ib->first < ia->first) {
            y = (ib++)->second;
        } else {
            x = (ia++)->second;
            y = (ib++)->second;
        }
        sum += (x - y) * (x - y);
    }
    return std::sqrt(sum);
}

Partition cluster_checkins(std::span<const CheckInBind> binds, double cutoff, ClusterMetric metric,
                           double missing_dbm)
{
    if (binds.empty()) {
        throw Error("cannot cluster an empty bind set");
    }
    const std::size_t n = binds.size();
    const bool similarity = metric == ClusterMetric::WifiSimilarity;

    // Linkage matrix between live clusters, kept current with the
    // Lance-Williams update for average linkage.
    std::vector<std::vector<double>> link(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = similarity ? wifi_similarity(binds[i].wifi, binds[j].wifi).value
                                        : rss_distance(binds[i], binds[j], missing_dbm);
            link[i][j] = link[j][i] = v;
        }
    }
    Partition clusters(n);
    for (std::size_t i = 0; i < n; ++i) {
        clusters[i] = {i};
    }
    std::vector<std::size_t> slots(n);  // live cluster -> matrix row
    for (std::size_t i = 0; i < n; ++i) {
        slots[i] = i;
    }

    while (clusters.size() > 1) {
        std::size_t best_i = 0;
        std::size_t best_j = 1;
        double best = link[slots[0]][slots[1]];
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double v = link[slots[i]][slots[j]];
                if (similarity ? v > best + kTie : v < best - kTie) {
                    best = v;
                    best_i = i;
                    best_j = j;
                }
            }
        }
        if (similarity ? best < cutoff : best > cutoff) {
            break;
        }
        const double ni = static_cast<double>(clusters[best_i].size());
        const double nj = static_cast<double>(clusters[best_j].size());
        const std::size_t ri = slots[best_i];
        const std::size_t rj = slots[best_j];
        for (std::size_t k = 0; k < clusters.size(); ++k) {
            if (k == best_i || k == best_j) {
                continue;
            }
            const std::size_t rk = slots[k];
            link[ri][rk] = link[rk][ri] = (ni * link[ri][rk] + nj * link[rj][rk]) / (ni + nj);
        }
        auto& into = clusters[best_i];
        into.insert(into.end(), clusters[best_j].begin(), clusters[best_j].end());
        std::sort(into.begin(), into.end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_j));
        slots.erase(slots.begin() + static_cast<std::ptrdiff_t>(best_j));
    }
    return clusters;
}

WifiFingerprint cluster_centroid(std::span<const CheckInBind> binds, std::span<const std::size_t> members)
{
    WifiFingerprint out;
    for (const auto m : members) {
        for (const auto& [mac, f] : binds[m].wifi.fractions) {
            out.fractions[mac] += f;
        }
        out.scan_count += binds[m].wifi.scan_count;
    }
    for (auto& [mac, f] : out.fractions) {
        f /= static_cast<double>(members.size());
    }
    return out;
}

std::size_t select_correct_cluster(const Partition& clusters, std::span<const CheckInBind> binds,
                                   std::span<const WifiFingerprint> neighbor_centroids)
{
    if (clusters.empty()) {
        throw Error("no clusters to choose from");
    }
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        double cost = 0.0;
        if (!neighbor_centroids.empty()) {
            const WifiFingerprint centroid = cluster_centroid(binds, clusters[c]);
            for (const auto& neighbor : neighbor_centroids) {
                cost += 2.0 - wifi_similarity(centroid, neighbor).value;
            }
        }
        const bool cheaper = cost < best_cost - kTie;
        const bool tied_but_larger = std::abs(cost - best_cost) <= kTie && clusters[c].size() > clusters[best].size();
        if (cheaper || tied_but_larger) {
            best = c;
            best_cost = cost;
        }
    }
    return best;
}

std::vector<VenueId> neighbor_venues(const VenueStore& store, const VenueId& venue, double radius,
                                     const Floorplan* plan, double snap_radius)
{
    const VenueRecord& self = store.get(venue);
    std::vector<VenueId> out;
    std::optional<WalkField> field;
    if (plan != nullptr && !plan->walk_graph.empty()) {
        field = plan->walk_graph.field_from(self.location(), self.floor, snap_radius);
    }
    // Walking distance never undercuts the straight line, so the radius query
    // is a superset.
    for (const auto& id : store.within_radius(self.location(), radius)) {
        if (id == venue) {
            continue;
        }
        const VenueRecord& other = store.get(id);
        if (other.mall != self.mall) {
            continue;
        }
        if (field && field->to(other.location(), other.floor) > radius) {
            continue;
        }
        out.push_back(id);
    }
    return out;
}

WifiFingerprint reference_centroid(const VenueRecord& venue)
{
    std::vector<std::size_t> correct;
    for (std::size_t i = 0; i < venue.checkin_log.size(); ++i) {
        if (venue.checkin_log[i].label == BindLabel::Correct) {
            correct.push_back(i);
        }
    }
    if (correct.empty()) {
        return venue.fingerprint.wifi;
    }
    return cluster_centroid(venue.checkin_log, correct);
}

namespace {

void label_clusters(ClusterResult& result, std::vector<CheckInBind>& binds)
{
    for (std::size_t c = 0; c < result.clusters.size(); ++c) {
        for (const auto member : result.clusters[c]) {
            result.labels[binds[member].checkin_id] = c == result.correct_cluster ? BindLabel::Correct : BindLabel::Fake;
        }
    }
    result.binds = std::move(binds);
}

} // namespace

ClusterResult classify_checkins(const VenueStore& store, const VenueId& venue, const Config& cfg,
                                const Floorplan* plan)
{
    ClusterResult result;
    const VenueRecord& record = store.get(venue);
    std::vector<CheckInBind> binds = record.checkin_log;
    std::stable_sort(binds.begin(), binds.end(),
                     [](const CheckInBind& a, const CheckInBind& b) { return a.timestamp < b.timestamp; });
    if (binds.size() > cfg.bind_window) {
        binds.erase(binds.begin(), binds.end() - static_cast<std::ptrdiff_t>(cfg.bind_window));
    }
    if (binds.empty()) {
        return result;
    }
    result.clusters = cluster_checkins(binds, cfg.cutoff(), cfg.cluster_metric, cfg.missing_rss_dbm);

    const auto by_size = [](const auto& a, const auto& b) { return a.size() < b.size(); };
    const auto largest = std::max_element(result.clusters.begin(), result.clusters.end(), by_size);
    const auto largest_count = std::count_if(result.clusters.begin(), result.clusters.end(),
                                         [&](const auto& c) { return c.size() == largest->size(); });
    if (binds.size() >= cfg.majority_min_binds && largest_count == 1) {
        result.correct_cluster = static_cast<std::size_t>(largest - result.clusters.begin());
        label_clusters(result, binds);
        return result;
    }

    std::vector<WifiFingerprint> neighbors;
    for (const auto& id : neighbor_venues(store, venue, cfg.neighbor_radius_m, plan, cfg.snap_radius_m)) {
        WifiFingerprint centroid = reference_centroid(store.get(id));
        if (!centroid.empty()) {
            neighbors.push_back(std::move(centroid));
        }
    }
    result.correct_cluster = select_correct_cluster(result.clusters, binds, neighbors);
    label_clusters(result, binds);
    return result;
}

void apply_labels(VenueStore& store, const VenueId& venue, const ClusterResult& result)
{
    for (auto& bind : store.edit(venue).checkin_log) {
        const auto it = result.labels.find(bind.checkin_id);
        if (it != result.labels.end()) {
            bind.label = it->second;
        }
    }
}

void refresh_wifi_fingerprint(VenueRecord& venue)
{
    WifiFingerprint wifi;
    bool any = false;
    for (const auto& bind : venue.checkin_log) {
        if (bind.label == BindLabel::Correct) {
            wifi = merge_wifi(wifi, bind.wifi);
            any = true;
        }
    }
    if (any) {
        venue.fingerprint.wifi = std::move(wifi);
    }
}

} // namespace venuesense
