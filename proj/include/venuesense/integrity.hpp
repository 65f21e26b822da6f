#pragma once

#include "venuesense/floorplan.hpp"
#include "venuesense/store.hpp"

#include <map>
#include <span>
#include <vector>

namespace venuesense {

/// Clusters as lists of indices into the bind list. Members are ascending and
/// clusters are ordered by their first member.
using Partition = std::vector<std::vector<std::size_t>>;

/// Euclidean distance between mean-RSS vectors over the union of MACs, with
/// unheard APs at `missing_dbm`.
double rss_distance(const CheckInBind& a, const CheckInBind& b, double missing_dbm = -100.0);

/// Average-linkage agglomerative clustering. Similarity mode keeps merging
/// while the best pair's similarity is >= cutoff; dB mode while the best
/// pair's distance is <= cutoff. Near-ties go to the lowest index pair.
Partition cluster_checkins(std::span<const CheckInBind> binds, double cutoff, ClusterMetric metric,
                           double missing_dbm = -100.0);

/// Per-MAC mean of the members' WiFi fractions.
WifiFingerprint cluster_centroid(std::span<const CheckInBind> binds, std::span<const std::size_t> members);

/// Cluster minimizing the summed (2 - WiFi similarity) distance to the neighbor
/// centroids. Without neighbors the largest cluster wins; remaining ties go
/// to the larger, then earlier, cluster.
std::size_t select_correct_cluster(const Partition& clusters, std::span<const CheckInBind> binds,
                                   std::span<const WifiFingerprint> neighbor_centroids);

struct ClusterResult {
    std::vector<CheckInBind> binds;  // the classified window
    Partition clusters;
    std::size_t correct_cluster = 0;
    std::map<std::string, BindLabel> labels;  // checkin id -> label
};

/// Neighbors of `venue`: other venues of its mall within `radius` walking
/// distance (Euclidean without a floorplan).
std::vector<VenueId> neighbor_venues(const VenueStore& store, const VenueId& venue, double radius,
                                     const Floorplan* plan = nullptr, double snap_radius = 5.0);

/// Reference centroid of a neighbor: the centroid of its binds labeled
/// correct, or its stored WiFi fingerprint before any classification.
WifiFingerprint reference_centroid(const VenueRecord& venue);

/// Clusters the venue's most recent `cfg.bind_window` binds and labels those
/// outside the selected cluster fake. Once the window holds
/// `cfg.majority_min_binds` binds, a unique largest cluster wins outright;
/// otherwise the neighbors decide (select_correct_cluster).
ClusterResult classify_checkins(const VenueStore& store, const VenueId& venue, const Config& cfg,
                                const Floorplan* plan = nullptr);

/// Writes the labels of `result` back into the venue's check-in log.
void apply_labels(VenueStore& store, const VenueId& venue, const ClusterResult& result);

/// Rebuilds the venue's WiFi fingerprint from the binds currently labeled
/// correct, so a bind relabeled fake stops shaping it. Leaves the fingerprint
/// alone when no bind is labeled correct.
void refresh_wifi_fingerprint(VenueRecord& venue);

} // namespace venuesense
