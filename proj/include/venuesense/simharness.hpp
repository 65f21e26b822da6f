#pragma once

#include "venuesense/coverage.hpp"
#include "venuesense/floorplan.hpp"
#include "venuesense/integrity.hpp"
#include "venuesense/pipeline.hpp"
#include "venuesense/random.hpp"
#include "venuesense/store.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace venuesense::sim {

struct NoiseModel {
    double ap_dropout = 0.05;         // chance an audible AP is missing from a scan
    double rss_jitter_db = 2.0;       // per-reading standard deviation
    double location_error_m = 2.5;    // per-axis standard deviation of the location estimate
    double fake_checkin_prob = 0.0;   // p_e
    double corridor_fake_fraction = 0.5;  // fakes made from the corridor outside the claimed venue
    int ssid_corruption_edits = 1;    // random edits applied to brand/venue SSIDs

    void validate() const;
};

/// Radio model: RSS = tx_power - 10 n log10(d) - wall_loss (outside the AP's
/// venue; storefront_loss from the corridor in front of it). A venue hears its
/// own APs and every AP whose RSS at the venue center reaches the sensitivity
/// floor.
struct RadioModel {
    double tx_power_dbm = -30.0;
    double path_loss_exponent = 3.0;
    double wall_loss_db = 15.0;
    double storefront_loss_db = 6.0;  // glass front between a venue and its corridor
    double sensitivity_dbm = -75.0;
    int aps_per_venue = 3;
    double ap_height_m = 2.5;  // ceiling mount above the phone
};

struct SimConfig {
    std::uint64_t seed = 1;
    int malls = 1;
    int venues_per_mall = 100;
    int grid_columns = 10;  // venues per row along a corridor
    int max_corridors = 30;
    double venue_width_m = 10.0;
    double venue_depth_m = 8.0;
    double corridor_width_m = 4.0;
    /// Category mix (food, clothing, arts/entertainment, others).
    std::array<double, kCategories> category_mix{101.0 / 711.0, 374.0 / 711.0, 23.0 / 711.0, 213.0 / 711.0};
    double brand_fraction = 0.823;
    int brand_pool = 40;
    int checkins_per_venue = 5;  // training visits behind each catalog fingerprint
    double coverage_gap = 0.39;
    double duplicate_fraction = 0.05;  // catalog entries repeated under a near-identical name
    double claimed_location_error_m = 4.0;
    double checkin_spread_m = 1.5;  // where inside a venue people check in, around its center
    int users = 60;
    int scans_per_checkin = 3;
    int trace_checkins = 500;
    double sound_prob = 0.8;
    double color_prob = 0.8;
    double magnetic_prob = 0.8;
    double image_prob = 0.6;
    double ocr_prob = 0.6;
    RadioModel radio;
    NoiseModel noise;
    Config pipeline;

    void validate() const;
};

void to_json(nlohmann::json& j, const SimConfig& cfg);
void from_json(const nlohmann::json& j, SimConfig& cfg);
SimConfig load_sim_config(const std::filesystem::path& path);

struct AccessPoint {
    MacAddress mac;
    std::string ssid;
    Point2 xy = Point2::Zero();
};

/// Generative profile of one venue.
struct VenueTruth {
    VenueId id;
    std::string name;
    std::optional<std::string> brand;
    VenueCategory category;
    std::string mall;
    std::string polygon;
    Point2 center = Point2::Zero();
    Point2 lo = Point2::Zero();  // polygon bounds
    Point2 hi = Point2::Zero();
    Point2 corridor_lo = Point2::Zero();  // stretch of corridor in front of the venue
    Point2 corridor_hi = Point2::Zero();
    bool covered = true;  // present in the external catalog
    std::vector<AccessPoint> aps;
    std::array<double, kVisitPeriods> visit_dist{};
    std::array<double, kActivities> activity_dist{};
    std::vector<double> duration_dist;
    double sound_level = 0.3;
    double sound_spread = 0.1;
    std::vector<Hsl> palette;
    Eigen::Vector3d magnetic_amplitude = Eigen::Vector3d::Ones();
    double magnetic_frequency = 4.0;
    std::vector<std::string> visterms;
    std::vector<std::string> words;  // sign and menu vocabulary
};

struct World {
    SimConfig cfg;
    std::vector<VenueTruth> venues;
    std::map<std::string, Floorplan> floorplans;  // by mall
    std::vector<std::string> brands;
    std::map<VenueId, std::size_t> by_id;

    const VenueTruth& venue(const VenueId& id) const;
    std::size_t index_of(const VenueId& id) const;
};

/// Lays out the malls and draws every venue's profile. Throws when the venues
/// do not fit the grid.
World generate_world(const SimConfig& cfg);

struct TraceEntry {
    CheckInObservation obs;
    VenueId true_venue;
    VenueId claimed_venue;
    bool fake = false;
};

/// Observation of a user standing at `position` inside venue `venue_index`
/// (or, with `inside` false, just outside it) on simulated day `day`; the
/// time of day and the non-radio modalities follow the venue's profile.
CheckInObservation observe(const World& world, std::size_t venue_index, const Point2& position, const UserId& user,
                           int day, const NoiseModel& noise, Rng& rng, bool inside = true);

/// Point inside the venue at least `margin` meters from its walls: normal
/// around the center with per-axis deviation `spread`, uniform when `spread`
/// is 0.
Point2 random_position(const VenueTruth& venue, double spread, Rng& rng, double margin = 0.5);

/// `count` check-ins; venue choice follows user habits. With probability p_e
/// a check-in is fake: made from the corridor outside the claimed venue, or
/// from another venue of the same mall.
std::vector<TraceEntry> simulate_checkins(const World& world, int count, const NoiseModel& noise, std::uint64_t seed);

/// Exactly `per_venue` check-ins claimed at every venue (covered or not).
std::vector<TraceEntry> simulate_claims_per_venue(const World& world, int per_venue, const NoiseModel& noise,
                                                  std::uint64_t seed);

/// External catalog: covered venues with inaccurate locations, duplicates,
/// one coarse food-court entry per mall, and training-built fingerprints.
MockLbsnSource build_catalog(const World& world);

/// Store initialized from the catalog, deduplicated against the brand list.
VenueStore initial_store(const World& world, const MockLbsnSource& catalog);

struct RankerStats {
    std::size_t participated = 0;
    std::size_t top1 = 0;
    std::size_t top5 = 0;

    double top1_recall() const { return participated == 0 ? 0.0 : double(top1) / double(participated); }
    double top5_recall() const { return participated == 0 ? 0.0 : double(top5) / double(participated); }
};

struct ThresholdPoint {
    double threshold = 0.0;
    double tp_rate = 0.0;
    double fp_rate = 0.0;
};

struct DetectionPoint {
    double cutoff = 0.0;
    double detection = 0.0;
    double false_alarm = 0.0;
};

struct LabelingPoint {
    double p_e = 0.0;
    double unfiltered = 0.0;
    double checkinside = 0.0;
    double oracle = 0.0;
};

struct CoveragePoint {
    int max_edit = 0;
    double recall = 0.0;
    double fp_rate = 0.0;
};

struct MetricsReport {
    std::size_t checkins = 0;
    std::size_t ranked = 0;  // check-ins that produced a ranked list
    std::size_t flagged_new = 0;
    std::size_t created_venues = 0;
    std::vector<std::size_t> actual_ranks;  // per ranked check-in; ranked list size when absent
    std::vector<double> rank_cdf;           // P(rank < k + 1) for k = 0..19
    double top1_recall = 0.0;
    double top5_recall = 0.0;
    std::vector<double> distance_errors;  // sorted, meters
    std::map<Ranker, RankerStats> rankers;
    RankerWeights final_weights;
    std::vector<ThresholdPoint> new_venue;
    std::vector<DetectionPoint> detection;
    std::vector<CoveragePoint> coverage;
    LabelingPoint labeling;
};

struct ReplayOptions {
    bool feedback = true;
    std::vector<double> thresholds{0.0, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0};
    std::vector<double> cutoffs_db{12.0, 13.0, 14.0, 15.0, 16.0};
    std::vector<int> max_edits{0, 1, 2, 3, 4};
};

/// Runs the full pipeline over the trace, mutating `store` and `floorplans`
/// the way a live deployment would, and measures every metric family.
MetricsReport replay(const World& world, const std::vector<TraceEntry>& trace, VenueStore& store,
                     std::map<std::string, Floorplan>& floorplans, const ReplayOptions& options = {});

/// Fake-detection and false-alarm probabilities at each dB cutoff, over the
/// binds every venue received in `trace` on top of its catalog training binds.
std::vector<DetectionPoint> detection_sweep(const World& world, const VenueStore& store,
                                            const std::vector<TraceEntry>& trace, std::span<const double> cutoffs_db);

/// Labeling accuracy with unfiltered, integrity-filtered and ground-truth
/// filtered bind locations.
LabelingPoint labeling_trial(const World& world, const VenueStore& store, const std::vector<TraceEntry>& trace);

/// SSID naming of the uncovered venues at each edit threshold.
std::vector<CoveragePoint> coverage_sweep(const World& world, const VenueStore& store,
                                          const std::vector<TraceEntry>& trace, std::span<const int> max_edits);

/// Metric families as separate documents plus a flat summary table.
std::map<std::string, std::string> metrics_documents(const MetricsReport& report, bool csv);

/// Distance error quantile `q` in [0, 1] (nearest rank); 0 when empty.
double quantile(const std::vector<double>& sorted, double q);

std::string trace_line(const TraceEntry& entry);
TraceEntry parse_trace_line(const std::string& line, const std::string& source);
void save_trace(const std::vector<TraceEntry>& trace, const std::filesystem::path& path);
std::vector<TraceEntry> load_trace(const std::filesystem::path& path);

/// Ground-truth table (venue -> name, brand, polygon, coverage) for inspection.
std::string ground_truth_document(const World& world);

} // namespace venuesense::sim
