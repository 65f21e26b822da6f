#pragma once

#include "venuesense/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace venuesense {

enum class Ranker {
    Wifi,
    Location,
    Sound,
    Image,
    Mobility,
    Color,
    Magnetic,
    Ssid,
    Ocr,
    Familiarity,
};

inline constexpr std::array<Ranker, 10> kAllRankers{
    Ranker::Wifi,  Ranker::Location, Ranker::Sound, Ranker::Image, Ranker::Mobility,
    Ranker::Color, Ranker::Magnetic, Ranker::Ssid,  Ranker::Ocr,   Ranker::Familiarity,
};

std::string_view to_string(Ranker ranker);
Ranker ranker_from_string(std::string_view name);

enum class Aggregator { Borda, CombSum };
enum class ClusterMetric { WifiSimilarity, RssEuclideanDb };
enum class MagneticCompare { Summary, Spectrum };

/// Every tunable threshold of the inference engine with its default.
struct Config {
    // Fingerprint construction.
    std::array<int, 6> period_start_hours{4, 8, 12, 16, 20, 22};
    int max_duration_bucket = 8;
    int color_clusters = 4;
    std::uint64_t kmeans_seed = 1;
    int kmeans_max_iterations = 50;
    std::size_t pixel_reservoir = 10000;
    std::vector<std::string> ssid_stoplist{"linksys", "vodafone", "tp-link", "netgear", "d-link",
                                           "huawei",  "zte",      "belkin",  "cisco",   "orange"};
    std::vector<std::string> stop_words{"a",    "an",   "and", "are",  "at",   "be",   "but",
                                        "by",   "for",  "from", "in",  "is",   "it",   "of",
                                        "on",   "or",   "that", "the", "this", "to",   "was",
                                        "with", "we",   "you",  "our", "my",   "very", "so"};

    // Similarity kernels.
    double delta_min = 0.01;
    double mobility_epsilon = 0.01;
    double familiarity_beta = 0.5;
    MagneticCompare magnetic_compare = MagneticCompare::Summary;

    // Online inference.
    double stationarity_threshold = 1.0;
    double min_stationary_seconds = 60.0;
    double new_venue_threshold = 1.2;
    std::size_t filter_size = 10;
    double snap_radius_m = 5.0;
    Aggregator aggregator = Aggregator::Borda;
    std::set<Ranker> enabled_rankers{kAllRankers.begin(), kAllRankers.end()};
    double learning_rate = 0.2;
    bool feedback = true;

    // Fake check-in detection.
    ClusterMetric cluster_metric = ClusterMetric::WifiSimilarity;
    double cutoff_similarity = 1.2;
    double cutoff_db = 14.0;
    double missing_rss_dbm = -100.0;
    std::size_t bind_window = 50;
    /// Window size from which the largest cluster, when unique, is taken as
    /// correct without consulting the neighbors.
    std::size_t majority_min_binds = 10;
    double neighbor_radius_m = 30.0;

    // Coverage extension and deduplication.
    int max_ssid_edit = 2;
    int brand_snap_edit = 2;
    int dup_cluster_edit = 2;
    double logical_tau = 0.6;

    /// Cutoff matching `cluster_metric`.
    double cutoff() const
    {
        return cluster_metric == ClusterMetric::WifiSimilarity ? cutoff_similarity : cutoff_db;
    }

    bool enabled(Ranker r) const { return enabled_rankers.count(r) != 0; }
};

void to_json(nlohmann::json& j, const Config& cfg);
/// Keys absent from `j` keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, Config& cfg);

Config load_config(const std::filesystem::path& path);

} // namespace venuesense
