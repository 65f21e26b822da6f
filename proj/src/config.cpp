#include "venuesense/config.hpp"

#include <fstream>
#include <sstream>

namespace venuesense {

namespace {

constexpr std::array<std::string_view, 10> kRankerNames{
    "wifi", "location", "sound", "image", "mobility", "color", "magnetic", "ssid", "ocr", "familiarity"};

std::string_view aggregator_name(Aggregator a) { return a == Aggregator::Borda ? "borda" : "combsum"; }

Aggregator aggregator_from(std::string_view s)
{
    if (s == "borda") {
        return Aggregator::Borda;
    }
    if (s == "combsum") {
        return Aggregator::CombSum;
    }
    throw ParseError("config: unknown aggregator '" + std::string(s) + "'");
}

std::string_view metric_name(ClusterMetric m)
{
    return m == ClusterMetric::WifiSimilarity ? "wifi-similarity" : "rss-euclidean-db";
}

ClusterMetric metric_from(std::string_view s)
{
    if (s == "wifi-similarity") {
        return ClusterMetric::WifiSimilarity;
    }
    if (s == "rss-euclidean-db") {
        return ClusterMetric::RssEuclideanDb;
    }
    throw ParseError("config: unknown cluster metric '" + std::string(s) + "'");
}

std::string_view magnetic_name(MagneticCompare m) { return m == MagneticCompare::Summary ? "summary" : "spectrum"; }

MagneticCompare magnetic_from(std::string_view s)
{
    if (s == "summary") {
        return MagneticCompare::Summary;
    }
    if (s == "spectrum") {
        return MagneticCompare::Spectrum;
    }
    throw ParseError("config: unknown magnetic comparison '" + std::string(s) + "'");
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& into)
{
    if (const auto it = j.find(key); it != j.end()) {
        try {
            into = it->get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("config: field '") + key + "': " + e.what());
        }
    }
}

} // namespace

std::string_view to_string(Ranker ranker) { return kRankerNames[static_cast<std::size_t>(ranker)]; }

Ranker ranker_from_string(std::string_view name)
{
    for (std::size_t i = 0; i < kRankerNames.size(); ++i) {
        if (kRankerNames[i] == name) {
            return static_cast<Ranker>(i);
        }
    }
    throw ParseError("unknown ranker '" + std::string(name) + "'");
}

void to_json(nlohmann::json& j, const Config& cfg)
{
    std::vector<std::string> rankers;
    for (Ranker r : cfg.enabled_rankers) {
        rankers.emplace_back(to_string(r));
    }
    j = nlohmann::json{
        {"period_start_hours", cfg.period_start_hours},
        {"max_duration_bucket", cfg.max_duration_bucket},
        {"color_clusters", cfg.color_clusters},
        {"kmeans_seed", cfg.kmeans_seed},
        {"kmeans_max_iterations", cfg.kmeans_max_iterations},
        {"pixel_reservoir", cfg.pixel_reservoir},
        {"ssid_stoplist", cfg.ssid_stoplist},
        {"stop_words", cfg.stop_words},
        {"delta_min", cfg.delta_min},
        {"mobility_epsilon", cfg.mobility_epsilon},
        {"familiarity_beta", cfg.familiarity_beta},
        {"magnetic_compare", magnetic_name(cfg.magnetic_compare)},
        {"stationarity_threshold", cfg.stationarity_threshold},
        {"min_stationary_seconds", cfg.min_stationary_seconds},
        {"new_venue_threshold", cfg.new_venue_threshold},
        {"filter_size", cfg.filter_size},
        {"snap_radius_m", cfg.snap_radius_m},
        {"aggregator", aggregator_name(cfg.aggregator)},
        {"enabled_rankers", rankers},
        {"learning_rate", cfg.learning_rate},
        {"feedback", cfg.feedback},
        {"cluster_metric", metric_name(cfg.cluster_metric)},
        {"cutoff_similarity", cfg.cutoff_similarity},
        {"cutoff_db", cfg.cutoff_db},
        {"missing_rss_dbm", cfg.missing_rss_dbm},
        {"bind_window", cfg.bind_window},
        {"majority_min_binds", cfg.majority_min_binds},
        {"neighbor_radius_m", cfg.neighbor_radius_m},
        {"max_ssid_edit", cfg.max_ssid_edit},
        {"brand_snap_edit", cfg.brand_snap_edit},
        {"dup_cluster_edit", cfg.dup_cluster_edit},
        {"logical_tau", cfg.logical_tau},
    };
}

void from_json(const nlohmann::json& j, Config& cfg)
{
    if (!j.is_object()) {
        throw ParseError("config: expected an object");
    }
    static const std::set<std::string> known{
        "period_start_hours", "max_duration_bucket", "color_clusters",    "kmeans_seed",
        "kmeans_max_iterations", "pixel_reservoir",  "ssid_stoplist",     "stop_words",
        "delta_min",          "mobility_epsilon",    "familiarity_beta",  "magnetic_compare",
        "stationarity_threshold", "min_stationary_seconds", "new_venue_threshold", "filter_size",
        "snap_radius_m",      "aggregator",          "enabled_rankers",   "learning_rate",
        "feedback",           "cluster_metric",      "cutoff_similarity", "cutoff_db",
        "missing_rss_dbm",    "bind_window",         "majority_min_binds", "neighbor_radius_m",
        "max_ssid_edit",
        "brand_snap_edit",    "dup_cluster_edit",    "logical_tau"};
    for (const auto& [key, value] : j.items()) {
        if (known.count(key) == 0) {
            throw ParseError("config: unknown field '" + key + "'");
        }
    }
    read(j, "period_start_hours", cfg.period_start_hours);
    read(j, "max_duration_bucket", cfg.max_duration_bucket);
    read(j, "color_clusters", cfg.color_clusters);
    read(j, "kmeans_seed", cfg.kmeans_seed);
    read(j, "kmeans_max_iterations", cfg.kmeans_max_iterations);
    read(j, "pixel_reservoir", cfg.pixel_reservoir);
    read(j, "ssid_stoplist", cfg.ssid_stoplist);
    read(j, "stop_words", cfg.stop_words);
    read(j, "delta_min", cfg.delta_min);
    read(j, "mobility_epsilon", cfg.mobility_epsilon);
    read(j, "familiarity_beta", cfg.familiarity_beta);
    if (j.contains("magnetic_compare")) {
        cfg.magnetic_compare = magnetic_from(j.at("magnetic_compare").get<std::string>());
    }
    read(j, "stationarity_threshold", cfg.stationarity_threshold);
    read(j, "min_stationary_seconds", cfg.min_stationary_seconds);
    read(j, "new_venue_threshold", cfg.new_venue_threshold);
    read(j, "filter_size", cfg.filter_size);
    read(j, "snap_radius_m", cfg.snap_radius_m);
    if (j.contains("aggregator")) {
        cfg.aggregator = aggregator_from(j.at("aggregator").get<std::string>());
    }
    if (j.contains("enabled_rankers")) {
        cfg.enabled_rankers.clear();
        for (const auto& name : j.at("enabled_rankers")) {
            cfg.enabled_rankers.insert(ranker_from_string(name.get<std::string>()));
        }
    }
    read(j, "learning_rate", cfg.learning_rate);
    read(j, "feedback", cfg.feedback);
    if (j.contains("cluster_metric")) {
        cfg.cluster_metric = metric_from(j.at("cluster_metric").get<std::string>());
    }
    read(j, "cutoff_similarity", cfg.cutoff_similarity);
    read(j, "cutoff_db", cfg.cutoff_db);
    read(j, "missing_rss_dbm", cfg.missing_rss_dbm);
    read(j, "bind_window", cfg.bind_window);
    read(j, "majority_min_binds", cfg.majority_min_binds);
    read(j, "neighbor_radius_m", cfg.neighbor_radius_m);
    read(j, "max_ssid_edit", cfg.max_ssid_edit);
    read(j, "brand_snap_edit", cfg.brand_snap_edit);
    read(j, "dup_cluster_edit", cfg.dup_cluster_edit);
    read(j, "logical_tau", cfg.logical_tau);

    for (std::size_t i = 1; i < cfg.period_start_hours.size(); ++i) {
        if (cfg.period_start_hours[i] <= cfg.period_start_hours[i - 1]) {
            throw ParseError("config: period_start_hours must be strictly increasing");
        }
    }
    if (cfg.color_clusters <= 0 || cfg.filter_size == 0 || cfg.bind_window == 0) {
        throw ParseError("config: counts must be positive");
    }
    if (cfg.learning_rate < 0.0 || cfg.learning_rate > 1.0 || cfg.familiarity_beta < 0.0 ||
        cfg.familiarity_beta > 1.0) {
        throw ParseError("config: learning_rate and familiarity_beta must lie in [0, 1]");
    }
}

Config load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config " + path.string());
    }
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return j.get<Config>();
}

} // namespace venuesense
