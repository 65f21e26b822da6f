#pragma once

#include "venuesense/config.hpp"
#include "venuesense/types.hpp"

#include <Eigen/Core>

#include <array>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace venuesense {

// ---------------------------------------------------------------------------
// WiFi

struct WifiReading {
    MacAddress mac;
    std::string ssid;
    double rss = -100.0;  // dBm
};

struct WifiScan {
    std::vector<WifiReading> readings;
    double timestamp = 0.0;  // seconds since epoch

    /// Throws if a MAC repeats or an RSS lies outside [-100, 0].
    void validate() const;
};

/// Per-MAC fraction of scans in which the AP was heard.
struct WifiFingerprint {
    std::map<MacAddress, double> fractions;
    std::size_t scan_count = 0;

    bool empty() const { return fractions.empty(); }
    double fraction(const MacAddress& mac) const;

    friend bool operator==(const WifiFingerprint&, const WifiFingerprint&) = default;
};

WifiFingerprint build_wifi_fingerprint(std::span<const WifiScan> scans);

/// Fingerprint of one scan: every heard MAC at fraction 1.
WifiFingerprint single_scan_fingerprint(const WifiScan& scan);

/// Mean RSS per MAC over the scans in which it was heard.
std::map<MacAddress, double> mean_rss(std::span<const WifiScan> scans);

// ---------------------------------------------------------------------------
// Mobility

enum class VisitPeriod : int {
    EarlyMorning,
    LateMorning,
    EarlyAfternoon,
    LateAfternoon,
    EarlyEvening,
    LateEvening,
};
inline constexpr int kVisitPeriods = 6;

enum class Activity : int { Stationary, Browsing, Walking };
inline constexpr int kActivities = 3;

std::string_view to_string(VisitPeriod p);
std::string_view to_string(Activity a);
VisitPeriod visit_period_from_string(std::string_view s);
Activity activity_from_string(std::string_view s);

struct MobilityObservation {
    VisitPeriod visit_period = VisitPeriod::EarlyMorning;
    Activity activity = Activity::Stationary;
    int duration_bucket = 0;  // index of the 30-minute stay interval

    friend bool operator==(const MobilityObservation&, const MobilityObservation&) = default;
};

/// Period containing `local_hour` given the six cyclic period start hours.
VisitPeriod visit_period_for(double local_hour, const std::array<int, 6>& period_start_hours);

/// Quantizes raw mobility measurements. `mobility_ratio` is moving time over
/// stationary time; stays longer than the last bucket are pooled into it.
MobilityObservation quantize_mobility(double mobility_ratio, double local_hour, double stay_seconds,
                                      const Config& cfg = {});

/// Hour of day in [0, 24) for an epoch timestamp (UTC treated as local time).
double local_hour_of(double timestamp);

/// Counts per bin; the histograms are the normalized views.
struct MobilityFingerprint {
    Eigen::Matrix<double, kVisitPeriods, 1> visit_counts = Eigen::Matrix<double, kVisitPeriods, 1>::Zero();
    Eigen::Matrix<double, kActivities, 1> activity_counts = Eigen::Matrix<double, kActivities, 1>::Zero();
    Eigen::VectorXd duration_counts;
    double samples = 0.0;

    bool empty() const { return samples <= 0.0; }
    void add(const MobilityObservation& obs);
    void add(const MobilityFingerprint& other);

    Eigen::VectorXd visit_hist() const;
    Eigen::VectorXd activity_hist() const;
    Eigen::VectorXd duration_hist() const;
};

bool operator==(const MobilityFingerprint& a, const MobilityFingerprint& b);

// ---------------------------------------------------------------------------
// Sound

inline constexpr int kSoundBins = 100;

struct SoundSample {
    int hour = 0;
    Eigen::VectorXd histogram;  // kSoundBins normalized interval frequencies
};

/// Amplitude histogram over 100 equal intervals of [0, 1].
SoundSample build_sound_fingerprint(std::span<const double> amplitudes, int hour);

/// One averaged amplitude histogram per hour-of-day bin.
struct SoundFingerprint {
    std::map<int, Eigen::VectorXd> hour_bins;
    std::map<int, std::size_t> hour_counts;

    bool empty() const { return hour_bins.empty(); }
    void add(const SoundSample& sample);
    void add(const SoundFingerprint& other);
    const Eigen::VectorXd* at_hour(int hour) const;
};

bool operator==(const SoundFingerprint& a, const SoundFingerprint& b);

// ---------------------------------------------------------------------------
// Color / light

struct ColorCluster {
    Hsl centroid = Hsl::Zero();
    std::size_t size = 0;
};

/// K-means clusters over HSL pixels (hue in degrees [0, 360], saturation and
/// lightness in [0, 1]). `reservoir` keeps a bounded pixel sample so clusters
/// can be recomputed when check-ins are merged.
struct ColorLightFingerprint {
    std::vector<ColorCluster> clusters;
    std::size_t total_pixels = 0;
    std::vector<Hsl> reservoir;

    bool empty() const { return total_pixels == 0; }
};

bool operator==(const ColorLightFingerprint& a, const ColorLightFingerprint& b);

bool valid_hsl(const Hsl& pixel);

ColorLightFingerprint build_color_fingerprint(std::span<const Hsl> pixels, int clusters,
                                              const Config& cfg = {});

/// Clusters `pixels`, reporting sizes scaled so they sum to `total_pixels`.
ColorLightFingerprint cluster_pixel_sample(std::vector<Hsl> pixels, std::size_t total_pixels,
                                           const Config& cfg);

ColorLightFingerprint merge_color(const ColorLightFingerprint& a, const ColorLightFingerprint& b,
                                  const Config& cfg);

// ---------------------------------------------------------------------------
// Magnetic

struct MagneticSignature {
    /// One-sided DFT energy per frequency bin of the mean-normalized series,
    /// zero-padded to the next power of two.
    Eigen::VectorXd energy_spectrum;
    /// Per-axis RMS of the mean-normalized readings (m_x, m_y, m_z).
    Eigen::Vector3d summary = Eigen::Vector3d::Zero();
};

bool operator==(const MagneticSignature& a, const MagneticSignature& b);

MagneticSignature build_magnetic_signature(std::span<const Eigen::Vector3d> readings);

// ---------------------------------------------------------------------------
// Text

struct TextFeatures {
    std::optional<std::string> ssid_strongest;
    std::set<std::string> ocr_terms;
    VistermBag visterms;

    friend bool operator==(const TextFeatures&, const TextFeatures&) = default;
};

/// True when the SSID contains a stoplisted manufacturer/provider name.
bool ssid_stoplisted(std::string_view ssid, std::span<const std::string> stoplist);

/// SSID of the AP with the strongest mean RSS after stoplist filtering.
std::optional<std::string> strongest_ssid(std::span<const WifiScan> scans,
                                          std::span<const std::string> stoplist);

/// Lowercased alphabetic words, minus stop words and one-letter/numeric tokens.
std::set<std::string> extract_terms(std::string_view text, std::span<const std::string> stop_words);

// ---------------------------------------------------------------------------
// Venue fingerprint

struct VenueFingerprint {
    WifiFingerprint wifi;
    MobilityFingerprint mobility;
    SoundFingerprint sound;
    ColorLightFingerprint color;
    std::optional<MagneticSignature> magnetic;
    std::size_t magnetic_samples = 0;
    TextFeatures text;
    std::map<std::string, std::size_t> ssid_votes;
    std::vector<Point2> location_samples;
    std::map<UserId, std::size_t> familiarity_counts;
};

bool operator==(const VenueFingerprint& a, const VenueFingerprint& b);

/// Combines two fingerprints as if their check-ins had been collected together.
/// WiFi fractions and histograms are recomputed from integer counts, so the
/// result does not depend on merge order.
VenueFingerprint merge_fingerprints(const VenueFingerprint& a, const VenueFingerprint& b,
                                    const Config& cfg);

WifiFingerprint merge_wifi(const WifiFingerprint& a, const WifiFingerprint& b);

} // namespace venuesense
