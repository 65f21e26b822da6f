#pragma once

#include "venuesense/fingerprint.hpp"

#include <optional>
#include <string>
#include <vector>

namespace venuesense {

/// Rough position from the dead-reckoning provider.
struct LocationEstimate {
    Point2 xy = Point2::Zero();
    int floor = 0;
    std::string mall;  // empty: unrestricted
};

/// Sensor snapshot attached to one check-in.
struct CheckInObservation {
    std::string checkin_id;
    UserId user;
    std::vector<WifiScan> wifi_scans;
    MobilityObservation mobility;
    std::optional<SoundSample> sound;
    std::optional<ColorLightFingerprint> color;
    std::optional<MagneticSignature> magnetic;
    TextFeatures text;
    LocationEstimate location;
    double timestamp = 0.0;

    /// Throws when scans are missing or malformed or the location is not finite.
    void validate() const;
};

/// Single-check-in fingerprint; merging it into a venue fingerprint is how
/// venues accumulate their signature.
VenueFingerprint fingerprint_from_observation(const CheckInObservation& obs, const Config& cfg = {});

VenueFingerprint merge_observation(const VenueFingerprint& fp, const CheckInObservation& obs,
                                   const Config& cfg = {});

enum class BindLabel { Unclassified, Correct, Fake };

std::string_view to_string(BindLabel label);
BindLabel bind_label_from_string(std::string_view s);

/// WiFi evidence of one check-in, retained per claimed venue for integrity checks.
struct CheckInBind {
    std::string checkin_id;
    VenueId venue;  // claimed
    UserId user;
    WifiFingerprint wifi;
    std::map<MacAddress, double> rss;  // mean dBm per MAC
    Point2 location = Point2::Zero();
    double timestamp = 0.0;
    BindLabel label = BindLabel::Unclassified;
};

bool operator==(const CheckInBind& a, const CheckInBind& b);

CheckInBind make_bind(const CheckInObservation& obs, const VenueId& claimed);

} // namespace venuesense
