#pragma once

#include "venuesense/observation.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace venuesense {

struct VenueRecord;

/// Field order follows insertion order, so documents are byte-stable.
using Json = nlohmann::ordered_json;

namespace json_io {

// Decoders take the document path of `j` so errors name the offending field,
// e.g. "venues[3].fingerprint.wifi: missing field 'scan_count'".

const Json& field(const Json& j, const char* key, const std::string& path);

template <typename T>
T value(const Json& j, const char* key, const std::string& path)
{
    const Json& f = field(j, key, path);
    try {
        return f.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ParseError(path + "." + key + ": wrong type");
    }
}

Json encode(const Point2& p);
Point2 decode_point(const Json& j, const std::string& path);

Json encode(const Eigen::VectorXd& v);
Eigen::VectorXd decode_vector(const Json& j, const std::string& path);

Json encode(const WifiScan& scan);
WifiScan decode_scan(const Json& j, const std::string& path);

Json encode(const WifiFingerprint& fp);
WifiFingerprint decode_wifi(const Json& j, const std::string& path);

Json encode(const MobilityObservation& obs);
MobilityObservation decode_mobility_observation(const Json& j, const std::string& path);

Json encode(const MobilityFingerprint& fp);
MobilityFingerprint decode_mobility(const Json& j, const std::string& path);

Json encode(const SoundSample& s);
SoundSample decode_sound_sample(const Json& j, const std::string& path);

Json encode(const SoundFingerprint& fp);
SoundFingerprint decode_sound(const Json& j, const std::string& path);

Json encode(const ColorLightFingerprint& fp);
ColorLightFingerprint decode_color(const Json& j, const std::string& path);

Json encode(const MagneticSignature& sig);
MagneticSignature decode_magnetic(const Json& j, const std::string& path);

Json encode(const TextFeatures& text);
TextFeatures decode_text(const Json& j, const std::string& path);

Json encode(const VistermBag& bag);
VistermBag decode_visterms(const Json& j, const std::string& path);

Json encode(const VenueFingerprint& fp);
VenueFingerprint decode_fingerprint(const Json& j, const std::string& path);

Json encode(const CheckInObservation& obs);
CheckInObservation decode_observation(const Json& j, const std::string& path);

Json encode(const CheckInBind& bind);
CheckInBind decode_bind(const Json& j, const std::string& path);

Json encode(const VenueRecord& record);
VenueRecord decode_venue(const Json& j, const std::string& path);

/// Parses text, reporting syntax errors as "<source>:<line>:<column>: ...".
Json parse_document(const std::string& text, const std::string& source);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

} // namespace json_io
} // namespace venuesense
