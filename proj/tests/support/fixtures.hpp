#pragma once

#include "venuesense/floorplan.hpp"
#include "venuesense/observation.hpp"
#include "venuesense/store.hpp"

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace fx {

using namespace venuesense;

inline WifiScan scan(std::initializer_list<std::pair<const char*, double>> readings, double t = 0.0,
                     const char* ssid = "")
{
    WifiScan s;
    s.timestamp = t;
    for (const auto& [mac, rss] : readings) {
        s.readings.push_back({mac, ssid, rss});
    }
    return s;
}

inline CheckInObservation observation(std::vector<WifiScan> scans, Point2 xy = Point2::Zero(),
                                      std::string id = "obs")
{
    CheckInObservation o;
    o.checkin_id = std::move(id);
    o.user = "u";
    o.wifi_scans = std::move(scans);
    o.location.xy = xy;
    o.timestamp = 1767225600.0;
    return o;
}

inline WifiFingerprint fractions(std::initializer_list<std::pair<const char*, double>> f, std::size_t scans = 1)
{
    WifiFingerprint fp;
    for (const auto& [mac, v] : f) {
        fp.fractions[mac] = v;
    }
    fp.scan_count = scans;
    return fp;
}

inline VenueRecord venue(const std::string& id, Point2 xy, WifiFingerprint wifi = {}, std::string mall = "")
{
    VenueRecord v;
    v.id = id;
    v.names = {id};
    v.mall = std::move(mall);
    v.claimed_location = xy;
    v.fingerprint.wifi = std::move(wifi);
    return v;
}

inline Polygon rect(const std::string& id, double x0, double y0, double x1, double y1)
{
    return {id, 0, {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
}

} // namespace fx
