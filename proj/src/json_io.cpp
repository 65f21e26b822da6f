#include "venuesense/json_io.hpp"
#include "venuesense/store.hpp"

#include <fstream>
#include <sstream>

namespace venuesense::json_io {

const Json& field(const Json& j, const char* key, const std::string& path)
{
    if (!j.is_object()) {
        throw ParseError(path + ": expected an object");
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        throw ParseError(path + ": missing field '" + key + "'");
    }
    return *it;
}

namespace {

const Json& array_field(const Json& j, const char* key, const std::string& path)
{
    const Json& f = field(j, key, path);
    if (!f.is_array()) {
        throw ParseError(path + "." + key + ": expected an array");
    }
    return f;
}

std::string at(const std::string& path, const char* key, std::size_t i)
{
    return path + "." + key + "[" + std::to_string(i) + "]";
}

double number(const Json& j, const std::string& path)
{
    if (!j.is_number()) {
        throw ParseError(path + ": expected a number");
    }
    return j.get<double>();
}

} // namespace

Json encode(const Point2& p) { return Json::array({p.x(), p.y()}); }

Point2 decode_point(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 2) {
        throw ParseError(path + ": expected [x, y]");
    }
    return {number(j[0], path + "[0]"), number(j[1], path + "[1]")};
}

Json encode(const Eigen::VectorXd& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out.push_back(v[i]);
    }
    return out;
}

Eigen::VectorXd decode_vector(const Json& j, const std::string& path)
{
    if (!j.is_array()) {
        throw ParseError(path + ": expected an array");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = number(j[i], path + "[" + std::to_string(i) + "]");
    }
    return v;
}

Json encode(const WifiScan& scan)
{
    Json readings = Json::array();
    for (const auto& r : scan.readings) {
        readings.push_back(Json{{"mac", r.mac}, {"ssid", r.ssid}, {"rss", r.rss}});
    }
    return Json{{"timestamp", scan.timestamp}, {"readings", readings}};
}

WifiScan decode_scan(const Json& j, const std::string& path)
{
    WifiScan scan;
    scan.timestamp = value<double>(j, "timestamp", path);
    const Json& readings = array_field(j, "readings", path);
    for (std::size_t i = 0; i < readings.size(); ++i) {
        const auto p = at(path, "readings", i);
        scan.readings.push_back({value<std::string>(readings[i], "mac", p), value<std::string>(readings[i], "ssid", p),
                                 value<double>(readings[i], "rss", p)});
    }
    return scan;
}

Json encode(const WifiFingerprint& fp)
{
    Json fractions = Json::object();
    for (const auto& [mac, f] : fp.fractions) {
        fractions[mac] = f;
    }
    return Json{{"scan_count", fp.scan_count}, {"fractions", fractions}};
}

WifiFingerprint decode_wifi(const Json& j, const std::string& path)
{
    WifiFingerprint fp;
    fp.scan_count = value<std::size_t>(j, "scan_count", path);
    const Json& fractions = field(j, "fractions", path);
    if (!fractions.is_object()) {
        throw ParseError(path + ".fractions: expected an object");
    }
    for (const auto& [mac, f] : fractions.items()) {
        fp.fractions[mac] = number(f, path + ".fractions." + mac);
    }
    return fp;
}

Json encode(const MobilityObservation& obs)
{
    return Json{{"visit_period", to_string(obs.visit_period)},
                {"activity", to_string(obs.activity)},
                {"duration_bucket", obs.duration_bucket}};
}

MobilityObservation decode_mobility_observation(const Json& j, const std::string& path)
{
    MobilityObservation obs;
    try {
        obs.visit_period = visit_period_from_string(value<std::string>(j, "visit_period", path));
        obs.activity = activity_from_string(value<std::string>(j, "activity", path));
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
    obs.duration_bucket = value<int>(j, "duration_bucket", path);
    if (obs.duration_bucket < 0) {
        throw ParseError(path + ".duration_bucket: negative");
    }
    return obs;
}

Json encode(const MobilityFingerprint& fp)
{
    return Json{{"samples", fp.samples},
                {"visit_counts", encode(Eigen::VectorXd(fp.visit_counts))},
                {"activity_counts", encode(Eigen::VectorXd(fp.activity_counts))},
                {"duration_counts", encode(fp.duration_counts)}};
}

MobilityFingerprint decode_mobility(const Json& j, const std::string& path)
{
    MobilityFingerprint fp;
    fp.samples = value<double>(j, "samples", path);
    const auto visits = decode_vector(field(j, "visit_counts", path), path + ".visit_counts");
    const auto acts = decode_vector(field(j, "activity_counts", path), path + ".activity_counts");
    if (visits.size() != kVisitPeriods || acts.size() != kActivities) {
        throw ParseError(path + ": histogram has the wrong number of bins");
    }
    fp.visit_counts = visits;
    fp.activity_counts = acts;
    fp.duration_counts = decode_vector(field(j, "duration_counts", path), path + ".duration_counts");
    return fp;
}

Json encode(const SoundSample& s) { return Json{{"hour", s.hour}, {"histogram", encode(s.histogram)}}; }

SoundSample decode_sound_sample(const Json& j, const std::string& path)
{
    SoundSample s;
    s.hour = value<int>(j, "hour", path);
    s.histogram = decode_vector(field(j, "histogram", path), path + ".histogram");
    if (s.histogram.size() != kSoundBins || s.hour < 0 || s.hour >= 24) {
        throw ParseError(path + ": invalid sound sample");
    }
    return s;
}

Json encode(const SoundFingerprint& fp)
{
    Json bins = Json::array();
    for (const auto& [hour, vec] : fp.hour_bins) {
        bins.push_back(Json{{"hour", hour}, {"count", fp.hour_counts.at(hour)}, {"histogram", encode(vec)}});
    }
    return Json{{"hour_bins", bins}};
}

SoundFingerprint decode_sound(const Json& j, const std::string& path)
{
    SoundFingerprint fp;
    const Json& bins = array_field(j, "hour_bins", path);
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const auto p = at(path, "hour_bins", i);
        const int hour = value<int>(bins[i], "hour", p);
        auto vec = decode_vector(field(bins[i], "histogram", p), p + ".histogram");
        if (vec.size() != kSoundBins) {
            throw ParseError(p + ".histogram: expected 100 bins");
        }
        fp.hour_counts[hour] = value<std::size_t>(bins[i], "count", p);
        fp.hour_bins[hour] = std::move(vec);
    }
    return fp;
}

namespace {

Json encode_hsl(const Hsl& c) { return Json::array({c[0], c[1], c[2]}); }

Hsl decode_hsl(const Json& j, const std::string& path)
{
    if (!j.is_array() || j.size() != 3) {
        throw ParseError(path + ": expected [h, s, l]");
    }
    return {number(j[0], path), number(j[1], path), number(j[2], path)};
}

} // namespace

Json encode(const ColorLightFingerprint& fp)
{
    Json clusters = Json::array();
    for (const auto& c : fp.clusters) {
        clusters.push_back(Json{{"centroid", encode_hsl(c.centroid)}, {"size", c.size}});
    }
    Json reservoir = Json::array();
    for (const auto& p : fp.reservoir) {
        reservoir.push_back(encode_hsl(p));
    }
    return Json{{"total_pixels", fp.total_pixels}, {"clusters", clusters}, {"reservoir", reservoir}};
}

ColorLightFingerprint decode_color(const Json& j, const std::string& path)
{
    ColorLightFingerprint fp;
    fp.total_pixels = value<std::size_t>(j, "total_pixels", path);
    const Json& clusters = array_field(j, "clusters", path);
    for (std::size_t i = 0; i < clusters.size(); ++i) {
        const auto p = at(path, "clusters", i);
        fp.clusters.push_back(
            {decode_hsl(field(clusters[i], "centroid", p), p + ".centroid"), value<std::size_t>(clusters[i], "size", p)});
    }
    const Json& reservoir = array_field(j, "reservoir", path);
    for (std::size_t i = 0; i < reservoir.size(); ++i) {
        fp.reservoir.push_back(decode_hsl(reservoir[i], at(path, "reservoir", i)));
    }
    return fp;
}

Json encode(const MagneticSignature& sig)
{
    return Json{{"summary", encode(Eigen::VectorXd(sig.summary))}, {"energy_spectrum", encode(sig.energy_spectrum)}};
}

MagneticSignature decode_magnetic(const Json& j, const std::string& path)
{
    MagneticSignature sig;
    const auto summary = decode_vector(field(j, "summary", path), path + ".summary");
    if (summary.size() != 3) {
        throw ParseError(path + ".summary: expected 3 components");
    }
    sig.summary = summary;
    sig.energy_spectrum = decode_vector(field(j, "energy_spectrum", path), path + ".energy_spectrum");
    return sig;
}

Json encode(const VistermBag& bag)
{
    Json out = Json::object();
    for (const auto& [term, count] : bag) {
        out[term] = count;
    }
    return out;
}

VistermBag decode_visterms(const Json& j, const std::string& path)
{
    if (!j.is_object()) {
        throw ParseError(path + ": expected an object");
    }
    VistermBag bag;
    for (const auto& [term, count] : j.items()) {
        if (!count.is_number_unsigned()) {
            throw ParseError(path + "." + term + ": expected a count");
        }
        bag[term] = count.get<std::size_t>();
    }
    return bag;
}

Json encode(const TextFeatures& text)
{
    Json out{{"ssid_strongest", text.ssid_strongest ? Json(*text.ssid_strongest) : Json(nullptr)},
             {"ocr_terms", text.ocr_terms},
             {"visterms", encode(text.visterms)}};
    return out;
}

TextFeatures decode_text(const Json& j, const std::string& path)
{
    TextFeatures text;
    const Json& ssid = field(j, "ssid_strongest", path);
    if (!ssid.is_null()) {
        text.ssid_strongest = value<std::string>(j, "ssid_strongest", path);
    }
    text.ocr_terms = value<std::set<std::string>>(j, "ocr_terms", path);
    text.visterms = decode_visterms(field(j, "visterms", path), path + ".visterms");
    return text;
}

Json encode(const VenueFingerprint& fp)
{
    Json locations = Json::array();
    for (const auto& p : fp.location_samples) {
        locations.push_back(encode(p));
    }
    Json familiarity = Json::object();
    for (const auto& [user, c] : fp.familiarity_counts) {
        familiarity[user] = c;
    }
    Json votes = Json::object();
    for (const auto& [ssid, c] : fp.ssid_votes) {
        votes[ssid] = c;
    }
    return Json{{"wifi", encode(fp.wifi)},
                {"mobility", encode(fp.mobility)},
                {"sound", encode(fp.sound)},
                {"color", encode(fp.color)},
                {"magnetic", fp.magnetic ? encode(*fp.magnetic) : Json(nullptr)},
                {"magnetic_samples", fp.magnetic_samples},
                {"text", encode(fp.text)},
                {"ssid_votes", votes},
                {"location_samples", locations},
                {"familiarity_counts", familiarity}};
}

VenueFingerprint decode_fingerprint(const Json& j, const std::string& path)
{
    VenueFingerprint fp;
    fp.wifi = decode_wifi(field(j, "wifi", path), path + ".wifi");
    fp.mobility = decode_mobility(field(j, "mobility", path), path + ".mobility");
    fp.sound = decode_sound(field(j, "sound", path), path + ".sound");
    fp.color = decode_color(field(j, "color", path), path + ".color");
    const Json& magnetic = field(j, "magnetic", path);
    if (!magnetic.is_null()) {
        fp.magnetic = decode_magnetic(magnetic, path + ".magnetic");
    }
    fp.magnetic_samples = value<std::size_t>(j, "magnetic_samples", path);
    fp.text = decode_text(field(j, "text", path), path + ".text");
    fp.ssid_votes = value<std::map<std::string, std::size_t>>(j, "ssid_votes", path);
    const Json& locations = array_field(j, "location_samples", path);
    for (std::size_t i = 0; i < locations.size(); ++i) {
        fp.location_samples.push_back(decode_point(locations[i], at(path, "location_samples", i)));
    }
    fp.familiarity_counts = value<std::map<UserId, std::size_t>>(j, "familiarity_counts", path);
    return fp;
}

Json encode(const CheckInObservation& obs)
{
    Json scans = Json::array();
    for (const auto& s : obs.wifi_scans) {
        scans.push_back(encode(s));
    }
    return Json{{"checkin_id", obs.checkin_id},
                {"user", obs.user},
                {"timestamp", obs.timestamp},
                {"location",
                 Json{{"xy", encode(obs.location.xy)}, {"floor", obs.location.floor}, {"mall", obs.location.mall}}},
                {"wifi_scans", scans},
                {"mobility", encode(obs.mobility)},
                {"sound", obs.sound ? encode(*obs.sound) : Json(nullptr)},
                {"color", obs.color ? encode(*obs.color) : Json(nullptr)},
                {"magnetic", obs.magnetic ? encode(*obs.magnetic) : Json(nullptr)},
                {"text", encode(obs.text)}};
}

CheckInObservation decode_observation(const Json& j, const std::string& path)
{
    CheckInObservation obs;
    obs.checkin_id = value<std::string>(j, "checkin_id", path);
    obs.user = value<std::string>(j, "user", path);
    obs.timestamp = value<double>(j, "timestamp", path);
    const Json& loc = field(j, "location", path);
    obs.location.xy = decode_point(field(loc, "xy", path + ".location"), path + ".location.xy");
    obs.location.floor = value<int>(loc, "floor", path + ".location");
    obs.location.mall = value<std::string>(loc, "mall", path + ".location");
    const Json& scans = array_field(j, "wifi_scans", path);
    for (std::size_t i = 0; i < scans.size(); ++i) {
        obs.wifi_scans.push_back(decode_scan(scans[i], at(path, "wifi_scans", i)));
    }
    obs.mobility = decode_mobility_observation(field(j, "mobility", path), path + ".mobility");
    if (const Json& s = field(j, "sound", path); !s.is_null()) {
        obs.sound = decode_sound_sample(s, path + ".sound");
    }
    if (const Json& c = field(j, "color", path); !c.is_null()) {
        obs.color = decode_color(c, path + ".color");
    }
    if (const Json& m = field(j, "magnetic", path); !m.is_null()) {
        obs.magnetic = decode_magnetic(m, path + ".magnetic");
    }
    obs.text = decode_text(field(j, "text", path), path + ".text");
    try {
        obs.validate();
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return obs;
}

Json encode(const CheckInBind& bind)
{
    Json rss = Json::object();
    for (const auto& [mac, v] : bind.rss) {
        rss[mac] = v;
    }
    return Json{{"checkin_id", bind.checkin_id}, {"venue", bind.venue},         {"user", bind.user},
                {"timestamp", bind.timestamp},   {"label", to_string(bind.label)}, {"location", encode(bind.location)},
                {"wifi", encode(bind.wifi)},     {"rss", rss}};
}

CheckInBind decode_bind(const Json& j, const std::string& path)
{
    CheckInBind bind;
    bind.checkin_id = value<std::string>(j, "checkin_id", path);
    bind.venue = value<std::string>(j, "venue", path);
    bind.user = value<std::string>(j, "user", path);
    bind.timestamp = value<double>(j, "timestamp", path);
    try {
        bind.label = bind_label_from_string(value<std::string>(j, "label", path));
    } catch (const ParseError& e) {
        throw ParseError(path + ".label: " + e.what());
    }
    bind.location = decode_point(field(j, "location", path), path + ".location");
    bind.wifi = decode_wifi(field(j, "wifi", path), path + ".wifi");
    bind.rss = value<std::map<MacAddress, double>>(j, "rss", path);
    return bind;
}

Json encode(const VenueRecord& r)
{
    Json images = Json::array();
    for (const auto& img : r.image_corpus) {
        images.push_back(encode(img));
    }
    Json log = Json::array();
    for (const auto& b : r.checkin_log) {
        log.push_back(encode(b));
    }
    return Json{{"id", r.id},
                {"names", r.names},
                {"brand", r.brand ? Json(*r.brand) : Json(nullptr)},
                {"category", to_string(r.category.category)},
                {"subcategory", r.category.subcategory},
                {"mall", r.mall},
                {"floor", r.floor},
                {"claimed_location", encode(r.claimed_location)},
                {"estimated_location", r.estimated_location ? encode(*r.estimated_location) : Json(nullptr)},
                {"pending_naming", r.pending_naming},
                {"tips", r.tips},
                {"image_corpus", images},
                {"fingerprint", encode(r.fingerprint)},
                {"checkin_log", log}};
}

VenueRecord decode_venue(const Json& j, const std::string& path)
{
    VenueRecord r;
    r.id = value<std::string>(j, "id", path);
    r.names = value<std::vector<std::string>>(j, "names", path);
    if (r.names.empty()) {
        throw ParseError(path + ".names: must not be empty");
    }
    if (const Json& b = field(j, "brand", path); !b.is_null()) {
        r.brand = value<std::string>(j, "brand", path);
    }
    try {
        r.category.category = category_from_string(value<std::string>(j, "category", path));
    } catch (const ParseError& e) {
        throw ParseError(path + ".category: " + e.what());
    }
    r.category.subcategory = value<std::string>(j, "subcategory", path);
    r.mall = value<std::string>(j, "mall", path);
    r.floor = value<int>(j, "floor", path);
    r.claimed_location = decode_point(field(j, "claimed_location", path), path + ".claimed_location");
    if (const Json& e = field(j, "estimated_location", path); !e.is_null()) {
        r.estimated_location = decode_point(e, path + ".estimated_location");
    }
    r.pending_naming = value<bool>(j, "pending_naming", path);
    r.tips = value<std::vector<std::string>>(j, "tips", path);
    const Json& images = array_field(j, "image_corpus", path);
    for (std::size_t i = 0; i < images.size(); ++i) {
        r.image_corpus.push_back(decode_visterms(images[i], at(path, "image_corpus", i)));
    }
    r.fingerprint = decode_fingerprint(field(j, "fingerprint", path), path + ".fingerprint");
    const Json& log = array_field(j, "checkin_log", path);
    for (std::size_t i = 0; i < log.size(); ++i) {
        r.checkin_log.push_back(decode_bind(log[i], at(path, "checkin_log", i)));
    }
    return r;
}

Json parse_document(const std::string& text, const std::string& source)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                         ": malformed document (" + e.what() + ")");
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw NotFoundError("cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << text;
}

} // namespace venuesense::json_io
