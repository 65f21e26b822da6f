#include "venuesense/json_io.hpp"
#include "venuesense/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace venuesense::sim {

namespace {

constexpr double kEpochBase = 1767225600.0;  // 2026-01-01T00:00:00Z
constexpr int kTraceFirstDay = 1000;          // training visits happen before this day
constexpr int kMagneticSamples = 64;

struct Interval {
    double lo;
    double hi;
};

// Hours covered by a visit period, unwrapped past midnight.
Interval period_hours(const std::array<int, 6>& starts, int period)
{
    const double lo = starts[static_cast<std::size_t>(period)];
    const double hi = period + 1 < 6 ? starts[static_cast<std::size_t>(period + 1)] : starts[0] + 24.0;
    return {lo, hi};
}

std::vector<std::size_t> mall_venues(const World& world, const std::string& mall)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < world.venues.size(); ++i) {
        if (world.venues[i].mall == mall) {
            out.push_back(i);
        }
    }
    return out;
}

struct User {
    UserId id;
    std::string mall;
    std::vector<std::size_t> favorites;
};

// Fixed per world so every trace shares the same habits.
std::vector<User> make_users(const World& world)
{
    Rng rng = Rng(world.cfg.seed).fork(7);
    std::vector<User> users;
    for (int u = 0; u < world.cfg.users; ++u) {
        User user;
        char buf[16];
        std::snprintf(buf, sizeof buf, "u%03d", u);
        user.id = buf;
        user.mall = "m" + std::to_string(u % world.cfg.malls);
        const auto venues = mall_venues(world, user.mall);
        for (int f = 0; f < 3; ++f) {
            user.favorites.push_back(venues[rng.index(venues.size())]);
        }
        users.push_back(std::move(user));
    }
    return users;
}

std::size_t other_venue(const std::vector<std::size_t>& venues, std::size_t not_this, Rng& rng)
{
    if (venues.size() < 2) {
        return not_this;
    }
    for (;;) {
        const std::size_t pick = venues[rng.index(venues.size())];
        if (pick != not_this) {
            return pick;
        }
    }
}

Point2 corridor_position(const VenueTruth& venue, Rng& rng)
{
    const Point2 lo = venue.corridor_lo + Point2::Constant(0.3);
    const Point2 hi = venue.corridor_hi - Point2::Constant(0.3);
    return {rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y())};
}

struct FakeSource {
    std::size_t venue;
    bool corridor;
};

// Where a fake check-in claiming `claimed` is really made.
FakeSource fake_source(const std::vector<std::size_t>& venues, std::size_t claimed, const NoiseModel& noise, Rng& rng)
{
    if (venues.size() < 2 || rng.bernoulli(noise.corridor_fake_fraction)) {
        return {claimed, true};
    }
    return {other_venue(venues, claimed, rng), false};
}

} // namespace

Point2 random_position(const VenueTruth& venue, double spread, Rng& rng, double margin)
{
    const Point2 lo = venue.lo + Point2::Constant(margin);
    const Point2 hi = venue.hi - Point2::Constant(margin);
    if (spread <= 0.0) {
        return {rng.uniform(lo.x(), hi.x()), rng.uniform(lo.y(), hi.y())};
    }
    return {std::clamp(rng.normal(venue.center.x(), spread), lo.x(), hi.x()),
            std::clamp(rng.normal(venue.center.y(), spread), lo.y(), hi.y())};
}

CheckInObservation observe(const World& world, std::size_t venue_index, const Point2& position, const UserId& user,
                           int day, const NoiseModel& noise, Rng& rng, bool inside)
{
    const SimConfig& cfg = world.cfg;
    const Config& pcfg = cfg.pipeline;
    const VenueTruth& venue = world.venues[venue_index];
    CheckInObservation obs;
    obs.user = user;

    const int period = static_cast<int>(rng.weighted(venue.visit_dist));
    const Interval span = period_hours(pcfg.period_start_hours, period);
    const double hour = std::fmod(rng.uniform(span.lo, span.hi), 24.0);
    obs.timestamp = kEpochBase + day * 86400.0 + hour * 3600.0;

    const auto activity = rng.weighted(venue.activity_dist);
    const double ratio = activity == 0 ? rng.uniform(0.0, 0.18) : activity == 1 ? rng.uniform(0.25, 1.9)
                                                                                : rng.uniform(2.2, 5.0);
    const auto bucket = rng.weighted(venue.duration_dist);
    const double stay = (static_cast<double>(bucket) + rng.uniform(0.05, 0.95)) * 1800.0;
    obs.mobility = quantize_mobility(ratio, hour, stay, pcfg);

    const RadioModel& radio = cfg.radio;
    const auto level = [&](const AccessPoint& ap, const Point2& at, double loss) {
        const double d = std::max(std::hypot((ap.xy - at).norm(), radio.ap_height_m), 1.0);
        return radio.tx_power_dbm - 10.0 * radio.path_loss_exponent * std::log10(d) - loss;
    };
    // The APs a venue hears are fixed by geometry: its own plus those whose
    // signal reaches its center above the sensitivity floor. Outside, the
    // venue's own APs come through its storefront, the rest through walls,
    // and only those reaching the spot itself count.
    const Point2 reference = inside ? venue.center : position;
    std::vector<std::pair<const AccessPoint*, double>> audible;  // (ap, obstruction loss)
    for (std::size_t v = 0; v < world.venues.size(); ++v) {
        const VenueTruth& other = world.venues[v];
        if (other.mall != venue.mall) {
            continue;
        }
        for (const auto& ap : other.aps) {
            const bool own = v == venue_index;
            const double loss = !own ? radio.wall_loss_db : inside ? 0.0 : radio.storefront_loss_db;
            if ((own && inside) || level(ap, reference, loss) >= radio.sensitivity_dbm) {
                audible.emplace_back(&ap, loss);
            }
        }
    }
    for (int s = 0; s < cfg.scans_per_checkin; ++s) {
        WifiScan scan;
        scan.timestamp = obs.timestamp + 5.0 * s;
        const Point2 at = position + Point2(rng.normal(0.0, 0.3), rng.normal(0.0, 0.3));
        for (const auto& [ap, loss] : audible) {
            const double rss = level(*ap, at, loss) + rng.normal(0.0, noise.rss_jitter_db);
            if (rng.bernoulli(noise.ap_dropout)) {
                continue;
            }
            scan.readings.push_back({ap->mac, ap->ssid, std::clamp(rss, -100.0, 0.0)});
        }
        obs.wifi_scans.push_back(std::move(scan));
    }

    if (rng.bernoulli(cfg.sound_prob)) {
        const int h = static_cast<int>(hour);
        const double level = venue.sound_level + 0.05 * std::sin(2.0 * std::numbers::pi * h / 24.0);
        std::vector<double> amplitudes;
        for (int i = 0; i < 300; ++i) {
            amplitudes.push_back(std::clamp(rng.normal(level, venue.sound_spread), 0.0, 0.999));
        }
        obs.sound = build_sound_fingerprint(amplitudes, h);
    }
    if (rng.bernoulli(cfg.color_prob)) {
        static constexpr std::array<double, 4> kShares{0.4, 0.3, 0.2, 0.1};
        std::vector<Hsl> pixels;
        for (int i = 0; i < 300; ++i) {
            const Hsl& base = venue.palette[rng.weighted(kShares)];
            pixels.emplace_back(std::clamp(base[0] + rng.normal(0.0, 6.0), 0.0, 360.0),
                                std::clamp(base[1] + rng.normal(0.0, 0.04), 0.0, 1.0),
                                std::clamp(base[2] + rng.normal(0.0, 0.04), 0.0, 1.0));
        }
        obs.color = build_color_fingerprint(pixels, pcfg.color_clusters, pcfg);
    }
    if (rng.bernoulli(cfg.magnetic_prob)) {
        std::vector<Eigen::Vector3d> series;
        const Eigen::Vector3d field(20.0, 5.0, -40.0);
        const Eigen::Vector3d phase(rng.uniform(0.0, 6.3), rng.uniform(0.0, 6.3), rng.uniform(0.0, 6.3));
        for (int t = 0; t < kMagneticSamples; ++t) {
            const double angle = 2.0 * std::numbers::pi * venue.magnetic_frequency * t / kMagneticSamples;
            Eigen::Vector3d reading = field;
            for (int a = 0; a < 3; ++a) {
                reading[a] += venue.magnetic_amplitude[a] * std::sin(angle + phase[a]) + rng.normal(0.0, 0.3);
            }
            series.push_back(reading);
        }
        obs.magnetic = build_magnetic_signature(series);
    }

    obs.text.ssid_strongest = strongest_ssid(obs.wifi_scans, pcfg.ssid_stoplist);
    if (rng.bernoulli(cfg.image_prob)) {
        for (int i = 0; i < 20; ++i) {
            const std::string term = rng.bernoulli(0.8) ? venue.visterms[rng.index(venue.visterms.size())]
                                                        : "vw" + std::to_string(rng.index(2000));
            ++obs.text.visterms[term];
        }
    }
    if (rng.bernoulli(cfg.ocr_prob)) {
        std::string text;
        for (int i = 0; i < 3; ++i) {
            text += venue.words[rng.index(venue.words.size())] + " ";
        }
        if (rng.bernoulli(0.3)) {
            const auto& stranger = world.venues[rng.index(world.venues.size())];
            text += stranger.words[rng.index(stranger.words.size())];
        }
        obs.text.ocr_terms = extract_terms(text, pcfg.stop_words);
    }

    obs.location.xy = position + Point2(rng.normal(0.0, noise.location_error_m), rng.normal(0.0, noise.location_error_m));
    obs.location.floor = 0;
    obs.location.mall = venue.mall;
    return obs;
}

std::vector<TraceEntry> simulate_checkins(const World& world, int count, const NoiseModel& noise, std::uint64_t seed)
{
    noise.validate();
    Rng rng(seed);
    const auto users = make_users(world);
    std::map<std::string, std::vector<std::size_t>> malls;
    for (const auto& [mall, plan] : world.floorplans) {
        malls[mall] = mall_venues(world, mall);
    }
    std::vector<TraceEntry> trace;
    for (int i = 0; i < count; ++i) {
        const User& user = users[rng.index(users.size())];
        const auto& venues = malls.at(user.mall);
        const std::size_t actual =
            rng.bernoulli(0.4) ? user.favorites[rng.index(user.favorites.size())] : venues[rng.index(venues.size())];
        TraceEntry e;
        e.true_venue = world.venues[actual].id;
        e.claimed_venue = e.true_venue;
        FakeSource source{actual, false};
        e.fake = rng.bernoulli(noise.fake_checkin_prob);
        if (e.fake) {
            // The user claims `actual` but is somewhere else.
            source = fake_source(venues, actual, noise, rng);
            e.true_venue = world.venues[source.venue].id;
        }
        const VenueTruth& at = world.venues[source.venue];
        const Point2 position = source.corridor ? corridor_position(at, rng)
                                                : random_position(at, world.cfg.checkin_spread_m, rng);
        e.obs = observe(world, source.venue, position, user.id, kTraceFirstDay + i, noise, rng, !source.corridor);
        e.obs.checkin_id = "t" + std::to_string(i);
        trace.push_back(std::move(e));
    }
    return trace;
}

std::vector<TraceEntry> simulate_claims_per_venue(const World& world, int per_venue, const NoiseModel& noise,
                                                  std::uint64_t seed)
{
    noise.validate();
    Rng rng(seed);
    const auto users = make_users(world);
    std::map<std::string, std::vector<std::size_t>> malls;
    for (const auto& [mall, plan] : world.floorplans) {
        malls[mall] = mall_venues(world, mall);
    }
    std::vector<TraceEntry> trace;
    int n = 0;
    for (int round = 0; round < per_venue; ++round) {
        for (std::size_t v = 0; v < world.venues.size(); ++v) {
            const auto& venues = malls.at(world.venues[v].mall);
            TraceEntry e;
            e.claimed_venue = world.venues[v].id;
            e.fake = rng.bernoulli(noise.fake_checkin_prob);
            const FakeSource source = e.fake ? fake_source(venues, v, noise, rng) : FakeSource{v, false};
            e.true_venue = world.venues[source.venue].id;
            const User& user = users[rng.index(users.size())];
            const VenueTruth& at = world.venues[source.venue];
            const Point2 position = source.corridor ? corridor_position(at, rng)
                                                    : random_position(at, world.cfg.checkin_spread_m, rng);
            e.obs = observe(world, source.venue, position, user.id, kTraceFirstDay + n, noise, rng, !source.corridor);
            e.obs.checkin_id = "t" + std::to_string(n);
            ++n;
            trace.push_back(std::move(e));
        }
    }
    return trace;
}

namespace {

VenueRecord catalog_record(const World& world, const VenueTruth& v, const VenueId& id, const std::string& name,
                           int visits, Rng& rng)
{
    const SimConfig& cfg = world.cfg;
    const auto users = make_users(world);
    VenueRecord r;
    r.id = id;
    r.names = {name};
    r.brand = v.brand;
    r.category = v.category;
    r.mall = v.mall;
    r.claimed_location = v.center + Point2(rng.normal(0.0, cfg.claimed_location_error_m),
                                           rng.normal(0.0, cfg.claimed_location_error_m));
    NoiseModel honest = cfg.noise;
    honest.fake_checkin_prob = 0.0;
    const std::size_t index = world.index_of(v.id);
    for (int k = 0; k < visits; ++k) {
        const User& user = users[rng.index(users.size())];
        CheckInObservation obs =
            observe(world, index, random_position(v, cfg.checkin_spread_m, rng), user.id, k * 7 + static_cast<int>(rng.index(7)), honest, rng);
        obs.checkin_id = "train-" + id + "-" + std::to_string(k);
        r.fingerprint = k == 0 ? fingerprint_from_observation(obs, cfg.pipeline)
                               : merge_observation(r.fingerprint, obs, cfg.pipeline);
        r.checkin_log.push_back(make_bind(obs, id));
    }
    const auto pick = [&]() { return v.words[rng.index(v.words.size())]; };
    r.tips = {"Loved the " + pick() + " and the " + pick() + " here", "Try " + pick() + " at " + name};
    for (int img = 0; img < 3; ++img) {
        VistermBag bag;
        for (int t = 0; t < 20; ++t) {
            ++bag[v.visterms[rng.index(v.visterms.size())]];
        }
        r.image_corpus.push_back(std::move(bag));
    }
    return r;
}

} // namespace

MockLbsnSource build_catalog(const World& world)
{
    const SimConfig& cfg = world.cfg;
    Rng rng = Rng(cfg.seed).fork(11);
    MockLbsnSource source;
    source.coverage_ratio = 1.0 - cfg.coverage_gap;
    for (const auto& v : world.venues) {
        if (!v.covered) {
            continue;
        }
        source.catalog.push_back(catalog_record(world, v, v.id, v.name, cfg.checkins_per_venue, rng));
        if (!v.brand && rng.bernoulli(cfg.duplicate_fraction)) {
            // Same place registered twice under a misspelled name.
            std::string alias = v.name;
            alias.insert(alias.begin() + static_cast<std::ptrdiff_t>(1 + rng.index(alias.size() - 1)),
                         static_cast<char>('a' + rng.index(26)));
            source.catalog.push_back(catalog_record(world, v, v.id + "-dup", alias, 2, rng));
        }
    }
    for (const auto& [mall, plan] : world.floorplans) {
        Point2 sum = Point2::Zero();
        int food = 0;
        for (const auto& v : world.venues) {
            if (v.mall == mall && v.category.category == Category::FoodRestaurants) {
                sum += v.center;
                ++food;
            }
        }
        if (food == 0) {
            continue;
        }
        VenueRecord court;
        court.id = mall + "-foodcourt";
        court.names = {"Food Court"};
        court.category = {Category::FoodRestaurants, "food court"};
        court.mall = mall;
        court.claimed_location = sum / food;
        source.catalog.push_back(std::move(court));
    }
    return source;
}

VenueStore initial_store(const World& world, const MockLbsnSource& catalog)
{
    VenueStore store;
    for (const auto& record : catalog.catalog) {
        store.upsert(record);
    }
    const Config& cfg = world.cfg.pipeline;
    dedup_venues(store, world.brands, cfg.brand_snap_edit, cfg.dup_cluster_edit, cfg);
    return store;
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& into, const std::string& path)
{
    if (const auto it = j.find(key); it != j.end()) {
        try {
            into = it->get<T>();
        } catch (const nlohmann::json::exception&) {
            throw ParseError(path + "." + key + ": wrong type");
        }
    }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& path)
{
    if (!j.is_object()) {
        throw ParseError(path + ": expected an object");
    }
    for (const auto& [key, value] : j.items()) {
        if (known.count(key) == 0) {
            throw ParseError(path + ": unknown field '" + key + "'");
        }
    }
}

} // namespace

void to_json(nlohmann::json& j, const SimConfig& cfg)
{
    j = nlohmann::json{
        {"seed", cfg.seed},
        {"malls", cfg.malls},
        {"venues_per_mall", cfg.venues_per_mall},
        {"grid_columns", cfg.grid_columns},
        {"max_corridors", cfg.max_corridors},
        {"venue_width_m", cfg.venue_width_m},
        {"venue_depth_m", cfg.venue_depth_m},
        {"corridor_width_m", cfg.corridor_width_m},
        {"category_mix", cfg.category_mix},
        {"brand_fraction", cfg.brand_fraction},
        {"brand_pool", cfg.brand_pool},
        {"checkins_per_venue", cfg.checkins_per_venue},
        {"coverage_gap", cfg.coverage_gap},
        {"duplicate_fraction", cfg.duplicate_fraction},
        {"claimed_location_error_m", cfg.claimed_location_error_m},
        {"checkin_spread_m", cfg.checkin_spread_m},
        {"users", cfg.users},
        {"scans_per_checkin", cfg.scans_per_checkin},
        {"trace_checkins", cfg.trace_checkins},
        {"sound_prob", cfg.sound_prob},
        {"color_prob", cfg.color_prob},
        {"magnetic_prob", cfg.magnetic_prob},
        {"image_prob", cfg.image_prob},
        {"ocr_prob", cfg.ocr_prob},
        {"radio",
         {{"tx_power_dbm", cfg.radio.tx_power_dbm},
          {"path_loss_exponent", cfg.radio.path_loss_exponent},
          {"wall_loss_db", cfg.radio.wall_loss_db},
          {"sensitivity_dbm", cfg.radio.sensitivity_dbm},
          {"aps_per_venue", cfg.radio.aps_per_venue},
          {"ap_height_m", cfg.radio.ap_height_m},
          {"storefront_loss_db", cfg.radio.storefront_loss_db}}},
        {"noise",
         {{"ap_dropout", cfg.noise.ap_dropout},
          {"rss_jitter_db", cfg.noise.rss_jitter_db},
          {"location_error_m", cfg.noise.location_error_m},
          {"fake_checkin_prob", cfg.noise.fake_checkin_prob},
          {"corridor_fake_fraction", cfg.noise.corridor_fake_fraction},
          {"ssid_corruption_edits", cfg.noise.ssid_corruption_edits}}},
        {"pipeline", cfg.pipeline},
    };
}

void from_json(const nlohmann::json& j, SimConfig& cfg)
{
    reject_unknown(j,
                   {"seed", "malls", "venues_per_mall", "grid_columns", "max_corridors", "venue_width_m",
                    "venue_depth_m", "corridor_width_m", "category_mix", "brand_fraction", "brand_pool",
                    "checkins_per_venue", "coverage_gap", "duplicate_fraction", "claimed_location_error_m", "checkin_spread_m", "users",
                    "scans_per_checkin", "trace_checkins", "sound_prob", "color_prob", "magnetic_prob", "image_prob",
                    "ocr_prob", "radio", "noise", "pipeline"},
                   "config");
    read(j, "seed", cfg.seed, "config");
    read(j, "malls", cfg.malls, "config");
    read(j, "venues_per_mall", cfg.venues_per_mall, "config");
    read(j, "grid_columns", cfg.grid_columns, "config");
    read(j, "max_corridors", cfg.max_corridors, "config");
    read(j, "venue_width_m", cfg.venue_width_m, "config");
    read(j, "venue_depth_m", cfg.venue_depth_m, "config");
    read(j, "corridor_width_m", cfg.corridor_width_m, "config");
    read(j, "category_mix", cfg.category_mix, "config");
    read(j, "brand_fraction", cfg.brand_fraction, "config");
    read(j, "brand_pool", cfg.brand_pool, "config");
    read(j, "checkins_per_venue", cfg.checkins_per_venue, "config");
    read(j, "coverage_gap", cfg.coverage_gap, "config");
    read(j, "duplicate_fraction", cfg.duplicate_fraction, "config");
    read(j, "claimed_location_error_m", cfg.claimed_location_error_m, "config");
    read(j, "checkin_spread_m", cfg.checkin_spread_m, "config");
    read(j, "users", cfg.users, "config");
    read(j, "scans_per_checkin", cfg.scans_per_checkin, "config");
    read(j, "trace_checkins", cfg.trace_checkins, "config");
    read(j, "sound_prob", cfg.sound_prob, "config");
    read(j, "color_prob", cfg.color_prob, "config");
    read(j, "magnetic_prob", cfg.magnetic_prob, "config");
    read(j, "image_prob", cfg.image_prob, "config");
    read(j, "ocr_prob", cfg.ocr_prob, "config");
    if (const auto it = j.find("radio"); it != j.end()) {
        reject_unknown(*it, {"tx_power_dbm", "path_loss_exponent", "wall_loss_db", "sensitivity_dbm", "aps_per_venue",
                        "ap_height_m", "storefront_loss_db"},
                       "config.radio");
        read(*it, "tx_power_dbm", cfg.radio.tx_power_dbm, "config.radio");
        read(*it, "path_loss_exponent", cfg.radio.path_loss_exponent, "config.radio");
        read(*it, "wall_loss_db", cfg.radio.wall_loss_db, "config.radio");
        read(*it, "sensitivity_dbm", cfg.radio.sensitivity_dbm, "config.radio");
        read(*it, "aps_per_venue", cfg.radio.aps_per_venue, "config.radio");
        read(*it, "ap_height_m", cfg.radio.ap_height_m, "config.radio");
        read(*it, "storefront_loss_db", cfg.radio.storefront_loss_db, "config.radio");
    }
    if (const auto it = j.find("noise"); it != j.end()) {
        reject_unknown(*it,
                       {"ap_dropout", "rss_jitter_db", "location_error_m", "fake_checkin_prob", "corridor_fake_fraction",
                        "ssid_corruption_edits"},
                       "config.noise");
        read(*it, "ap_dropout", cfg.noise.ap_dropout, "config.noise");
        read(*it, "rss_jitter_db", cfg.noise.rss_jitter_db, "config.noise");
        read(*it, "location_error_m", cfg.noise.location_error_m, "config.noise");
        read(*it, "fake_checkin_prob", cfg.noise.fake_checkin_prob, "config.noise");
        read(*it, "corridor_fake_fraction", cfg.noise.corridor_fake_fraction, "config.noise");
        read(*it, "ssid_corruption_edits", cfg.noise.ssid_corruption_edits, "config.noise");
    }
    if (const auto it = j.find("pipeline"); it != j.end()) {
        cfg.pipeline = it->get<Config>();
    }
    try {
        cfg.validate();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
}

SimConfig load_sim_config(const std::filesystem::path& path)
{
    const std::string text = json_io::read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        json_io::parse_document(text, path.string());  // rethrows with line and column
        throw ParseError(path.string() + ": " + e.what());
    }
    return j.get<SimConfig>();
}

} // namespace venuesense::sim
