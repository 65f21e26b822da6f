#include "venuesense/simharness.hpp"
#include "venuesense/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>

namespace venuesense::sim {

void NoiseModel::validate() const
{
    auto prob = [](double p, const char* name) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(std::string("noise: ") + name + " must lie in [0, 1]");
        }
    };
    prob(ap_dropout, "ap_dropout");
    prob(fake_checkin_prob, "fake_checkin_prob");
    prob(corridor_fake_fraction, "corridor_fake_fraction");
    if (!(rss_jitter_db >= 0.0) || !(location_error_m >= 0.0)) {
        throw Error("noise: standard deviations must be non-negative");
    }
    if (ssid_corruption_edits < 0) {
        throw Error("noise: ssid_corruption_edits must be non-negative");
    }
}

void SimConfig::validate() const
{
    if (malls <= 0 || venues_per_mall <= 0 || grid_columns <= 0 || max_corridors <= 0 || checkins_per_venue <= 0 ||
        users <= 0 || scans_per_checkin <= 0 || brand_pool <= 0 || radio.aps_per_venue <= 0 || trace_checkins < 0) {
        throw Error("sim: counts must be positive");
    }
    for (const double f : {brand_fraction, coverage_gap, duplicate_fraction, sound_prob, color_prob, magnetic_prob,
                           image_prob, ocr_prob}) {
        if (!(f >= 0.0 && f <= 1.0)) {
            throw Error("sim: fractions must lie in [0, 1]");
        }
    }
    double mix = 0.0;
    for (const double w : category_mix) {
        if (!(w >= 0.0)) {
            throw Error("sim: category weights must be non-negative");
        }
        mix += w;
    }
    if (!(mix > 0.0)) {
        throw Error("sim: category mix is empty");
    }
    if (!(venue_width_m > 0.0 && venue_depth_m > 0.0 && corridor_width_m > 0.0)) {
        throw Error("sim: layout dimensions must be positive");
    }
    if (!(claimed_location_error_m >= 0.0 && checkin_spread_m >= 0.0)) {
        throw Error("sim: standard deviations must be non-negative");
    }
    noise.validate();
}

const VenueTruth& World::venue(const VenueId& id) const { return venues[index_of(id)]; }

std::size_t World::index_of(const VenueId& id) const
{
    const auto it = by_id.find(id);
    if (it == by_id.end()) {
        throw NotFoundError("no simulated venue '" + id + "'");
    }
    return it->second;
}

namespace {

constexpr std::string_view kConsonants = "bcdfghklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

std::string word(Rng& rng, int syllables)
{
    std::string out;
    for (int s = 0; s < syllables; ++s) {
        out += kConsonants[rng.index(kConsonants.size())];
        out += kVowels[rng.index(kVowels.size())];
        if (rng.bernoulli(0.3)) {
            out += kConsonants[rng.index(kConsonants.size())];
        }
    }
    return out;
}

std::string capitalized(std::string s)
{
    if (!s.empty()) {
        s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    }
    return s;
}

/// Draws names until one is at least `min_gap` edits from every name taken.
std::string distinct_name(Rng& rng, std::vector<std::string>& taken, std::size_t min_gap,
                          const std::function<std::string(Rng&)>& draw)
{
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::string candidate = draw(rng);
        const bool clear = std::all_of(taken.begin(), taken.end(),
                                       [&](const std::string& t) { return edit_distance(candidate, t) >= min_gap; });
        if (clear) {
            taken.push_back(candidate);
            return candidate;
        }
    }
    throw Error("sim: could not draw enough distinct names");
}

std::string corrupt(std::string s, int edits, Rng& rng)
{
    for (int e = 0; e < edits; ++e) {
        const char letter = static_cast<char>('a' + rng.index(26));
        const auto kind = s.size() < 2 ? 0 : rng.index(3);
        const auto at = rng.index(s.size() + (kind == 0 ? 1 : 0));
        if (kind == 0) {
            s.insert(s.begin() + static_cast<std::ptrdiff_t>(at), letter);
        } else if (kind == 1) {
            s.erase(s.begin() + static_cast<std::ptrdiff_t>(at));
        } else {
            // Substitute with a different letter so the edit is real.
            char replacement = letter;
            while (std::tolower(static_cast<unsigned char>(replacement)) ==
                   std::tolower(static_cast<unsigned char>(s[at]))) {
                replacement = static_cast<char>('a' + rng.index(26));
            }
            s[at] = replacement;
        }
    }
    return s;
}

struct CategoryProfile {
    std::array<double, kVisitPeriods> visits;
    std::array<double, kActivities> activity;
    std::vector<double> duration;
    double sound_level;
    double hue_lo;
    double hue_hi;
    double light_lo;
    double light_hi;
    std::vector<std::string> subcategories;
};

const CategoryProfile& profile(Category c)
{
    static const std::array<CategoryProfile, kCategories> profiles{{
        {{0.02, 0.15, 0.40, 0.18, 0.20, 0.05},
         {0.75, 0.20, 0.05},
         {0.30, 0.50, 0.15, 0.05},
         0.45, 10, 50, 0.45, 0.7,
         {"restaurant", "cafe", "dessert shop", "fast food"}},
        {{0.01, 0.20, 0.35, 0.34, 0.08, 0.02},
         {0.10, 0.75, 0.15},
         {0.60, 0.30, 0.10},
         0.30, 0, 360, 0.3, 0.8,
         {"womens clothing", "mens clothing", "shoes", "accessories"}},
        {{0.01, 0.05, 0.20, 0.30, 0.30, 0.14},
         {0.80, 0.10, 0.10},
         {0.05, 0.15, 0.20, 0.30, 0.30},
         0.60, 230, 300, 0.1, 0.3,
         {"cinema", "arcade", "gallery"}},
        {{0.03, 0.30, 0.30, 0.27, 0.08, 0.02},
         {0.20, 0.50, 0.30},
         {0.80, 0.15, 0.05},
         0.25, 170, 220, 0.6, 0.9,
         {"electronics", "pharmacy", "bank", "bookstore", "supermarket"}},
    }};
    return profiles[static_cast<std::size_t>(c)];
}

template <std::size_t N>
std::array<double, N> perturb(const std::array<double, N>& base, Rng& rng, double spread)
{
    std::array<double, N> out{};
    double total = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        out[i] = base[i] * std::exp(rng.normal(0.0, spread));
        total += out[i];
    }
    for (auto& v : out) {
        v /= total;
    }
    return out;
}

std::vector<double> perturb(const std::vector<double>& base, Rng& rng, double spread)
{
    std::vector<double> out(base.size());
    double total = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        out[i] = base[i] * std::exp(rng.normal(0.0, spread));
        total += out[i];
    }
    for (auto& v : out) {
        v /= total;
    }
    return out;
}

std::vector<Hsl> draw_palette(const CategoryProfile& p, Rng& rng)
{
    std::vector<Hsl> palette;
    for (int i = 0; i < 4; ++i) {
        palette.emplace_back(rng.uniform(p.hue_lo, p.hue_hi), rng.uniform(0.2, 0.9),
                             rng.uniform(p.light_lo, p.light_hi));
    }
    return palette;
}

std::vector<std::string> draw_visterms(Rng& rng, std::size_t count, std::size_t vocabulary)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back("vw" + std::to_string(rng.index(vocabulary)));
    }
    return out;
}

/// Lowercase alphabetic tokens of a name.
std::vector<std::string> name_words(const std::string& name)
{
    std::vector<std::string> out;
    std::string cur;
    for (const char ch : name + " ") {
        if (std::isalpha(static_cast<unsigned char>(ch))) {
            cur += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    return out;
}

struct BrandProfile {
    std::string name;
    Category category;
    std::string subcategory;
    std::vector<Hsl> palette;
    std::vector<std::string> visterms;
    std::vector<std::string> words;
};

constexpr std::size_t kVisualVocabulary = 2000;
constexpr std::array<const char*, 5> kProviderSsids{"Vodafone-", "LinkSys_", "TP-LINK_", "Orange-", "NETGEAR"};

} // namespace

World generate_world(const SimConfig& cfg)
{
    cfg.validate();
    World world;
    world.cfg = cfg;
    Rng root(cfg.seed);
    Rng names_rng = root.fork(1);
    Rng layout_rng = root.fork(2);
    Rng profile_rng = root.fork(3);

    const int per_corridor = 2 * cfg.grid_columns;
    const int corridors = (cfg.venues_per_mall + per_corridor - 1) / per_corridor;
    if (corridors > cfg.max_corridors) {
        throw Error("sim: " + std::to_string(cfg.venues_per_mall) + " venues do not fit " +
                    std::to_string(cfg.max_corridors) + " corridors of " + std::to_string(per_corridor));
    }

    std::vector<std::string> taken;
    std::vector<BrandProfile> brands;
    for (int b = 0; b < cfg.brand_pool; ++b) {
        BrandProfile brand;
        brand.name = capitalized(distinct_name(names_rng, taken, 5, [](Rng& r) {
            return word(r, 3);
        }));
        brand.category = static_cast<Category>(profile_rng.weighted(cfg.category_mix));
        const auto& p = profile(brand.category);
        brand.subcategory = p.subcategories[profile_rng.index(p.subcategories.size())];
        brand.palette = draw_palette(p, profile_rng);
        brand.visterms = draw_visterms(profile_rng, 15, kVisualVocabulary);
        brand.words = name_words(brand.name);
        for (int w = 0; w < 4; ++w) {
            brand.words.push_back(word(profile_rng, 2));
        }
        world.brands.push_back(brand.name);
        brands.push_back(std::move(brand));
    }

    const double W = cfg.venue_width_m;
    const double D = cfg.venue_depth_m;
    const double C = cfg.corridor_width_m;
    const double pitch = 2.0 * D + C;
    std::uint64_t mac_counter = 0;
    auto next_mac = [&mac_counter]() {
        const std::uint64_t v = ++mac_counter;
        char buf[32];
        std::snprintf(buf, sizeof buf, "02:00:%02x:%02x:%02x:%02x", unsigned((v >> 24) & 0xff),
                      unsigned((v >> 16) & 0xff), unsigned((v >> 8) & 0xff), unsigned(v & 0xff));
        return std::string(buf);
    };

    for (int m = 0; m < cfg.malls; ++m) {
        const std::string mall = "m" + std::to_string(m);
        Floorplan plan;
        plan.mall = mall;
        std::vector<WalkNode> nodes;
        std::vector<WalkEdge> edges;
        auto add_node = [&](double x, double y) {
            nodes.push_back({Point2(x, y), 0});
            return nodes.size() - 1;
        };
        auto connect = [&](std::size_t a, std::size_t b) {
            edges.push_back({a, b, (nodes[a].xy - nodes[b].xy).norm()});
        };

        std::vector<std::size_t> corridor_nodes;  // per corridor, per column
        std::size_t prev_spine = 0;
        for (int k = 0; k < corridors; ++k) {
            const double y = k * pitch + D + C / 2.0;
            const std::size_t spine = add_node(C / 2.0, y);
            if (k > 0) {
                connect(prev_spine, spine);
            }
            prev_spine = spine;
            std::size_t prev = spine;
            for (int c = 0; c < cfg.grid_columns; ++c) {
                const std::size_t node = add_node(C + (c + 0.5) * W, y);
                connect(prev, node);
                corridor_nodes.push_back(node);
                prev = node;
            }
        }

        std::vector<std::size_t> covered_order(static_cast<std::size_t>(cfg.venues_per_mall));
        std::iota(covered_order.begin(), covered_order.end(), std::size_t{0});
        layout_rng.shuffle(std::span<std::size_t>(covered_order));
        const auto uncovered =
            static_cast<std::size_t>(std::llround(cfg.coverage_gap * static_cast<double>(cfg.venues_per_mall)));
        std::vector<bool> is_covered(covered_order.size(), true);
        for (std::size_t i = 0; i < uncovered; ++i) {
            is_covered[covered_order[i]] = false;
        }

        for (int i = 0; i < cfg.venues_per_mall; ++i) {
            const int k = i / per_corridor;
            const int slot = i % per_corridor;
            const bool upper = slot >= cfg.grid_columns;
            const int c = slot % cfg.grid_columns;
            const double y = k * pitch + D + C / 2.0;
            const double x0 = C + c * W;
            const double y0 = upper ? y + C / 2.0 : y - C / 2.0 - D;

            VenueTruth v;
            char idbuf[32];
            std::snprintf(idbuf, sizeof idbuf, "%s-v%04d", mall.c_str(), i);
            v.id = idbuf;
            v.mall = mall;
            v.polygon = mall + "-p" + std::to_string(i);
            v.lo = Point2(x0, y0);
            v.hi = Point2(x0 + W, y0 + D);
            v.center = (v.lo + v.hi) / 2.0;
            v.covered = is_covered[static_cast<std::size_t>(i)];
            plan.polygons.push_back(
                {v.polygon, 0, {v.lo, Point2(v.hi.x(), v.lo.y()), v.hi, Point2(v.lo.x(), v.hi.y())}});
            plan.ground_truth[v.polygon] = v.id;

            const double door_y = upper ? y + C / 2.0 : y - C / 2.0;
            v.corridor_lo = Point2(v.lo.x(), y - C / 2.0);
            v.corridor_hi = Point2(v.hi.x(), y + C / 2.0);
            const std::size_t door = add_node(v.center.x(), door_y);
            const std::size_t center = add_node(v.center.x(), v.center.y());
            connect(corridor_nodes[static_cast<std::size_t>(k * cfg.grid_columns + c)], door);
            connect(door, center);

            const BrandProfile* brand = nullptr;
            if (profile_rng.bernoulli(cfg.brand_fraction)) {
                brand = &brands[profile_rng.index(brands.size())];
            }
            if (brand != nullptr) {
                v.brand = brand->name;
                v.name = brand->name;
                v.category = {brand->category, brand->subcategory};
            } else {
                v.category.category = static_cast<Category>(profile_rng.weighted(cfg.category_mix));
                const auto& p = profile(v.category.category);
                v.category.subcategory = p.subcategories[profile_rng.index(p.subcategories.size())];
                const std::string suffix = capitalized(name_words(v.category.subcategory).back());
                v.name = distinct_name(names_rng, taken, 5,
                                       [&](Rng& r) { return capitalized(word(r, 2 + int(r.index(2)))) + " " + suffix; });
            }

            const auto& p = profile(v.category.category);
            v.visit_dist = perturb(p.visits, profile_rng, 0.6);
            v.activity_dist = perturb(p.activity, profile_rng, 0.6);
            v.duration_dist = perturb(p.duration, profile_rng, 0.6);
            v.sound_level = std::clamp(p.sound_level + profile_rng.normal(0.0, 0.1), 0.05, 0.9);
            v.sound_spread = profile_rng.uniform(0.04, 0.12);
            if (brand != nullptr) {
                for (const auto& colour : brand->palette) {
                    v.palette.push_back(colour + Hsl(profile_rng.normal(0.0, 3.0), 0.0, 0.0));
                }
                v.visterms = brand->visterms;
                v.words = brand->words;
            } else {
                v.palette = draw_palette(p, profile_rng);
                v.words = name_words(v.name);
                v.words.push_back(word(profile_rng, 2));
                v.words.push_back(word(profile_rng, 3));
            }
            for (auto& colour : v.palette) {
                colour[0] = std::clamp(colour[0], 0.0, 360.0);
            }
            const auto own = draw_visterms(profile_rng, brand != nullptr ? 10 : 25, kVisualVocabulary);
            v.visterms.insert(v.visterms.end(), own.begin(), own.end());
            v.magnetic_amplitude = Eigen::Vector3d(profile_rng.uniform(0.5, 6.0), profile_rng.uniform(0.5, 6.0),
                                                   profile_rng.uniform(0.5, 6.0));
            v.magnetic_frequency = profile_rng.uniform(1.0, 12.0);

            // AP 0 sits near the middle and broadcasts the venue's own name.
            const Point2 margin(1.0, 1.0);
            for (int a = 0; a < cfg.radio.aps_per_venue; ++a) {
                AccessPoint ap;
                ap.mac = next_mac();
                if (a == 0) {
                    ap.ssid = corrupt(v.name, cfg.noise.ssid_corruption_edits, layout_rng);
                    ap.xy = v.center + Point2(layout_rng.uniform(-1.0, 1.0), layout_rng.uniform(-1.0, 1.0));
                } else {
                    ap.ssid = std::string(kProviderSsids[layout_rng.index(kProviderSsids.size())]) +
                              std::to_string(layout_rng.index(10000));
                    ap.xy = Point2(layout_rng.uniform(v.lo.x() + margin.x(), v.hi.x() - margin.x()),
                                   layout_rng.uniform(v.lo.y() + margin.y(), v.hi.y() - margin.y()));
                }
                v.aps.push_back(std::move(ap));
            }
            world.by_id[v.id] = world.venues.size();
            world.venues.push_back(std::move(v));
        }
        plan.walk_graph = WalkGraph(std::move(nodes), std::move(edges));
        plan.validate();
        world.floorplans.emplace(mall, std::move(plan));
    }
    return world;
}

} // namespace venuesense::sim
