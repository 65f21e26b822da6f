#include "doctest.h"

#include "venuesense/json_io.hpp"
#include "venuesense/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <unistd.h>

using namespace venuesense;
using namespace venuesense::sim;

namespace {

SimConfig small(std::uint64_t seed = 7, int venues = 40)
{
    SimConfig cfg;
    cfg.seed = seed;
    cfg.venues_per_mall = venues;
    cfg.users = 20;
    return cfg;
}

NoiseModel quiet()
{
    NoiseModel n;
    n.ap_dropout = 0.0;
    n.rss_jitter_db = 0.0;
    n.location_error_m = 0.0;
    n.fake_checkin_prob = 0.0;
    return n;
}

bool inside(const VenueTruth& v, const Point2& p)
{
    return p.x() >= v.lo.x() && p.x() <= v.hi.x() && p.y() >= v.lo.y() && p.y() <= v.hi.y();
}

} // namespace

TEST_SUITE("simharness")
{
    TEST_CASE("worlds are reproducible from the seed")
    {
        const auto a = generate_world(small(7));
        const auto b = generate_world(small(7));
        const auto c = generate_world(small(8));
        CHECK(ground_truth_document(a) == ground_truth_document(b));
        CHECK(ground_truth_document(a) != ground_truth_document(c));
        CHECK(trace_line(simulate_checkins(a, 5, NoiseModel{}, 3)[4]) ==
              trace_line(simulate_checkins(b, 5, NoiseModel{}, 3)[4]));
    }

    TEST_CASE("world layout")
    {
        auto cfg = small(7, 100);
        cfg.malls = 2;
        const auto world = generate_world(cfg);
        CHECK(world.venues.size() == 200);
        CHECK(world.floorplans.size() == 2);
        std::set<std::string> macs;
        for (const auto& v : world.venues) {
            CHECK(inside(v, v.center));
            CHECK(world.venue(v.id).id == v.id);
            REQUIRE(world.floorplans.count(v.mall) == 1);
            const auto& plan = world.floorplans.at(v.mall);
            REQUIRE(plan.polygon(v.polygon) != nullptr);
            CHECK(point_in_polygon(v.center, plan.polygon(v.polygon)->vertices));
            CHECK(plan.ground_truth.at(v.polygon) == v.id);
            CHECK(v.aps.size() == std::size_t(cfg.radio.aps_per_venue));
            for (const auto& ap : v.aps) {
                CHECK(macs.insert(ap.mac).second);
            }
        }
        for (const auto& [mall, plan] : world.floorplans) {
            CHECK_NOTHROW(plan.validate());
            CHECK(plan.labels.empty());
        }
        CHECK_THROWS_AS(world.venue("nope"), NotFoundError);

        auto cramped = small();
        cramped.max_corridors = 1;
        CHECK_THROWS(generate_world(cramped));
    }

    TEST_CASE("coverage gap and brand share")
    {
        for (const std::uint64_t seed : {1u, 2u, 3u}) {
            const auto world = generate_world(small(seed, 100));
            const auto uncovered = std::count_if(world.venues.begin(), world.venues.end(),
                                                 [](const auto& v) { return !v.covered; });
            CHECK(std::abs(double(uncovered) - 39.0) <= 1.0);
            const auto branded = std::count_if(world.venues.begin(), world.venues.end(),
                                               [](const auto& v) { return v.brand.has_value(); });
            // 82.3% of 100, well inside four binomial standard deviations.
            CHECK(std::abs(double(branded) - 82.3) <= 4 * std::sqrt(100 * 0.823 * 0.177));
        }
    }

    TEST_CASE("positions stay inside the venue")
    {
        const auto world = generate_world(small());
        Rng rng(91);
        for (int i = 0; i < 2000; ++i) {
            const auto& v = world.venues[rng.index(world.venues.size())];
            const double spread = rng.bernoulli(0.5) ? 0.0 : rng.uniform(0.5, 20.0);
            const Point2 p = random_position(v, spread, rng);
            CHECK(p.x() >= v.lo.x() + 0.5 - 1e-9);
            CHECK(p.x() <= v.hi.x() - 0.5 + 1e-9);
            CHECK(p.y() >= v.lo.y() + 0.5 - 1e-9);
            CHECK(p.y() <= v.hi.y() - 0.5 + 1e-9);
        }
    }

    TEST_CASE("fake check-ins follow p_e")
    {
        const auto world = generate_world(small());
        NoiseModel noise;
        noise.fake_checkin_prob = 0.3;
        const int n = 2000;
        const auto trace = simulate_checkins(world, n, noise, 5);
        REQUIRE(trace.size() == std::size_t(n));
        const auto fakes = std::count_if(trace.begin(), trace.end(), [](const auto& e) { return e.fake; });
        CHECK(std::abs(double(fakes) - 0.3 * n) <= 4 * std::sqrt(n * 0.3 * 0.7));
        std::set<std::string> ids;
        for (const auto& e : trace) {
            CHECK(ids.insert(e.obs.checkin_id).second);
            CHECK(world.venue(e.claimed_venue).mall == world.venue(e.true_venue).mall);
            if (!e.fake) {
                CHECK(e.true_venue == e.claimed_venue);
            }
            CHECK_NOTHROW(e.obs.validate());
        }

        noise.fake_checkin_prob = 0.0;
        const auto honest = simulate_checkins(world, 300, noise, 5);
        CHECK(std::none_of(honest.begin(), honest.end(), [](const auto& e) { return e.fake; }));
    }

    TEST_CASE("claims per venue")
    {
        const auto world = generate_world(small());
        const auto trace = simulate_claims_per_venue(world, 3, NoiseModel{}, 9);
        CHECK(trace.size() == 3 * world.venues.size());
        std::map<VenueId, int> claims;
        for (const auto& e : trace) {
            ++claims[e.claimed_venue];
        }
        CHECK(claims.size() == world.venues.size());
        for (const auto& [id, c] : claims) {
            CHECK(c == 3);
        }
    }

    TEST_CASE("catalog and initial store")
    {
        const auto world = generate_world(small(7, 100));
        const auto catalog = build_catalog(world);
        CHECK(catalog.coverage_ratio == doctest::Approx(0.61));
        std::set<VenueId> listed;
        for (const auto& r : catalog.catalog) {
            listed.insert(r.id);
        }
        for (const auto& v : world.venues) {
            CHECK(listed.count(v.id) == (v.covered ? 1u : 0u));
        }
        CHECK(listed.count(world.venues.front().mall + "-foodcourt") == 1);

        const auto store = initial_store(world, catalog);
        for (const auto& [id, r] : store.venues()) {
            // Misspelled duplicates fold back into the original.
            CHECK(id.find("-dup") == std::string::npos);
        }
        for (const auto& v : world.venues) {
            if (v.covered) {
                REQUIRE(store.contains(v.id));
                CHECK(store.get(v.id).checkin_log.size() >= std::size_t(world.cfg.checkins_per_venue));
            }
        }
        CHECK(build_catalog(world).catalog == catalog.catalog);
    }

    TEST_CASE("noiseless replay ranks every covered venue first")
    {
        auto cfg = small(7, 40);
        cfg.noise = quiet();
        cfg.claimed_location_error_m = 0.0;
        cfg.coverage_gap = 0.0;
        const auto world = generate_world(cfg);
        const auto trace = simulate_checkins(world, 150, quiet(), 4);
        auto store = initial_store(world, build_catalog(world));
        auto plans = world.floorplans;
        ReplayOptions options;
        options.cutoffs_db = {14.0};
        options.max_edits = {2};
        const auto report = replay(world, trace, store, plans, options);
        CHECK(report.checkins == 150);
        CHECK(report.ranked > 0);
        CHECK(report.top1_recall == 1.0);
    }

    TEST_CASE("replay metrics agree with each other")
    {
        const auto world = generate_world(small(11, 40));
        NoiseModel noise;
        noise.fake_checkin_prob = 0.1;
        const auto trace = simulate_checkins(world, 200, noise, 6);
        auto store = initial_store(world, build_catalog(world));
        auto plans = world.floorplans;
        ReplayOptions options;
        options.cutoffs_db = {12.0, 16.0};
        options.max_edits = {0, 2};
        const auto r = replay(world, trace, store, plans, options);

        CHECK(r.checkins == trace.size());
        // Known venues flagged new are scored too, at the bottom of the list.
        CHECK(r.actual_ranks.size() >= r.ranked);
        CHECK(r.ranked + r.flagged_new <= r.checkins);
        REQUIRE(r.rank_cdf.size() == 20);
        CHECK(std::is_sorted(r.rank_cdf.begin(), r.rank_cdf.end()));
        CHECK(r.top1_recall == r.rank_cdf[0]);
        CHECK(r.top5_recall == r.rank_cdf[4]);
        const auto hits = std::count(r.actual_ranks.begin(), r.actual_ranks.end(), std::size_t{0});
        CHECK(r.top1_recall == doctest::Approx(double(hits) / double(r.actual_ranks.size())));
        CHECK(std::is_sorted(r.distance_errors.begin(), r.distance_errors.end()));
        CHECK(std::abs(r.final_weights.sum() - 1.0) < 1e-9);
        for (const auto& [ranker, s] : r.rankers) {
            CHECK(s.top1 <= s.top5);
            CHECK(s.top5 <= s.participated);
        }
        CHECK(r.new_venue.size() == options.thresholds.size());
        for (std::size_t i = 1; i < r.new_venue.size(); ++i) {
            // A higher threshold flags more check-ins as new.
            CHECK(r.new_venue[i].tp_rate >= r.new_venue[i - 1].tp_rate);
            CHECK(r.new_venue[i].fp_rate >= r.new_venue[i - 1].fp_rate);
        }
        CHECK(r.detection.size() == 2);
        CHECK(r.coverage.size() == 2);
        for (const auto& p : r.coverage) {
            CHECK(p.recall >= 0.0);
            CHECK(p.recall <= 1.0);
        }
        CHECK(r.labeling.oracle >= 0.0);
        CHECK(r.labeling.oracle <= 1.0);

        const auto json = metrics_documents(r, false);
        const auto csv = metrics_documents(r, true);
        for (const char* family : {"rank", "distance", "rankers", "new_venue", "integrity", "coverage", "labeling"}) {
            REQUIRE(json.count(std::string(family) + ".json") == 1);
            CHECK(csv.count(std::string(family) + ".csv") == 1);
        }
        const auto rank = Json::parse(json.at("rank.json"));
        CHECK(rank["top1_recall"].get<double>() == r.top1_recall);
    }

    TEST_CASE("quantiles use the nearest rank")
    {
        const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        CHECK(quantile(v, 0.5) == 5);
        CHECK(quantile(v, 0.9) == 9);
        CHECK(quantile(v, 0.0) == 1);
        CHECK(quantile(v, 1.0) == 10);
        CHECK(quantile(v, 0.95) == 10);
        CHECK(quantile({}, 0.5) == 0.0);
    }

    TEST_CASE("traces round trip")
    {
        const auto world = generate_world(small());
        NoiseModel noise;
        noise.fake_checkin_prob = 0.3;
        const auto trace = simulate_checkins(world, 40, noise, 2);
        for (const auto& e : trace) {
            const auto back = parse_trace_line(trace_line(e), "mem");
            CHECK(trace_line(back) == trace_line(e));
            CHECK(back.fake == e.fake);
            CHECK(back.true_venue == e.true_venue);
        }
        const auto path = std::filesystem::temp_directory_path() / ("venuesense-trace-" + std::to_string(::getpid()));
        save_trace(trace, path);
        const auto loaded = load_trace(path);
        REQUIRE(loaded.size() == trace.size());
        CHECK(trace_line(loaded.back()) == trace_line(trace.back()));
        std::filesystem::remove(path);
        CHECK_THROWS_AS(parse_trace_line("{\"obs\": ", "mem"), ParseError);
        CHECK_THROWS(load_trace(path));
    }

    TEST_CASE("sim config documents")
    {
        auto cfg = small(99);
        cfg.noise.fake_checkin_prob = 0.25;
        cfg.radio.wall_loss_db = 12.0;
        nlohmann::json j = cfg;
        const auto back = j.get<SimConfig>();
        CHECK(back.seed == 99);
        CHECK(back.noise.fake_checkin_prob == 0.25);
        CHECK(back.radio.wall_loss_db == 12.0);
        CHECK(nlohmann::json(back) == j);

        j["noise"]["mystery"] = 1;
        CHECK_THROWS_AS(j.get<SimConfig>(), ParseError);

        auto bad = small();
        bad.coverage_gap = 1.5;
        CHECK_THROWS(bad.validate());
        NoiseModel loud;
        loud.rss_jitter_db = -1;
        CHECK_THROWS(loud.validate());
    }
}
