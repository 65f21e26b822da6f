#include "doctest.h"

#include "support/fixtures.hpp"
#include "venuesense/coverage.hpp"
#include "venuesense/random.hpp"

#include <algorithm>
#include <set>

using namespace venuesense;

namespace {

CheckInObservation with_ssid(const std::string& ssid)
{
    auto obs = fx::observation({fx::scan({{"A", -40}})});
    obs.text.ssid_strongest = ssid;
    return obs;
}

CheckInObservation branded(std::set<std::string> ocr, VistermBag visterms)
{
    auto obs = fx::observation({fx::scan({{"A", -40}})});
    obs.text.ocr_terms = std::move(ocr);
    obs.text.visterms = std::move(visterms);
    return obs;
}

BrandIndex index_of(std::initializer_list<std::pair<const char*, CheckInObservation>> brands)
{
    BrandIndex index;
    for (const auto& [name, obs] : brands) {
        index.add_entry(name, {std::string(name) + "-1", "m", {}, logical_part(obs)});
    }
    return index;
}

std::string random_word(Rng& rng, std::size_t len)
{
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
        s += char('a' + rng.index(26));
    }
    return s;
}

// One random insertion, deletion or substitution.
std::string one_edit(Rng& rng, std::string s)
{
    const std::size_t at = rng.index(s.size());
    switch (rng.index(3)) {
    case 0:
        s.insert(s.begin() + long(at), char('a' + rng.index(26)));
        break;
    case 1:
        s.erase(s.begin() + long(at));
        break;
    default:
        s[at] = char('a' + rng.index(26));
    }
    return s;
}

} // namespace

TEST_SUITE("coverage")
{
    TEST_CASE("brand list parsing")
    {
        const auto brands = parse_brand_list("# malls of the east\nZara\n\n  H&M \r\n#Uniqlo\nCafe Roma\n");
        CHECK(brands == std::vector<std::string>{"Zara", "H&M", "Cafe Roma"});
        CHECK(parse_brand_list("").empty());
    }

    TEST_CASE("brand index folds case and skips pending venues")
    {
        VenueStore store;
        auto a = fx::venue("a", {0, 0});
        a.brand = "ZARA";
        a.category.category = Category::ClothingFashion;
        auto b = fx::venue("b", {5, 0});
        b.brand = "Bata";
        auto pending = fx::venue("p", {9, 0});
        pending.brand = "Bata";
        pending.pending_naming = true;
        store.upsert(a);
        store.upsert(b);
        store.upsert(pending);
        const std::vector<std::string> listed{"Zara", "Uniqlo"};
        const auto index = build_brand_index(store, listed);
        CHECK(index.brands.size() == 3);
        REQUIRE(index.find("zara") != nullptr);
        CHECK(index.find("zara")->name == "Zara");
        CHECK(index.find("Zara")->entries.size() == 1);
        CHECK(index.find("zara")->entries[0].category.category == Category::ClothingFashion);
        CHECK(index.find("bata")->entries.size() == 1);
        CHECK(index.find("uniqlo")->entries.empty());
        CHECK(index.find("nike") == nullptr);
    }

    TEST_CASE("naming by ssid")
    {
        BrandIndex brands;
        for (const char* b : {"Starbucks", "Zara", "Bata", "Cafe Roma"}) {
            brands.add_brand(b);
        }
        CHECK(predict_name_by_ssid(with_ssid("Starbucks"), brands, 2) == "Starbucks");
        CHECK(predict_name_by_ssid(with_ssid("STARBUCKS-Guest"), brands, 2) == std::nullopt);
        CHECK(predict_name_by_ssid(with_ssid("Starbuks"), brands, 2) == "Starbucks");
        CHECK(predict_name_by_ssid(with_ssid("CafeRoma"), brands, 2) == "Cafe Roma");
        CHECK(predict_name_by_ssid(with_ssid("CafeRoma"), brands, 0) == std::nullopt);
        // "Zata" is one edit from both Zara and Bata.
        CHECK(predict_name_by_ssid(with_ssid("Zata"), brands, 2) == std::nullopt);
        CHECK(predict_name_by_ssid(fx::observation({fx::scan({{"A", -40}})}), brands, 2) == std::nullopt);
        CHECK(predict_name_by_ssid(with_ssid("Zara"), BrandIndex{}, 2) == std::nullopt);
    }

    TEST_CASE("one-edit ssid corruption is recovered")
    {
        Rng rng(71);
        for (int round = 0; round < 50; ++round) {
            // Brand names at least five edits apart, so one edit cannot tie.
            std::vector<std::string> names;
            while (names.size() < 20) {
                const auto w = random_word(rng, 6 + rng.index(5));
                if (std::all_of(names.begin(), names.end(), [&](const auto& n) { return edit_distance(n, w) >= 5; })) {
                    names.push_back(w);
                }
            }
            BrandIndex brands;
            for (const auto& n : names) {
                brands.add_brand(n);
            }
            for (const auto& n : names) {
                CHECK(predict_name_by_ssid(with_ssid(one_edit(rng, n)), brands, 2) == n);
            }
        }
    }

    TEST_CASE("logical kernels")
    {
        const auto obs = branded({"dress", "jeans"}, {{"w1", 3}});
        const auto self = logical_kernels(obs, logical_part(obs), Config{});
        CHECK(self.mobility == 1.0);
        CHECK(self.ocr == 1.0);
        CHECK(self.visterm == doctest::Approx(1.0));
        CHECK_FALSE(self.sound.has_value());
        CHECK_FALSE(self.color.has_value());

        const auto other = logical_kernels(branded({"dress", "latte"}, {{"w2", 1}}), logical_part(obs), Config{});
        CHECK(other.ocr == 0.5);
        CHECK(other.visterm == 0.0);

        LogicalFingerprint empty;
        const auto none = logical_kernels(obs, empty, Config{});
        CHECK_FALSE(none.mobility.has_value());
        CHECK_FALSE(none.ocr.has_value());
        CHECK_FALSE(none.visterm.has_value());
    }

    TEST_CASE("logical score is a renormalized weighted mean")
    {
        RankerWeights w;
        w.weights = {{Ranker::Mobility, 0.1}, {Ranker::Ocr, 0.3}, {Ranker::Wifi, 0.6}};
        LogicalKernels k;
        k.mobility = 1.0;
        k.ocr = 0.2;
        CHECK(logical_score(k, w) == doctest::Approx((0.1 * 1.0 + 0.3 * 0.2) / 0.4));
        CHECK(logical_score(LogicalKernels{}, w) == 0.0);
        k.visterm = 0.5;  // no weight for images: contributes nothing
        CHECK(logical_score(k, w) == doctest::Approx((0.1 * 1.0 + 0.3 * 0.2) / 0.4));

        Rng rng(72);
        for (int round = 0; round < 500; ++round) {
            LogicalKernels r;
            for (auto* slot : {&r.mobility, &r.sound, &r.color, &r.ocr, &r.visterm}) {
                if (rng.bernoulli(0.6)) {
                    *slot = rng.uniform();
                }
            }
            RankerWeights rw;
            for (const auto ranker : kAllRankers) {
                rw.weights[ranker] = rng.bernoulli(0.2) ? 0.0 : rng.uniform();
            }
            const double s = logical_score(r, rw);
            double lo = 1.0, hi = 0.0;
            bool any = false;
            for (const auto* slot : {&r.mobility, &r.sound, &r.color, &r.ocr, &r.visterm}) {
                if (slot->has_value()) {
                    lo = std::min(lo, **slot);
                    hi = std::max(hi, **slot);
                    any = true;
                }
            }
            if (any) {
                CHECK(s >= lo - 1e-12);
                CHECK(s <= hi + 1e-12);
            } else {
                CHECK(s == 0.0);
            }
        }
    }

    TEST_CASE("naming by logical fingerprint")
    {
        const auto zara = branded({"dress", "jeans"}, {{"w1", 3}});
        const auto roma = branded({"espresso", "latte"}, {{"w9", 2}});
        const auto brands = index_of({{"Zara", zara}, {"Roma", roma}});
        const auto weights = RankerWeights::equal(Config{});

        const auto hit = predict_name_by_logical_fingerprint(zara, brands, weights, 0.6);
        REQUIRE(hit.has_value());
        CHECK(hit->brand == "Zara");
        CHECK(hit->score == doctest::Approx(1.0));

        // Only the shared mobility kernel matches: 0.5 for both brands.
        CHECK_FALSE(predict_name_by_logical_fingerprint(branded({"socks"}, {}), brands, weights, 0.6).has_value());
        CHECK_FALSE(predict_name_by_logical_fingerprint(branded({"socks"}, {}), brands, weights, 0.1).has_value());

        const auto twins = index_of({{"Zara", zara}, {"Zara Home", zara}});
        CHECK_FALSE(predict_name_by_logical_fingerprint(zara, twins, weights, 0.1).has_value());
        CHECK_FALSE(predict_name_by_logical_fingerprint(zara, BrandIndex{}, weights, 0.1).has_value());
    }

    TEST_CASE("dedup snaps brands and folds duplicates")
    {
        VenueStore store;
        store.upsert(fx::venue("v1", {0, 0}, fx::fractions({{"A", 1}}), "m"));
        store.edit("v1").names = {"Starbuks"};
        store.upsert(fx::venue("v2", {5, 0}, fx::fractions({{"B", 1}}), "m"));
        store.edit("v2").names = {"Joe's Diner"};
        store.upsert(fx::venue("v3", {9, 0}, fx::fractions({{"C", 1}}), "m"));
        store.edit("v3").names = {"Joes Diner"};
        store.edit("v3").tips = {"good fries"};
        store.upsert(fx::venue("v4", {9, 0}, {}, "other"));
        store.edit("v4").names = {"Joes Diner"};
        const std::vector<std::string> brands{"Starbucks"};

        const auto report = dedup_venues(store, brands, 2, 2);
        REQUIRE(report.renames.size() == 1);
        CHECK(report.renames[0].venue == "v1");
        CHECK(report.renames[0].to == "Starbucks");
        CHECK(store.get("v1").names == std::vector<std::string>{"Starbucks", "Starbuks"});
        CHECK(store.get("v1").brand == "Starbucks");

        REQUIRE(report.merges.size() == 1);
        CHECK(report.merges[0].canonical == "v2");
        CHECK(report.merges[0].duplicate == "v3");
        CHECK_FALSE(store.contains("v3"));
        CHECK(store.get("v2").names == std::vector<std::string>{"Joe's Diner", "Joes Diner"});
        CHECK(store.get("v2").tips == std::vector<std::string>{"good fries"});
        CHECK(store.get("v2").fingerprint.wifi.fractions.count("C") == 1);
        CHECK(store.contains("v4"));

        CHECK(dedup_venues(store, brands, 2, 2).empty());
    }

    TEST_CASE("dedup keeps every name and is idempotent")
    {
        Rng rng(73);
        const std::vector<std::string> brands{"Zara", "Bata", "Starbucks"};
        for (int round = 0; round < 100; ++round) {
            VenueStore store;
            std::multiset<std::string> names;
            const std::vector<std::string> stems{"zara", "bata", "starbuck", "mango", "diner", "noodle"};
            const std::size_t n = 1 + rng.index(12);
            for (std::size_t i = 0; i < n; ++i) {
                auto v = fx::venue("v" + std::to_string(10 + i), {double(i), 0}, {}, rng.bernoulli(0.5) ? "m" : "n");
                v.names = {rng.bernoulli(0.5) ? one_edit(rng, stems[rng.index(stems.size())])
                                              : stems[rng.index(stems.size())]};
                names.insert(v.names[0]);
                store.upsert(v);
            }
            const auto report = dedup_venues(store, brands, 2, 2);
            CHECK(store.size() == n - report.merges.size());
            std::set<std::string> kept;
            for (const auto& [id, v] : store.venues()) {
                kept.insert(v.names.begin(), v.names.end());
            }
            for (const auto& name : names) {
                CHECK(kept.count(name) == 1);
            }
            CHECK(dedup_venues(store, brands, 2, 2).empty());
        }
    }

    TEST_CASE("extending coverage")
    {
        VenueStore store;
        auto branch = fx::venue("zara-1", {0, 0}, {}, "m");
        branch.brand = "Zara";
        branch.category.category = Category::ClothingFashion;
        const auto zara_obs = branded({"dress", "jeans"}, {{"w1", 3}});
        branch.fingerprint = fingerprint_from_observation(zara_obs);
        store.upsert(branch);
        const std::vector<std::string> listed{"Zara", "Bata"};
        const auto brands = build_brand_index(store, listed);
        const Config cfg;
        const auto weights = RankerWeights::equal(cfg);

        auto by_ssid = with_ssid("Bata ");
        by_ssid.location.mall = "m";
        const auto a = extend_coverage(by_ssid, store, brands, weights, cfg);
        CHECK(a.source == NamingSource::Ssid);
        CHECK(a.record.name() == "Bata");
        CHECK(a.record.brand == "Bata");
        CHECK(a.record.id == "m-new-1");
        CHECK_FALSE(store.contains(a.record.id));
        REQUIRE(a.record.checkin_log.size() == 1);
        CHECK(a.record.checkin_log[0].venue == a.record.id);
        CHECK(a.record.fingerprint.wifi.fractions.count("A") == 1);

        const auto b = extend_coverage(zara_obs, store, brands, weights, cfg);
        CHECK(b.source == NamingSource::LogicalFingerprint);
        CHECK(b.record.name() == "Zara");
        CHECK(b.record.category.category == Category::ClothingFashion);
        CHECK(b.record.id == "venue-new-1");

        const auto c = extend_coverage(branded({"socks"}, {}), store, brands, weights, cfg);
        CHECK(c.source == NamingSource::Unnamed);
        CHECK(c.record.pending_naming);
        CHECK_FALSE(c.record.brand.has_value());
        CHECK(to_string(c.source) == "unnamed");
    }
}
