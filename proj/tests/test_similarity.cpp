#include "doctest.h"

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "venuesense/similarity.hpp"
#include "venuesense/store.hpp"

#include <cmath>
#include <numbers>

using namespace venuesense;

TEST_SUITE("similarity")
{
    TEST_CASE("wifi similarity hand cases")
    {
        const auto abc = fx::fractions({{"A", 1.0}, {"B", 1.0}, {"C", 1.0}});
        CHECK(wifi_similarity(abc, abc).value == 2.0);
        CHECK(wifi_similarity(fx::fractions({{"A", 1.0}}), fx::fractions({{"B", 1.0}})).value == 0.0);
        CHECK(wifi_similarity(fx::fractions({{"A", 1.0}}), fx::fractions({{"A", 0.5}})).value == 0.75);
        CHECK(wifi_similarity({}, {}).value == 0.0);
        CHECK(wifi_similarity(abc, {}).value == 0.0);
        CHECK(wifi_similarity(abc, abc).polarity == Polarity::Similarity);
    }

    TEST_CASE("wifi similarity matches the direct formula, is symmetric and bounded")
    {
        Rng rng(1);
        for (int round = 0; round < 2000; ++round) {
            const auto a = rng.bernoulli(0.5) ? gen::fingerprint(rng, 8) : gen::continuous_fingerprint(rng, 8);
            const auto b = rng.bernoulli(0.5) ? gen::fingerprint(rng, 8) : gen::continuous_fingerprint(rng, 8);
            const double s = wifi_similarity(a, b).value;
            CHECK(s == doctest::Approx(oracle::reference_similarity(a, b)).epsilon(1e-12));
            CHECK(s == wifi_similarity(b, a).value);
            CHECK(s >= 0.0);
            CHECK(s <= 2.0);
        }
    }

    TEST_CASE("wifi similarity reaches 2 only for identical all-ones fingerprints")
    {
        Rng rng(2);
        for (int round = 0; round < 1000; ++round) {
            const auto a = gen::fingerprint(rng, 5, false);
            const auto b = rng.bernoulli(0.3) ? a : gen::fingerprint(rng, 5, false);
            bool all_ones = true;
            for (const auto& [m, f] : a.fractions) {
                all_ones = all_ones && f == 1.0;
            }
            const bool top = wifi_similarity(a, b).value == 2.0;
            CHECK(top == (a.fractions == b.fractions && all_ones));
        }
    }

    TEST_CASE("wifi similarity ignores mac names")
    {
        Rng rng(3);
        for (int round = 0; round < 300; ++round) {
            const auto a = gen::continuous_fingerprint(rng, 6);
            const auto b = gen::continuous_fingerprint(rng, 6);
            // Relabel with a reversed naming so the map order changes too.
            auto rename = [](const WifiFingerprint& fp) {
                WifiFingerprint out;
                for (const auto& [m, f] : fp.fractions) {
                    out.fractions["zz-" + std::string(m.rbegin(), m.rend())] = f;
                }
                return out;
            };
            CHECK(wifi_similarity(a, b).value == doctest::Approx(wifi_similarity(rename(a), rename(b)).value));
        }
    }

    TEST_CASE("mobility similarity")
    {
        MobilityFingerprint fp;
        fp.add({VisitPeriod::EarlyEvening, Activity::Stationary, 1});
        fp.add({VisitPeriod::LateEvening, Activity::Stationary, 1});
        const MobilityObservation q{VisitPeriod::EarlyEvening, Activity::Stationary, 1};
        CHECK(mobility_similarity(q, fp, 0.0).value == 0.5);

        MobilityFingerprint sure;
        sure.add(q);
        CHECK(mobility_similarity(q, sure, 0.0).value == 1.0);
        CHECK(mobility_similarity({VisitPeriod::EarlyMorning, Activity::Stationary, 1}, sure, 0.0).value == 0.0);
        CHECK(mobility_similarity({VisitPeriod::EarlyEvening, Activity::Stationary, 5}, sure, 0.0).value == 0.0);
    }

    TEST_CASE("smoothed mobility similarity is strictly positive and at most one")
    {
        Rng rng(4);
        for (int round = 0; round < 500; ++round) {
            MobilityFingerprint fp;
            for (std::size_t i = 0; i < rng.index(5); ++i) {
                fp.add({VisitPeriod(rng.index(6)), Activity(rng.index(3)), int(rng.index(4))});
            }
            const MobilityObservation q{VisitPeriod(rng.index(6)), Activity(rng.index(3)), int(rng.index(10))};
            const double m = mobility_similarity(q, fp, 0.01).value;
            CHECK(m > 0.0);
            CHECK(m <= 1.0);
        }
    }

    TEST_CASE("color similarity")
    {
        ColorLightFingerprint a;
        a.clusters = {{Hsl(0, 0, 0), 10}};
        a.total_pixels = 10;
        CHECK(color_similarity(a, a, 0.01).value == doctest::Approx(100.0));

        ColorLightFingerprint b;
        b.clusters = {{Hsl(2, 0, 0), 4}};
        b.total_pixels = 4;
        CHECK(color_similarity(a, b, 0.01).value == doctest::Approx(0.5));
        CHECK_THROWS_WITH(color_similarity(a, ColorLightFingerprint{}), "no color data");
        CHECK_THROWS_WITH(color_similarity(ColorLightFingerprint{}, a), "no color data");
    }

    TEST_CASE("color similarity is symmetric and size-normalized")
    {
        Rng rng(5);
        auto random_fp = [&](std::size_t scale) {
            ColorLightFingerprint fp;
            for (std::size_t i = 0; i < 1 + rng.index(4); ++i) {
                const std::size_t n = 1 + rng.index(20);
                fp.clusters.push_back({Hsl(rng.uniform(0, 360), rng.uniform(), rng.uniform()), n * scale});
                fp.total_pixels += n * scale;
            }
            return fp;
        };
        for (int round = 0; round < 300; ++round) {
            const auto a = random_fp(1);
            const auto b = random_fp(1);
            const double s = color_similarity(a, b).value;
            CHECK(s == doctest::Approx(color_similarity(b, a).value));
            CHECK(s > 0.0);
            auto a3 = a;
            for (auto& c : a3.clusters) {
                c.size *= 3;
            }
            a3.total_pixels *= 3;
            CHECK(color_similarity(a3, b).value == doctest::Approx(s));
        }
    }

    TEST_CASE("magnetic distance")
    {
        MagneticSignature a, b;
        a.summary = Eigen::Vector3d(1, 2, 2);
        CHECK(magnetic_distance(a, b).value == 3.0);
        CHECK(magnetic_distance(a, a).value == 0.0);
        CHECK(magnetic_distance(a, b).polarity == Polarity::Distance);
        Rng rng(6);
        for (int round = 0; round < 100; ++round) {
            MagneticSignature x, y;
            x.summary = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
            y.summary = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
            CHECK(magnetic_distance(x, y).value == magnetic_distance(y, x).value);
            CHECK(magnetic_distance(x, y).value > 0.0);
        }
        a.energy_spectrum = Eigen::Vector3d(3, 0, 0);
        b.energy_spectrum = Eigen::Vector2d(0, 4);
        CHECK(magnetic_spectrum_distance(a, b).value == 5.0);
    }

    TEST_CASE("sound distance")
    {
        Eigen::VectorXd lo = Eigen::VectorXd::Zero(100), hi = Eigen::VectorXd::Zero(100);
        lo[0] = 1;
        hi[99] = 1;
        CHECK(sound_distance(lo, lo).value == 0.0);
        CHECK(sound_distance(lo, hi).value == doctest::Approx(std::sqrt(2.0)));
        CHECK_THROWS(sound_distance(Eigen::VectorXd::Zero(10), lo));

        SoundFingerprint venue;
        venue.add(SoundSample{9, lo});
        CHECK(sound_distance(SoundSample{9, hi}, venue)->value == doctest::Approx(std::sqrt(2.0)));
        CHECK_FALSE(sound_distance(SoundSample{10, hi}, venue).has_value());
    }

    TEST_CASE("visterm scores use natural-log idf")
    {
        CHECK(idf(std::numbers::e, 1.0) == doctest::Approx(1.0));
        CHECK(idf(5, 0) == 0.0);

        // Three images, "rare" in one of them: idf = ln 3.
        InvertedIndex index;
        index.add_image("v1", {{"rare", 2}, {"common", 1}});
        index.add_image("v2", {{"common", 1}});
        index.add_image("v2", {{"common", 4}});
        CHECK(index.image_count() == 3);
        CHECK(index.document_frequency("common") == 3);
        CHECK(visterm_score({{"rare", 1}}, "v1", index).value == doctest::Approx(std::log(3.0)));
        CHECK(visterm_score({{"common", 1}}, "v1", index).value == 0.0);
        CHECK(visterm_score({{"rare", 1}, {"common", 1}}, "v1", index).value == doctest::Approx(std::log(3.0) / 2));
        CHECK(visterm_score({{"rare", 1}}, "v2", index).value == 0.0);
        CHECK(visterm_score({{"x", 1}}, "v1", InvertedIndex{}).value == 0.0);
    }

    TEST_CASE("ocr overlap counts shared terms")
    {
        CHECK(ocr_overlap({"latte", "menu"}, {"menu", "espresso"}).value == 1.0);
        CHECK(ocr_overlap({"a1", "b1"}, {"c1"}).value == 0.0);
        CHECK(ocr_overlap({"x", "y", "z"}, {"x", "y", "z"}).value == 3.0);
    }

    TEST_CASE("edit distance")
    {
        CHECK(edit_distance("kitten", "sitting") == 3);
        CHECK(edit_distance("abc", "abc") == 0);
        CHECK(edit_distance("", "abc") == 3);
        CHECK(edit_distance("McDonald's", "mcdonalds") == 1);
    }

    TEST_CASE("edit distance agrees with the recursive definition and is a metric")
    {
        Rng rng(7);
        auto word = [&] {
            std::string s;
            for (std::size_t i = 0; i < rng.index(8); ++i) {
                s += "abAB"[rng.index(4)];
            }
            return s;
        };
        for (int round = 0; round < 1000; ++round) {
            const auto a = word(), b = word(), c = word();
            const auto ab = edit_distance(a, b);
            CHECK(ab == oracle::levenshtein(a, b));
            CHECK(ab == edit_distance(b, a));
            CHECK(edit_distance(a, c) <= ab + edit_distance(b, c));
            CHECK((ab == 0) == (casefold(a) == casefold(b)));
        }
    }

    TEST_CASE("familiarity counts the venue plus a share of its brand")
    {
        VenueStore store;
        auto home = fx::venue("v1", Point2(0, 0));
        home.brand = "Zara";
        auto sibling = fx::venue("v2", Point2(50, 0));
        sibling.brand = "ZARA";
        auto unrelated = fx::venue("v3", Point2(9, 0));
        home.fingerprint.familiarity_counts["alice"] = 3;
        sibling.fingerprint.familiarity_counts["bob"] = 4;
        unrelated.fingerprint.familiarity_counts["bob"] = 7;
        store.upsert(home);
        store.upsert(sibling);
        store.upsert(unrelated);

        CHECK(familiarity_score("nobody", store.get("v1"), store, 0.5).value == 0.0);
        CHECK(familiarity_score("alice", store.get("v1"), store, 0.5).value == 3.0);
        CHECK(familiarity_score("bob", store.get("v1"), store, 0.5).value == 2.0);
        CHECK(familiarity_score("alice", store.get("v2"), store, 0.5).value == 1.5);
    }
}
