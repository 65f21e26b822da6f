#include "doctest.h"

#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "venuesense/kmeans.hpp"
#include "venuesense/observation.hpp"

#include <cmath>
#include <numeric>

using namespace venuesense;

TEST_SUITE("fingerprint")
{
    TEST_CASE("wifi fractions count scans per mac")
    {
        const std::vector<WifiScan> scans{fx::scan({{"A", -50}, {"B", -60}}), fx::scan({{"A", -55}})};
        const auto fp = build_wifi_fingerprint(scans);
        CHECK(fp.scan_count == 2);
        CHECK(fp.fraction("A") == 1.0);
        CHECK(fp.fraction("B") == 0.5);
        CHECK(fp.fractions.size() == 2);

        const std::vector<WifiScan> one{fx::scan({{"A", -40}})};
        CHECK(build_wifi_fingerprint(one).fractions == std::map<MacAddress, double>{{"A", 1.0}});
        CHECK_THROWS_WITH(build_wifi_fingerprint(std::span<const WifiScan>{}), "no scans");
    }

    TEST_CASE("wifi fractions stay in (0, 1] and a mac heard everywhere gets 1")
    {
        Rng rng(11);
        for (int round = 0; round < 200; ++round) {
            std::vector<WifiScan> scans(1 + rng.index(6));
            for (auto& s : scans) {
                s.readings.push_back({"always", "", -40});
                for (std::size_t i = 0; i < 5; ++i) {
                    if (rng.bernoulli(0.4)) {
                        s.readings.push_back({gen::mac(i), "", -70});
                    }
                }
            }
            const auto fp = build_wifi_fingerprint(scans);
            CHECK(fp.fraction("always") == 1.0);
            for (const auto& [mac, f] : fp.fractions) {
                CHECK(f > 0.0);
                CHECK(f <= 1.0);
            }
        }
    }

    TEST_CASE("scans with duplicate macs or impossible rss are rejected")
    {
        CHECK_THROWS(fx::scan({{"A", -50}, {"A", -60}}).validate());
        CHECK_THROWS(fx::scan({{"A", 5}}).validate());
        CHECK_THROWS(fx::scan({{"A", -101}}).validate());
    }

    TEST_CASE("mobility quantization")
    {
        // 19:30 falls in the 16-20 block with the default period starts.
        auto m = quantize_mobility(0.1, 19.5, 2400);
        CHECK(m.visit_period == VisitPeriod::LateAfternoon);
        CHECK(m.activity == Activity::Stationary);
        CHECK(m.duration_bucket == 1);

        m = quantize_mobility(0.1, 20.5, 2400);
        CHECK(m.visit_period == VisitPeriod::EarlyEvening);

        m = quantize_mobility(3.0, 10.0, 60);
        CHECK(m.visit_period == VisitPeriod::LateMorning);
        CHECK(m.activity == Activity::Walking);
        CHECK(m.duration_bucket == 0);

        m = quantize_mobility(1.0, 14.0, 5400);
        CHECK(m.visit_period == VisitPeriod::EarlyAfternoon);
        CHECK(m.activity == Activity::Browsing);
        CHECK(m.duration_bucket == 3);

        CHECK(quantize_mobility(0.2, 12, 0).activity == Activity::Browsing);
        CHECK(quantize_mobility(2.0, 12, 0).activity == Activity::Browsing);
        CHECK(quantize_mobility(2.0001, 12, 0).activity == Activity::Walking);
        CHECK(quantize_mobility(0.5, 23.0, 0).visit_period == VisitPeriod::LateEvening);
        CHECK(quantize_mobility(0.5, 2.0, 0).visit_period == VisitPeriod::LateEvening);
        CHECK(quantize_mobility(0.5, 4.0, 0).visit_period == VisitPeriod::EarlyMorning);
        CHECK(quantize_mobility(0.5, 12.0, 1e6).duration_bucket == Config{}.max_duration_bucket);

        CHECK_THROWS(quantize_mobility(-1, 12, 0));
        CHECK_THROWS(quantize_mobility(1, 12, -5));
        CHECK_THROWS(quantize_mobility(NAN, 12, 0));
    }

    TEST_CASE("sound histograms")
    {
        const std::vector<double> quiet(20, 0.005);
        const auto s = build_sound_fingerprint(quiet, 3);
        CHECK(s.histogram.size() == kSoundBins);
        CHECK(s.histogram[0] == 1.0);

        const std::vector<double> ends{0.005, 0.995};
        const auto e = build_sound_fingerprint(ends, 3);
        CHECK(e.histogram[0] == 0.5);
        CHECK(e.histogram[99] == 0.5);

        const std::vector<double> edge{1.0};
        CHECK(build_sound_fingerprint(edge, 0).histogram[99] == 1.0);

        CHECK_THROWS(build_sound_fingerprint(std::span<const double>{}, 3));
        const std::vector<double> loud{1.5};
        CHECK_THROWS(build_sound_fingerprint(loud, 3));
        CHECK_THROWS(build_sound_fingerprint(quiet, 24));
    }

    TEST_CASE("sound histograms always have 100 bins summing to one")
    {
        Rng rng(5);
        for (int round = 0; round < 200; ++round) {
            std::vector<double> amps(1 + rng.index(300));
            for (auto& a : amps) {
                a = rng.uniform();
            }
            const auto s = build_sound_fingerprint(amps, int(rng.index(24)));
            CHECK(s.histogram.size() == 100);
            CHECK(std::abs(s.histogram.sum() - 1.0) < 1e-9);
            CHECK(s.histogram.minCoeff() >= 0.0);
        }
    }

    TEST_CASE("color clusters")
    {
        const std::vector<Hsl> same(10, Hsl(120, 0.5, 0.5));
        const auto one = build_color_fingerprint(same, 1);
        REQUIRE(one.clusters.size() == 1);
        CHECK(one.clusters[0].centroid.isApprox(Hsl(120, 0.5, 0.5)));
        CHECK(one.clusters[0].size == 10);
        CHECK(one.total_pixels == 10);

        std::vector<Hsl> two(5, Hsl(10, 0.1, 0.1));
        two.insert(two.end(), 5, Hsl(300, 0.9, 0.9));
        const auto split = build_color_fingerprint(two, 2);
        REQUIRE(split.clusters.size() == 2);
        std::vector<Hsl> centroids{split.clusters[0].centroid, split.clusters[1].centroid};
        std::sort(centroids.begin(), centroids.end(), [](const Hsl& a, const Hsl& b) { return a[0] < b[0]; });
        CHECK(centroids[0].isApprox(Hsl(10, 0.1, 0.1)));
        CHECK(centroids[1].isApprox(Hsl(300, 0.9, 0.9)));
        CHECK(split.clusters[0].size == 5);
        CHECK(split.clusters[1].size == 5);

        const std::vector<Hsl> single{Hsl(0, 0, 0)};
        CHECK_THROWS(build_color_fingerprint(single, 2));
        const std::vector<Hsl> bad{Hsl(400, 0, 0)};
        CHECK_THROWS(build_color_fingerprint(bad, 1));
    }

    TEST_CASE("color cluster sizes add up and centroids stay in HSL ranges")
    {
        Rng rng(8);
        for (int round = 0; round < 50; ++round) {
            std::vector<Hsl> px(4 + rng.index(200));
            for (auto& p : px) {
                p = Hsl(rng.uniform(0, 360), rng.uniform(), rng.uniform());
            }
            const auto fp = build_color_fingerprint(px, 4);
            std::size_t total = 0;
            for (const auto& c : fp.clusters) {
                total += c.size;
                CHECK(valid_hsl(c.centroid));
            }
            CHECK(total == px.size());
            CHECK(fp.total_pixels == px.size());
        }
    }

    TEST_CASE("k-means objective never increases and is repeatable per seed")
    {
        Rng rng(21);
        for (int round = 0; round < 40; ++round) {
            Eigen::MatrixXd pts(30 + rng.index(40), 3);
            for (Eigen::Index i = 0; i < pts.rows(); ++i) {
                pts.row(i) << rng.normal(), rng.normal(), rng.normal(3.0 * double(i % 3));
            }
            const int k = 1 + int(rng.index(5));
            const auto a = kmeans(pts, k, 99);
            const auto b = kmeans(pts, k, 99);
            for (std::size_t i = 1; i < a.objective_trace.size(); ++i) {
                CHECK(a.objective_trace[i] <= a.objective_trace[i - 1] + 1e-9);
            }
            CHECK(a.assignment == b.assignment);
            CHECK(a.centroids == b.centroids);
        }
    }

    TEST_CASE("magnetic signatures")
    {
        const std::vector<Eigen::Vector3d> flat(16, Eigen::Vector3d(20, -5, 40));
        const auto still = build_magnetic_signature(flat);
        CHECK(still.energy_spectrum.isZero());
        CHECK(still.summary.isZero());

        std::vector<Eigen::Vector3d> alt;
        for (int i = 0; i < 8; ++i) {
            alt.emplace_back(i % 2 == 0 ? 1.0 : -1.0, 0.0, 0.0);
        }
        const auto sig = build_magnetic_signature(alt);
        REQUIRE(sig.energy_spectrum.size() == 5);
        for (Eigen::Index k = 0; k < 4; ++k) {
            CHECK(sig.energy_spectrum[k] == doctest::Approx(0.0).epsilon(1e-12));
        }
        // DFT of (+1, -1, ...) of length 8 puts all of it at k = 4 with |X| = 8.
        CHECK(sig.energy_spectrum[4] == doctest::Approx(8.0));
        CHECK(sig.summary.isApprox(Eigen::Vector3d(1, 0, 0)));

        CHECK_THROWS(build_magnetic_signature(std::span<const Eigen::Vector3d>{}));
    }

    TEST_CASE("magnetic spectra are nonnegative and padded to a power of two")
    {
        Rng rng(2);
        for (int round = 0; round < 50; ++round) {
            std::vector<Eigen::Vector3d> r(1 + rng.index(40));
            for (auto& v : r) {
                v = Eigen::Vector3d(rng.normal(), rng.normal(), rng.normal());
            }
            const auto sig = build_magnetic_signature(r);
            std::size_t padded = 1;
            while (padded < r.size()) {
                padded *= 2;
            }
            CHECK(std::size_t(sig.energy_spectrum.size()) == padded / 2 + 1);
            CHECK(sig.energy_spectrum.minCoeff() >= 0.0);
            CHECK(sig.summary.allFinite());
        }
    }

    TEST_CASE("text features")
    {
        const std::vector<std::string> stop{"linksys", "vodafone"};
        CHECK(ssid_stoplisted("Vodafone-AP", stop));
        CHECK_FALSE(ssid_stoplisted("Starbucks", stop));

        const std::vector<WifiScan> scans{fx::scan({{"A", -40}}, 0, "Vodafone-AP"), fx::scan({{"B", -60}}, 0, "Zara")};
        CHECK(strongest_ssid(scans, stop) == "Zara");
        const std::vector<WifiScan> only{fx::scan({{"A", -40}}, 0, "LinkSys_5G")};
        CHECK_FALSE(strongest_ssid(only, stop).has_value());

        const std::vector<std::string> words{"the", "a", "with"};
        const auto terms = extract_terms("The LATTE with a Menu 2x 42 x", words);
        CHECK(terms == std::set<std::string>{"latte", "menu"});
    }

    TEST_CASE("merging observations")
    {
        const Config cfg;
        const auto first = fx::observation({fx::scan({{"A", -50}})});
        const auto fp = fingerprint_from_observation(first);
        CHECK(merge_observation(VenueFingerprint{}, first, cfg) == fp);

        const auto other = fx::observation({fx::scan({{"B", -50}})});
        const auto merged = merge_observation(fp, other, cfg);
        CHECK(merged.wifi.scan_count == 2);
        CHECK(merged.wifi.fraction("A") == 0.5);
        CHECK(merged.wifi.fraction("B") == 0.5);

        const auto twice = merge_observation(merge_observation(VenueFingerprint{}, first, cfg), first, cfg);
        CHECK(twice.wifi.scan_count == 2 * fp.wifi.scan_count);
        CHECK(twice.wifi.fraction("A") == 1.0);
        CHECK(twice.familiarity_counts.at("u") == 2);
        CHECK(twice.location_samples.size() == 2);
    }

    TEST_CASE("merge order does not change wifi fractions or histograms")
    {
        Rng rng(4);
        const Config cfg;
        for (int round = 0; round < 30; ++round) {
            std::vector<CheckInObservation> obs;
            for (std::size_t i = 0; i < 2 + rng.index(6); ++i) {
                std::vector<WifiScan> scans(1 + rng.index(3));
                for (auto& s : scans) {
                    for (std::size_t m = 0; m < 6; ++m) {
                        if (rng.bernoulli(0.5)) {
                            s.readings.push_back({gen::mac(m), "", -60});
                        }
                    }
                }
                auto o = fx::observation(scans);
                o.mobility = quantize_mobility(rng.uniform(0, 3), rng.uniform(0, 24), rng.uniform(0, 9000));
                if (rng.bernoulli(0.5)) {
                    std::vector<double> amps(10);
                    for (auto& a : amps) {
                        a = rng.uniform();
                    }
                    o.sound = build_sound_fingerprint(amps, 5);
                }
                obs.push_back(o);
            }
            VenueFingerprint forward, backward;
            for (const auto& o : obs) {
                forward = merge_observation(forward, o, cfg);
            }
            for (auto it = obs.rbegin(); it != obs.rend(); ++it) {
                backward = merge_observation(backward, *it, cfg);
            }
            CHECK(forward.wifi == backward.wifi);
            CHECK(forward.mobility == backward.mobility);
            CHECK(forward.mobility.visit_hist() == backward.mobility.visit_hist());
            REQUIRE(forward.sound.hour_bins.size() == backward.sound.hour_bins.size());
            for (const auto& [h, v] : forward.sound.hour_bins) {
                CHECK((v - backward.sound.hour_bins.at(h)).cwiseAbs().maxCoeff() < 1e-12);
            }
        }
    }

    TEST_CASE("binds carry the observation's wifi and mean rss")
    {
        auto o = fx::observation({fx::scan({{"A", -50}, {"B", -70}}), fx::scan({{"A", -60}})}, Point2(3, 4), "c1");
        const auto b = make_bind(o, "v1");
        CHECK(b.checkin_id == "c1");
        CHECK(b.venue == "v1");
        CHECK(b.wifi.fraction("B") == 0.5);
        CHECK(b.rss.at("A") == -55.0);
        CHECK(b.rss.at("B") == -70.0);
        CHECK(b.location == Point2(3, 4));
        CHECK(b.label == BindLabel::Unclassified);
    }
}
