#pragma once

// Hand-rolled generators for property tests. Every generator takes the
// caller's Rng so a failing case reproduces from its seed.

#include "venuesense/observation.hpp"
#include "venuesense/pipeline.hpp"
#include "venuesense/random.hpp"
#include "oracles.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace gen {

using venuesense::Rng;

inline std::string mac(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "02:00:00:00:00:%02zx", i);
    return buf;
}

// Fractions on a quarter grid so that exact ties show up often.
inline venuesense::WifiFingerprint fingerprint(Rng& rng, std::size_t pool, bool allow_empty = true)
{
    venuesense::WifiFingerprint fp;
    for (std::size_t i = 0; i < pool; ++i) {
        if (rng.bernoulli(0.5)) {
            fp.fractions[mac(i)] = 0.25 * double(1 + rng.index(4));
        }
    }
    if (fp.fractions.empty() && !allow_empty) {
        fp.fractions[mac(rng.index(pool))] = 1.0;
    }
    fp.scan_count = 4;
    return fp;
}

inline venuesense::WifiFingerprint continuous_fingerprint(Rng& rng, std::size_t pool)
{
    venuesense::WifiFingerprint fp;
    for (std::size_t i = 0; i < pool; ++i) {
        if (rng.bernoulli(0.6)) {
            fp.fractions[mac(i)] = rng.uniform(0.01, 1.0);
        }
    }
    fp.scan_count = 1;
    return fp;
}

inline venuesense::CheckInBind bind(Rng& rng, std::size_t pool, std::size_t id)
{
    venuesense::CheckInBind b;
    b.checkin_id = "c" + std::to_string(id);
    b.venue = "v";
    b.wifi = fingerprint(rng, pool, false);
    for (const auto& [m, f] : b.wifi.fractions) {
        b.rss[m] = -30.0 - double(rng.index(60));
    }
    b.timestamp = double(id);
    return b;
}

// Binds drawn around a few prototypes, so clusters actually form.
inline std::vector<venuesense::CheckInBind> bind_set(Rng& rng, std::size_t n, std::size_t pool)
{
    std::vector<venuesense::CheckInBind> protos;
    const std::size_t k = 1 + rng.index(3);
    for (std::size_t i = 0; i < k; ++i) {
        protos.push_back(bind(rng, pool, 1000 + i));
    }
    std::vector<venuesense::CheckInBind> out;
    for (std::size_t i = 0; i < n; ++i) {
        venuesense::CheckInBind b = rng.bernoulli(0.3) ? bind(rng, pool, i) : protos[rng.index(k)];
        b.checkin_id = "c" + std::to_string(i);
        b.timestamp = double(i);
        for (auto& [m, v] : b.rss) {
            v += double(rng.index(7)) - 3.0;
        }
        out.push_back(std::move(b));
    }
    return out;
}

inline std::vector<std::string> venue_ids(std::size_t n)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back("v" + std::to_string(i));
    }
    return out;
}

inline std::vector<std::string> permutation(Rng& rng, std::vector<std::string> ids)
{
    rng.shuffle(std::span<std::string>(ids));
    return ids;
}

// Ranker weights: either dyadic (exact ties appear) or continuous.
inline double weight(Rng& rng, bool dyadic)
{
    return dyadic ? 0.125 * double(rng.index(9)) : rng.uniform(0.0, 1.0);
}

// A random instance for the aggregators, as both library lists and oracle
// ballots. Scores come from a small integer grid so score ties occur.
struct Aggregation {
    venuesense::RankerLists lists;
    venuesense::RankerWeights weights;
    std::map<venuesense::Ranker, oracle::Ballot> ballots;
};

inline Aggregation aggregation(Rng& rng, std::size_t rankers, std::size_t venues)
{
    std::vector<venuesense::Ranker> pool(venuesense::kAllRankers.begin(), venuesense::kAllRankers.end());
    rng.shuffle(std::span<venuesense::Ranker>(pool));
    pool.resize(rankers);
    const auto ids = venue_ids(venues);
    const bool dyadic = rng.bernoulli(0.5);

    Aggregation out;
    std::map<std::string, double> wifi;
    for (const auto r : pool) {
        if (r == venuesense::Ranker::Wifi) {
            for (const auto& id : ids) {
                wifi[id] = 0.25 * double(rng.index(9));
            }
        }
    }
    for (const auto r : pool) {
        oracle::Ballot b;
        b.distance = r != venuesense::Ranker::Wifi && rng.bernoulli(0.3);
        if (r == venuesense::Ranker::Wifi) {
            b.scores = wifi;
        } else {
            for (const auto& id : ids) {
                b.scores[id] = double(rng.index(5));
            }
        }
        const auto polarity = b.distance ? venuesense::Polarity::Distance : venuesense::Polarity::Similarity;
        venuesense::RankerList list = venuesense::make_ranker_list(polarity, b.scores, ids, wifi);
        b.order = list.order;
        b.weight = weight(rng, dyadic);
        out.weights.weights[r] = b.weight;
        out.lists[r] = std::move(list);
        out.ballots[r] = std::move(b);
    }
    return out;
}

} // namespace gen
