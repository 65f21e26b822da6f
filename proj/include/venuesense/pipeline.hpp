#pragma once

#include "venuesense/floorplan.hpp"
#include "venuesense/similarity.hpp"
#include "venuesense/store.hpp"

#include <map>
#include <span>
#include <vector>

namespace venuesense {

/// Read-only inputs of one inference call. `floorplan` supplies walking
/// distances (Euclidean without it); `images` backs the visterm ranker, which
/// abstains without it.
struct InferenceContext {
    const VenueStore& store;
    const Config& cfg;
    const Floorplan* floorplan = nullptr;
    const InvertedIndex* images = nullptr;
};

/// True when consecutive scans stay at least `threshold` similar for a
/// contiguous span lasting `min_duration` seconds or more.
bool detect_fixed_venue(std::span<const WifiScan> window, double threshold, double min_duration);

/// Highest WiFi similarity between the observation and any candidate.
double best_wifi_match(const CheckInObservation& obs, std::span<const VenueRecord* const> candidates);

bool is_new_venue(const CheckInObservation& obs, std::span<const VenueRecord* const> candidates,
                  double threshold = 1.2);

/// Venues the observation may refer to: the observation's mall when known,
/// the whole store otherwise.
std::vector<const VenueRecord*> venues_in_scope(const CheckInObservation& obs, const VenueStore& store);

/// The `n` venues nearest to the observation by walking distance.
std::vector<const VenueRecord*> filter_by_location(const CheckInObservation& obs, const InferenceContext& ctx,
                                                   std::size_t n);

/// The `n` venues with the highest WiFi similarity to the observation.
std::vector<const VenueRecord*> filter_by_wifi(const CheckInObservation& obs, const InferenceContext& ctx,
                                               std::size_t n);

/// Union of both filters, ordered by venue id.
std::vector<const VenueRecord*> build_candidates(const CheckInObservation& obs, const InferenceContext& ctx);

/// One ranker's ordering of the candidates. Venues the ranker cannot score sit
/// at the end of `order` and are missing from `scores`.
struct RankerList {
    Polarity polarity = Polarity::Similarity;
    std::vector<VenueId> order;
    std::map<VenueId, double> scores;
};

using RankerLists = std::map<Ranker, RankerList>;

/// Orders `scores` (venues absent from it last) by score, then by `wifi`
/// score descending, then by id.
RankerList make_ranker_list(Polarity polarity, std::map<VenueId, double> scores, std::span<const VenueId> venues,
                            const std::map<VenueId, double>& wifi);

/// One list per enabled ranker; rankers whose modality the observation lacks
/// abstain.
RankerLists rank_all(const CheckInObservation& obs, std::span<const VenueRecord* const> candidates,
                     const InferenceContext& ctx);

struct RankerWeights {
    std::map<Ranker, double> weights;

    static RankerWeights equal(std::span<const Ranker> rankers);
    static RankerWeights equal(const Config& cfg);

    double weight(Ranker r) const;
    double sum() const;
};

struct RankedList {
    std::vector<std::pair<VenueId, double>> entries;  // best first
    std::map<Ranker, std::vector<VenueId>> per_ranker;
    std::map<Ranker, double> weights_used;  // renormalized over participants

    std::vector<VenueId> order() const;
    /// 0-based position of `venue`, or entries.size() when absent.
    std::size_t rank_of(const VenueId& venue) const;
};

/// Scores closer than this are treated as tied and fall through to the
/// tie-break keys.
inline constexpr double kScoreTieTolerance = 1e-9;

/// Weighted Borda count. A venue at 0-based position r in a list of m earns
/// m - 1 - r points from that ranker. Throws when the lists cover different
/// venue sets.
RankedList aggregate_borda(const RankerLists& lists, const RankerWeights& weights);

/// Weighted sum of per-ranker min-max normalized scores; distances are
/// inverted so that 1 is always best.
RankedList aggregate_combsum(const RankerLists& lists, const RankerWeights& weights);

RankedList aggregate(const RankerLists& lists, const RankerWeights& weights, Aggregator method);

/// Moves weight toward the rankers that placed `actual` high. Each
/// participating ranker scores l - i (i = position of `actual`, l when
/// absent); those scores are normalized over the participants and blended in
/// with rate `alpha`. Rankers that abstained keep their weight.
RankerWeights update_weights(const RankerWeights& weights, const RankerLists& lists, const VenueId& actual,
                             std::size_t l, double alpha);

struct InferenceResult {
    bool new_venue = false;
    double best_wifi_similarity = 0.0;
    std::vector<VenueId> candidates;
    RankerLists rankers;
    RankedList ranking;
};

InferenceResult infer_venue(const CheckInObservation& obs, const InferenceContext& ctx, const RankerWeights& weights);

} // namespace venuesense
