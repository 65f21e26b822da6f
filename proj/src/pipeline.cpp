#include "venuesense/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace venuesense {

bool detect_fixed_venue(std::span<const WifiScan> window, double threshold, double min_duration)
{
    if (window.size() < 2) {
        return false;
    }
    std::size_t run_start = 0;
    WifiFingerprint prev = single_scan_fingerprint(window[0]);
    for (std::size_t i = 1; i < window.size(); ++i) {
        WifiFingerprint cur = single_scan_fingerprint(window[i]);
        if (wifi_similarity(prev, cur).value >= threshold) {
            if (window[i].timestamp - window[run_start].timestamp >= min_duration) {
                return true;
            }
        } else {
            run_start = i;
        }
        prev = std::move(cur);
    }
    return false;
}

namespace {

WifiFingerprint observed_wifi(const CheckInObservation& obs)
{
    return obs.wifi_scans.empty() ? WifiFingerprint{} : build_wifi_fingerprint(obs.wifi_scans);
}

bool by_id(const VenueRecord* a, const VenueRecord* b) { return a->id < b->id; }

// Best `n` of `scored` under `better`, ties by id.
template <typename Better>
std::vector<const VenueRecord*> top_n(std::vector<std::pair<double, const VenueRecord*>> scored, std::size_t n,
                                      Better better)
{
    std::sort(scored.begin(), scored.end(), [&](const auto& x, const auto& y) {
        if (x.first != y.first) {
            return better(x.first, y.first);
        }
        return x.second->id < y.second->id;
    });
    std::vector<const VenueRecord*> out;
    for (std::size_t i = 0; i < scored.size() && i < n; ++i) {
        out.push_back(scored[i].second);
    }
    return out;
}

} // namespace

double best_wifi_match(const CheckInObservation& obs, std::span<const VenueRecord* const> candidates)
{
    const WifiFingerprint fp = observed_wifi(obs);
    double best = 0.0;
    for (const auto* venue : candidates) {
        best = std::max(best, wifi_similarity(fp, venue->fingerprint.wifi).value);
    }
    return best;
}

bool is_new_venue(const CheckInObservation& obs, std::span<const VenueRecord* const> candidates, double threshold)
{
    return candidates.empty() || best_wifi_match(obs, candidates) < threshold;
}

std::vector<const VenueRecord*> venues_in_scope(const CheckInObservation& obs, const VenueStore& store)
{
    std::vector<const VenueRecord*> out;
    for (const auto& [id, record] : store.venues()) {
        if (obs.location.mall.empty() || record.mall == obs.location.mall) {
            out.push_back(&record);
        }
    }
    return out;
}

std::vector<const VenueRecord*> filter_by_location(const CheckInObservation& obs, const InferenceContext& ctx,
                                                   std::size_t n)
{
    std::vector<std::pair<double, const VenueRecord*>> scored;
    const auto scope = venues_in_scope(obs, ctx.store);
    if (ctx.floorplan != nullptr && !ctx.floorplan->walk_graph.empty()) {
        const WalkField field =
            ctx.floorplan->walk_graph.field_from(obs.location.xy, obs.location.floor, ctx.cfg.snap_radius_m);
        for (const auto* venue : scope) {
            scored.emplace_back(field.to(venue->location(), venue->floor), venue);
        }
    } else {
        for (const auto* venue : scope) {
            scored.emplace_back((venue->location() - obs.location.xy).norm(), venue);
        }
    }
    return top_n(std::move(scored), n, std::less<>{});
}

std::vector<const VenueRecord*> filter_by_wifi(const CheckInObservation& obs, const InferenceContext& ctx,
                                               std::size_t n)
{
    const WifiFingerprint fp = observed_wifi(obs);
    std::vector<std::pair<double, const VenueRecord*>> scored;
    for (const auto* venue : venues_in_scope(obs, ctx.store)) {
        scored.emplace_back(wifi_similarity(fp, venue->fingerprint.wifi).value, venue);
    }
    return top_n(std::move(scored), n, std::greater<>{});
}

std::vector<const VenueRecord*> build_candidates(const CheckInObservation& obs, const InferenceContext& ctx)
{
    auto out = filter_by_location(obs, ctx, ctx.cfg.filter_size);
    const auto by_wifi = filter_by_wifi(obs, ctx, ctx.cfg.filter_size);
    out.insert(out.end(), by_wifi.begin(), by_wifi.end());
    std::sort(out.begin(), out.end(), by_id);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

RankerList make_ranker_list(Polarity polarity, std::map<VenueId, double> scores, std::span<const VenueId> venues,
                            const std::map<VenueId, double>& wifi)
{
    RankerList list;
    list.polarity = polarity;
    list.order.assign(venues.begin(), venues.end());
    auto wifi_of = [&](const VenueId& v) {
        const auto it = wifi.find(v);
        return it == wifi.end() ? 0.0 : it->second;
    };
    std::sort(list.order.begin(), list.order.end(), [&](const VenueId& a, const VenueId& b) {
        const auto sa = scores.find(a);
        const auto sb = scores.find(b);
        const bool ha = sa != scores.end();
        const bool hb = sb != scores.end();
        if (ha != hb) {
            return ha;
        }
        if (ha && std::abs(sa->second - sb->second) > kScoreTieTolerance) {
            return polarity == Polarity::Similarity ? sa->second > sb->second : sa->second < sb->second;
        }
        const double wa = wifi_of(a);
        const double wb = wifi_of(b);
        if (std::abs(wa - wb) > kScoreTieTolerance) {
            return wa > wb;
        }
        return a < b;
    });
    list.scores = std::move(scores);
    return list;
}

RankerLists rank_all(const CheckInObservation& obs, std::span<const VenueRecord* const> candidates,
                     const InferenceContext& ctx)
{
    const Config& cfg = ctx.cfg;
    RankerLists out;
    std::vector<VenueId> ids;
    for (const auto* v : candidates) {
        ids.push_back(v->id);
    }

    const WifiFingerprint fp = observed_wifi(obs);
    std::map<VenueId, double> wifi;
    for (const auto* v : candidates) {
        wifi[v->id] = wifi_similarity(fp, v->fingerprint.wifi).value;
    }

    auto emit = [&](Ranker r, Polarity polarity, std::map<VenueId, double> scores) {
        out.emplace(r, make_ranker_list(polarity, std::move(scores), ids, wifi));
    };
    // Fills a score map from a per-venue scorer that may decline a venue.
    auto collect = [&](auto&& scorer) {
        std::map<VenueId, double> scores;
        for (const auto* v : candidates) {
            if (const std::optional<double> s = scorer(*v)) {
                scores[v->id] = *s;
            }
        }
        return scores;
    };

    if (cfg.enabled(Ranker::Wifi)) {
        emit(Ranker::Wifi, Polarity::Similarity, wifi);
    }
    if (cfg.enabled(Ranker::Location)) {
        std::map<VenueId, double> scores;
        if (ctx.floorplan != nullptr && !ctx.floorplan->walk_graph.empty()) {
            const WalkField field =
                ctx.floorplan->walk_graph.field_from(obs.location.xy, obs.location.floor, cfg.snap_radius_m);
            for (const auto* v : candidates) {
                scores[v->id] = field.to(v->location(), v->floor);
            }
        } else {
            for (const auto* v : candidates) {
                scores[v->id] = (v->location() - obs.location.xy).norm();
            }
        }
        emit(Ranker::Location, Polarity::Distance, std::move(scores));
    }
    if (cfg.enabled(Ranker::Sound) && obs.sound) {
        emit(Ranker::Sound, Polarity::Distance, collect([&](const VenueRecord& v) -> std::optional<double> {
                 const auto d = sound_distance(*obs.sound, v.fingerprint.sound);
                 return d ? std::optional<double>(d->value) : std::nullopt;
             }));
    }
    if (cfg.enabled(Ranker::Image) && ctx.images != nullptr && !obs.text.visterms.empty()) {
        emit(Ranker::Image, Polarity::Similarity, collect([&](const VenueRecord& v) -> std::optional<double> {
                 return visterm_score(obs.text.visterms, v.id, *ctx.images).value;
             }));
    }
    if (cfg.enabled(Ranker::Mobility)) {
        emit(Ranker::Mobility, Polarity::Similarity, collect([&](const VenueRecord& v) -> std::optional<double> {
                 return mobility_similarity(obs.mobility, v.fingerprint.mobility, cfg.mobility_epsilon).value;
             }));
    }
    if (cfg.enabled(Ranker::Color) && obs.color && !obs.color->empty()) {
        emit(Ranker::Color, Polarity::Similarity, collect([&](const VenueRecord& v) -> std::optional<double> {
                 if (v.fingerprint.color.empty()) {
                     return std::nullopt;
                 }
                 return color_similarity(*obs.color, v.fingerprint.color, cfg.delta_min).value;
             }));
    }
    if (cfg.enabled(Ranker::Magnetic) && obs.magnetic) {
        emit(Ranker::Magnetic, Polarity::Distance, collect([&](const VenueRecord& v) -> std::optional<double> {
                 if (!v.fingerprint.magnetic) {
                     return std::nullopt;
                 }
                 return cfg.magnetic_compare == MagneticCompare::Summary
                            ? magnetic_distance(*obs.magnetic, *v.fingerprint.magnetic).value
                            : magnetic_spectrum_distance(*obs.magnetic, *v.fingerprint.magnetic).value;
             }));
    }
    if (cfg.enabled(Ranker::Ssid) && obs.text.ssid_strongest) {
        emit(Ranker::Ssid, Polarity::Distance, collect([&](const VenueRecord& v) -> std::optional<double> {
                 return mean_edit_distance(*obs.text.ssid_strongest, v.names);
             }));
    }
    if (cfg.enabled(Ranker::Ocr) && !obs.text.ocr_terms.empty()) {
        emit(Ranker::Ocr, Polarity::Similarity, collect([&](const VenueRecord& v) -> std::optional<double> {
                 std::string tips;
                 for (const auto& t : v.tips) {
                     tips += t;
                     tips += ' ';
                 }
                 return ocr_overlap(obs.text.ocr_terms, extract_terms(tips, cfg.stop_words)).value;
             }));
    }
    if (cfg.enabled(Ranker::Familiarity) && !obs.user.empty()) {
        emit(Ranker::Familiarity, Polarity::Similarity, collect([&](const VenueRecord& v) -> std::optional<double> {
                 return familiarity_score(obs.user, v, ctx.store, cfg.familiarity_beta).value;
             }));
    }
    return out;
}

RankerWeights RankerWeights::equal(std::span<const Ranker> rankers)
{
    RankerWeights w;
    for (const Ranker r : rankers) {
        w.weights[r] = 1.0 / static_cast<double>(rankers.size());
    }
    return w;
}

RankerWeights RankerWeights::equal(const Config& cfg)
{
    const std::vector<Ranker> enabled(cfg.enabled_rankers.begin(), cfg.enabled_rankers.end());
    return equal(enabled);
}

double RankerWeights::weight(Ranker r) const
{
    const auto it = weights.find(r);
    return it == weights.end() ? 0.0 : it->second;
}

double RankerWeights::sum() const
{
    double s = 0.0;
    for (const auto& [r, w] : weights) {
        s += w;
    }
    return s;
}

std::vector<VenueId> RankedList::order() const
{
    std::vector<VenueId> out;
    for (const auto& [id, score] : entries) {
        out.push_back(id);
    }
    return out;
}

std::size_t RankedList::rank_of(const VenueId& venue) const
{
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].first == venue) {
            return i;
        }
    }
    return entries.size();
}

namespace {

// Participant weights rescaled to sum to one; equal shares when all are zero.
std::map<Ranker, double> participant_weights(const RankerLists& lists, const RankerWeights& weights)
{
    std::map<Ranker, double> out;
    double total = 0.0;
    for (const auto& [r, list] : lists) {
        out[r] = weights.weight(r);
        total += out[r];
    }
    for (auto& [r, w] : out) {
        w = total > 0.0 ? w / total : 1.0 / static_cast<double>(out.size());
    }
    return out;
}

RankedList finish(const RankerLists& lists, std::map<Ranker, double> used, std::map<VenueId, double> scores)
{
    static const std::map<VenueId, double> kNoWifi;
    const auto wifi_it = lists.find(Ranker::Wifi);
    const auto& wifi = wifi_it == lists.end() ? kNoWifi : wifi_it->second.scores;
    std::vector<VenueId> ids;
    for (const auto& [id, s] : scores) {
        ids.push_back(id);
    }
    const RankerList ordered = make_ranker_list(Polarity::Similarity, scores, ids, wifi);

    RankedList out;
    for (const auto& id : ordered.order) {
        out.entries.emplace_back(id, scores.at(id));
    }
    for (const auto& [r, list] : lists) {
        out.per_ranker[r] = list.order;
    }
    out.weights_used = std::move(used);
    return out;
}

} // namespace

RankedList aggregate_borda(const RankerLists& lists, const RankerWeights& weights)
{
    std::map<VenueId, double> scores;
    if (lists.empty()) {
        return {};
    }
    std::vector<VenueId> reference = lists.begin()->second.order;
    std::sort(reference.begin(), reference.end());
    for (const auto& [r, list] : lists) {
        std::vector<VenueId> sorted = list.order;
        std::sort(sorted.begin(), sorted.end());
        if (sorted != reference) {
            throw Error("borda: ranker '" + std::string(to_string(r)) + "' ranks a different candidate set");
        }
    }
    const auto used = participant_weights(lists, weights);
    const std::size_t m = reference.size();
    for (const auto& id : reference) {
        scores[id] = 0.0;
    }
    for (const auto& [r, list] : lists) {
        const double w = used.at(r);
        for (std::size_t rank = 0; rank < list.order.size(); ++rank) {
            scores[list.order[rank]] += w * static_cast<double>(m - 1 - rank);
        }
    }
    return finish(lists, used, std::move(scores));
}

RankedList aggregate_combsum(const RankerLists& lists, const RankerWeights& weights)
{
    std::map<VenueId, double> scores;
    for (const auto& [r, list] : lists) {
        for (const auto& id : list.order) {
            scores[id] = 0.0;
        }
    }
    const auto used = participant_weights(lists, weights);
    for (const auto& [r, list] : lists) {
        if (list.scores.empty()) {
            continue;
        }
        double lo = list.scores.begin()->second;
        double hi = lo;
        for (const auto& [id, s] : list.scores) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        if (!(hi > lo)) {
            continue;
        }
        const double w = used.at(r);
        for (const auto& [id, s] : list.scores) {
            double norm = (s - lo) / (hi - lo);
            if (list.polarity == Polarity::Distance) {
                norm = 1.0 - norm;
            }
            scores[id] += w * norm;
        }
    }
    return finish(lists, used, std::move(scores));
}

RankedList aggregate(const RankerLists& lists, const RankerWeights& weights, Aggregator method)
{
    return method == Aggregator::Borda ? aggregate_borda(lists, weights) : aggregate_combsum(lists, weights);
}

RankerWeights update_weights(const RankerWeights& weights, const RankerLists& lists, const VenueId& actual,
                             std::size_t l, double alpha)
{
    if (l == 0) {
        throw Error("update_weights: candidate count must be positive");
    }
    std::map<Ranker, double> raw;
    double raw_total = 0.0;
    double mass = 0.0;
    for (const auto& [r, list] : lists) {
        const auto it = std::find(list.order.begin(), list.order.end(), actual);
        const auto i = std::min<std::size_t>(static_cast<std::size_t>(it - list.order.begin()), l);
        raw[r] = static_cast<double>(l - i);
        raw_total += raw[r];
        mass += weights.weight(r);
    }
    if (raw_total <= 0.0) {
        return weights;
    }
    RankerWeights out = weights;
    for (const auto& [r, s] : raw) {
        out.weights[r] = (1.0 - alpha) * weights.weight(r) + alpha * mass * s / raw_total;
    }
    const double total = out.sum();
    if (total > 0.0) {
        for (auto& [r, w] : out.weights) {
            w /= total;
        }
    }
    return out;
}

InferenceResult infer_venue(const CheckInObservation& obs, const InferenceContext& ctx, const RankerWeights& weights)
{
    InferenceResult result;
    const auto scope = venues_in_scope(obs, ctx.store);
    result.best_wifi_similarity = best_wifi_match(obs, scope);
    if (scope.empty() || result.best_wifi_similarity < ctx.cfg.new_venue_threshold) {
        result.new_venue = true;
        return result;
    }
    const auto candidates = build_candidates(obs, ctx);
    for (const auto* v : candidates) {
        result.candidates.push_back(v->id);
    }
    result.rankers = rank_all(obs, candidates, ctx);
    result.ranking = aggregate(result.rankers, weights, ctx.cfg.aggregator);
    return result;
}

} // namespace venuesense
