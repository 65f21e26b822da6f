#include "venuesense/json_io.hpp"
#include "venuesense/labeling.hpp"
#include "venuesense/simharness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace venuesense::sim {

namespace {

constexpr std::size_t kRankCdfDepth = 20;

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Store id a venue of the world is known under, if any.
std::optional<VenueId> store_id(const VenueStore& store, const std::map<VenueId, VenueId>& created, const VenueId& truth)
{
    if (store.contains(truth)) {
        return truth;
    }
    if (const auto it = created.find(truth); it != created.end()) {
        return it->second;
    }
    return std::nullopt;
}

// Where a store venue really is: its generating venue's center when known.
Point2 true_position(const World& world, const VenueStore& store, const std::map<VenueId, VenueId>& creator,
                     const VenueId& id)
{
    VenueId key = id;
    if (key.size() > 4 && key.ends_with("-dup")) {
        key.resize(key.size() - 4);
    }
    if (const auto it = creator.find(key); it != creator.end()) {
        key = it->second;
    }
    if (const auto it = world.by_id.find(key); it != world.by_id.end()) {
        return world.venues[it->second].center;
    }
    return store.get(id).location();
}

std::vector<Point2> correct_locations(const VenueRecord& venue)
{
    std::vector<Point2> out;
    for (const auto& b : venue.checkin_log) {
        if (b.label == BindLabel::Correct) {
            out.push_back(b.location);
        }
    }
    return out;
}

// Catalog store plus one bind per trace entry at its claimed venue. Returns
// the fake flag of every added check-in.
std::map<std::string, bool> add_trace_binds(VenueStore& store, const std::vector<TraceEntry>& trace)
{
    std::map<std::string, bool> fake;
    for (const auto& e : trace) {
        if (!store.contains(e.claimed_venue)) {
            continue;
        }
        store.edit(e.claimed_venue).checkin_log.push_back(make_bind(e.obs, e.claimed_venue));
        fake[e.obs.checkin_id] = e.fake;
    }
    return fake;
}

Floorplan blank_plan(const Floorplan& plan)
{
    Floorplan out = plan;
    out.labels.clear();
    return out;
}

} // namespace

double quantile(const std::vector<double>& sorted, double q)
{
    if (sorted.empty()) {
        return 0.0;
    }
    const double clamped = std::clamp(q, 0.0, 1.0);
    const auto rank = static_cast<std::size_t>(std::ceil(clamped * static_cast<double>(sorted.size())));
    return sorted[rank == 0 ? 0 : rank - 1];
}

MetricsReport replay(const World& world, const std::vector<TraceEntry>& trace, VenueStore& store,
                     std::map<std::string, Floorplan>& floorplans, const ReplayOptions& options)
{
    const Config& cfg = world.cfg.pipeline;
    const VenueStore catalog_store = store;
    const InvertedIndex images = build_image_index(store);
    BrandIndex brands = build_brand_index(store, world.brands);

    MetricsReport report;
    report.final_weights = RankerWeights::equal(cfg);
    RankerWeights& weights = report.final_weights;
    std::map<VenueId, VenueId> created;  // true venue -> created store id
    std::map<VenueId, VenueId> creator;  // created store id -> true venue
    std::vector<std::pair<double, bool>> similarities;  // (best similarity, truly new)

    for (const auto& e : trace) {
        const CheckInObservation& obs = e.obs;
        Floorplan& plan = floorplans.at(obs.location.mall);
        const InferenceContext ctx{store, cfg, &plan, &images};
        ++report.checkins;

        const auto known = store_id(store, created, e.true_venue);
        const InferenceResult result = infer_venue(obs, ctx, weights);
        // Accuracy metrics score where the user really stands, so only
        // honest check-ins count.
        const bool scored = !e.fake;
        if (scored) {
            similarities.emplace_back(result.best_wifi_similarity, !known.has_value());
        }

        VenueId actual;
        bool fresh = false;
        if (known) {
            actual = *known;
            std::size_t rank = result.ranking.entries.size();
            if (result.new_venue) {
                ++report.flagged_new;
            } else if (scored) {
                ++report.ranked;
                rank = result.ranking.rank_of(actual);
                for (const auto& [ranker, list] : result.rankers) {
                    auto& stats = report.rankers[ranker];
                    ++stats.participated;
                    const auto it = std::find(list.order.begin(), list.order.end(), actual);
                    const auto pos = static_cast<std::size_t>(it - list.order.begin());
                    stats.top1 += it != list.order.end() && pos < 1 ? 1 : 0;
                    stats.top5 += it != list.order.end() && pos < 5 ? 1 : 0;
                }
                const Point2 truth = world.venue(e.true_venue).center;
                const Point2 guess = true_position(world, store, creator, result.ranking.entries.front().first);
                report.distance_errors.push_back(plan.walk_graph.walk_distance(truth, guess, 0, cfg.snap_radius_m));
            }
            // Flagged new although the venue exists: the user still finds it.
            if (scored) {
                report.actual_ranks.push_back(std::max<std::size_t>(rank, result.new_venue ? kRankCdfDepth : 0));
            }
        } else {
            // Venue missing from the store; the user adds it whether or not the
            // engine flagged it.
            report.flagged_new += result.new_venue ? 1 : 0;
            CoverageOutcome outcome = extend_coverage(obs, store, brands, weights, cfg);
            actual = outcome.record.id;
            created[e.true_venue] = actual;
            creator[actual] = e.true_venue;
            store.upsert(std::move(outcome.record));
            brands = build_brand_index(store, world.brands);
            ++report.created_venues;
            fresh = true;
        }

        VenueId selected = actual;
        if (e.fake) {
            selected = store_id(store, created, e.claimed_venue).value_or(actual);
        }
        if (!fresh || selected != actual) {
            store.edit(selected).checkin_log.push_back(make_bind(obs, selected));
        }
        const ClusterResult integrity = classify_checkins(store, selected, cfg, &plan);
        apply_labels(store, selected, integrity);
        refresh_wifi_fingerprint(store.edit(selected));
        const auto label = integrity.labels.find(obs.checkin_id);
        if (label == integrity.labels.end() || label->second != BindLabel::Correct) {
            continue;
        }
        if (options.feedback && !result.new_venue && !result.ranking.entries.empty()) {
            weights = update_weights(weights, result.rankers, selected, result.ranking.entries.size(),
                                     cfg.learning_rate);
        }
        VenueRecord& venue = store.edit(selected);
        if (!fresh || selected != actual) {
            venue.fingerprint = merge_observation(venue.fingerprint, obs, cfg);
        }
        const auto locations = correct_locations(venue);
        if (!locations.empty()) {
            venue.estimated_location = estimate_venue_location(locations);
            plan = label_floorplan(selected, *venue.estimated_location, std::move(plan), venue.floor);
        }
    }

    std::size_t known_total = 0;
    std::size_t new_total = 0;
    for (const auto& [s, truly_new] : similarities) {
        (truly_new ? new_total : known_total) += 1;
    }
    for (const double t : options.thresholds) {
        std::size_t tp = 0;
        std::size_t fp = 0;
        for (const auto& [s, truly_new] : similarities) {
            if (s < t) {
                (truly_new ? tp : fp) += 1;
            }
        }
        report.new_venue.push_back({t, new_total == 0 ? 0.0 : double(tp) / double(new_total),
                                    known_total == 0 ? 0.0 : double(fp) / double(known_total)});
    }

    for (std::size_t k = 0; k < kRankCdfDepth; ++k) {
        const auto hits = std::count_if(report.actual_ranks.begin(), report.actual_ranks.end(),
                                        [k](std::size_t r) { return r <= k; });
        report.rank_cdf.push_back(report.actual_ranks.empty() ? 0.0
                                                              : double(hits) / double(report.actual_ranks.size()));
    }
    report.top1_recall = report.rank_cdf[0];
    report.top5_recall = report.rank_cdf[4];
    std::sort(report.distance_errors.begin(), report.distance_errors.end());

    report.detection = detection_sweep(world, catalog_store, trace, options.cutoffs_db);
    report.coverage = coverage_sweep(world, catalog_store, trace, options.max_edits);
    report.labeling = labeling_trial(world, catalog_store, trace);
    return report;
}

std::vector<DetectionPoint> detection_sweep(const World& world, const VenueStore& store,
                                            const std::vector<TraceEntry>& trace, std::span<const double> cutoffs_db)
{
    VenueStore claims = store;
    const auto fake = add_trace_binds(claims, trace);
    std::set<VenueId> claimed;
    for (const auto& e : trace) {
        if (claims.contains(e.claimed_venue)) {
            claimed.insert(e.claimed_venue);
        }
    }
    std::vector<DetectionPoint> out;
    for (const double cutoff : cutoffs_db) {
        Config cfg = world.cfg.pipeline;
        cfg.cluster_metric = ClusterMetric::RssEuclideanDb;
        cfg.cutoff_db = cutoff;
        std::size_t fakes = 0, detected = 0, honest = 0, alarms = 0;
        for (const auto& id : claimed) {
            const auto& venue = claims.get(id);
            const ClusterResult result =
                classify_checkins(claims, id, cfg, &world.floorplans.at(venue.mall));
            for (const auto& [checkin, label] : result.labels) {
                const auto it = fake.find(checkin);
                if (it == fake.end()) {
                    continue;
                }
                const bool flagged = label == BindLabel::Fake;
                if (it->second) {
                    ++fakes;
                    detected += flagged ? 1 : 0;
                } else {
                    ++honest;
                    alarms += flagged ? 1 : 0;
                }
            }
        }
        out.push_back({cutoff, fakes == 0 ? 0.0 : double(detected) / double(fakes),
                       honest == 0 ? 0.0 : double(alarms) / double(honest)});
    }
    return out;
}

LabelingPoint labeling_trial(const World& world, const VenueStore& store, const std::vector<TraceEntry>& trace)
{
    const Config& cfg = world.cfg.pipeline;
    VenueStore claims = store;
    const auto fake = add_trace_binds(claims, trace);

    // Locations each detector keeps, per claimed venue.
    std::map<VenueId, std::vector<Point2>> unfiltered, filtered, oracle;
    std::set<VenueId> claimed;
    for (const auto& e : trace) {
        if (!claims.contains(e.claimed_venue)) {
            continue;
        }
        claimed.insert(e.claimed_venue);
        unfiltered[e.claimed_venue].push_back(e.obs.location.xy);
        if (!e.fake) {
            oracle[e.claimed_venue].push_back(e.obs.location.xy);
        }
    }
    for (const auto& id : claimed) {
        const auto& venue = claims.get(id);
        const ClusterResult result = classify_checkins(claims, id, cfg, &world.floorplans.at(venue.mall));
        for (const auto& b : result.binds) {
            const auto label = result.labels.find(b.checkin_id);
            if (fake.count(b.checkin_id) != 0 && label != result.labels.end() && label->second == BindLabel::Correct) {
                filtered[id].push_back(b.location);
            }
        }
    }

    const auto accuracy = [&](const std::map<VenueId, std::vector<Point2>>& kept) {
        std::map<std::string, Floorplan> plans;
        std::map<std::string, std::map<std::string, VenueId>> truth;
        for (const auto& id : claimed) {
            const auto& venue = claims.get(id);
            if (world.by_id.count(id) == 0) {
                continue;
            }
            auto [it, inserted] = plans.try_emplace(venue.mall);
            if (inserted) {
                it->second = blank_plan(world.floorplans.at(venue.mall));
            }
            truth[venue.mall][world.venue(id).polygon] = id;
            const auto found = kept.find(id);
            if (found != kept.end() && !found->second.empty()) {
                it->second = label_floorplan(id, estimate_venue_location(found->second), std::move(it->second),
                                             venue.floor);
            }
        }
        std::size_t total = 0;
        double correct = 0.0;
        for (const auto& [mall, gt] : truth) {
            correct += labeling_accuracy(plans.at(mall), gt) * double(gt.size());
            total += gt.size();
        }
        return total == 0 ? 0.0 : correct / double(total);
    };

    LabelingPoint point;
    std::size_t fakes = 0;
    for (const auto& [id, is_fake] : fake) {
        fakes += is_fake ? 1 : 0;
    }
    point.p_e = fake.empty() ? 0.0 : double(fakes) / double(fake.size());
    point.unfiltered = accuracy(unfiltered);
    point.checkinside = accuracy(filtered);
    point.oracle = accuracy(oracle);
    return point;
}

std::vector<CoveragePoint> coverage_sweep(const World& world, const VenueStore& store,
                                          const std::vector<TraceEntry>& trace, std::span<const int> max_edits)
{
    const BrandIndex brands = build_brand_index(store, world.brands);
    std::vector<const TraceEntry*> first_visits;
    std::set<VenueId> seen;
    std::size_t planted = 0;
    for (const auto& e : trace) {
        const VenueTruth& v = world.venue(e.true_venue);
        if (v.covered || !seen.insert(v.id).second) {
            continue;
        }
        first_visits.push_back(&e);
        planted += v.brand ? 1 : 0;
    }
    std::vector<CoveragePoint> out;
    for (const int max_edit : max_edits) {
        std::size_t hits = 0;
        std::size_t wrong = 0;
        for (const auto* e : first_visits) {
            const VenueTruth& v = world.venue(e->true_venue);
            const auto name = predict_name_by_ssid(e->obs, brands, max_edit);
            if (!name) {
                continue;
            }
            if (v.brand && edit_distance(*name, *v.brand) == 0) {
                ++hits;
            } else {
                ++wrong;
            }
        }
        out.push_back({max_edit, planted == 0 ? 0.0 : double(hits) / double(planted),
                       first_visits.empty() ? 0.0 : double(wrong) / double(first_visits.size())});
    }
    return out;
}

std::map<std::string, std::string> metrics_documents(const MetricsReport& report, bool csv)
{
    std::map<std::string, std::string> docs;
    const std::string ext = csv ? ".csv" : ".json";
    const auto put_json = [&](const std::string& family, const Json& j) { docs[family + ext] = j.dump(2) + "\n"; };

    std::vector<std::pair<std::string, double>> summary{
        {"checkins", double(report.checkins)},
        {"ranked", double(report.ranked)},
        {"flagged_new", double(report.flagged_new)},
        {"created_venues", double(report.created_venues)},
        {"top1_recall", report.top1_recall},
        {"top5_recall", report.top5_recall},
        {"distance_error_median_m", quantile(report.distance_errors, 0.5)},
        {"distance_error_p90_m", quantile(report.distance_errors, 0.9)},
        {"labeling_unfiltered", report.labeling.unfiltered},
        {"labeling_checkinside", report.labeling.checkinside},
        {"labeling_oracle", report.labeling.oracle},
    };

    if (csv) {
        std::ostringstream rank, distance, rankers, fresh, integrity, coverage, labeling, weights, table;
        rank << "rank,cdf\n";
        for (std::size_t k = 0; k < report.rank_cdf.size(); ++k) {
            rank << k + 1 << "," << fixed(report.rank_cdf[k]) << "\n";
        }
        distance << "quantile,meters\n";
        for (int q = 0; q <= 20; ++q) {
            distance << fixed(q / 20.0) << "," << fixed(quantile(report.distance_errors, q / 20.0)) << "\n";
        }
        rankers << "ranker,participated,top1_recall,top5_recall\n";
        for (const auto& [r, s] : report.rankers) {
            rankers << to_string(r) << "," << s.participated << "," << fixed(s.top1_recall()) << ","
                    << fixed(s.top5_recall()) << "\n";
        }
        fresh << "threshold,tp_rate,fp_rate\n";
        for (const auto& p : report.new_venue) {
            fresh << fixed(p.threshold) << "," << fixed(p.tp_rate) << "," << fixed(p.fp_rate) << "\n";
        }
        integrity << "cutoff_db,detection,false_alarm\n";
        for (const auto& p : report.detection) {
            integrity << fixed(p.cutoff) << "," << fixed(p.detection) << "," << fixed(p.false_alarm) << "\n";
        }
        coverage << "max_edit,recall,fp_rate\n";
        for (const auto& p : report.coverage) {
            coverage << p.max_edit << "," << fixed(p.recall) << "," << fixed(p.fp_rate) << "\n";
        }
        const auto& l = report.labeling;
        labeling << "p_e,unfiltered,checkinside,oracle\n"
                 << fixed(l.p_e) << "," << fixed(l.unfiltered) << "," << fixed(l.checkinside) << ","
                 << fixed(l.oracle) << "\n";
        weights << "ranker,weight\n";
        for (const auto& [r, w] : report.final_weights.weights) {
            weights << to_string(r) << "," << fixed(w) << "\n";
        }
        table << "metric,value\n";
        for (const auto& [name, v] : summary) {
            table << name << "," << fixed(v) << "\n";
        }
        docs["rank.csv"] = rank.str();
        docs["distance.csv"] = distance.str();
        docs["rankers.csv"] = rankers.str();
        docs["new_venue.csv"] = fresh.str();
        docs["integrity.csv"] = integrity.str();
        docs["coverage.csv"] = coverage.str();
        docs["labeling.csv"] = labeling.str();
        docs["weights.csv"] = weights.str();
        docs["summary.csv"] = table.str();
        return docs;
    }

    put_json("rank", Json{{"actual_ranks", report.actual_ranks},
                          {"cdf", report.rank_cdf},
                          {"top1_recall", report.top1_recall},
                          {"top5_recall", report.top5_recall}});
    put_json("distance", Json{{"errors_m", report.distance_errors},
                              {"median_m", quantile(report.distance_errors, 0.5)},
                              {"p90_m", quantile(report.distance_errors, 0.9)}});
    Json rankers = Json::object();
    for (const auto& [r, s] : report.rankers) {
        rankers[std::string(to_string(r))] = Json{{"participated", s.participated},
                                                  {"top1_recall", s.top1_recall()},
                                                  {"top5_recall", s.top5_recall()}};
    }
    put_json("rankers", rankers);
    Json fresh = Json::array();
    for (const auto& p : report.new_venue) {
        fresh.push_back(Json{{"threshold", p.threshold}, {"tp_rate", p.tp_rate}, {"fp_rate", p.fp_rate}});
    }
    put_json("new_venue", fresh);
    Json integrity = Json::array();
    for (const auto& p : report.detection) {
        integrity.push_back(Json{{"cutoff_db", p.cutoff}, {"detection", p.detection}, {"false_alarm", p.false_alarm}});
    }
    put_json("integrity", integrity);
    Json coverage = Json::array();
    for (const auto& p : report.coverage) {
        coverage.push_back(Json{{"max_edit", p.max_edit}, {"recall", p.recall}, {"fp_rate", p.fp_rate}});
    }
    put_json("coverage", coverage);
    const auto& l = report.labeling;
    put_json("labeling", Json{{"p_e", l.p_e}, {"unfiltered", l.unfiltered}, {"checkinside", l.checkinside},
                              {"oracle", l.oracle}});
    Json weights = Json::object();
    for (const auto& [r, w] : report.final_weights.weights) {
        weights[std::string(to_string(r))] = w;
    }
    put_json("weights", weights);
    Json table = Json::object();
    for (const auto& [name, v] : summary) {
        table[name] = v;
    }
    put_json("summary", table);
    return docs;
}

std::string trace_line(const TraceEntry& entry)
{
    return Json{{"true_venue", entry.true_venue},
                {"claimed_venue", entry.claimed_venue},
                {"fake", entry.fake},
                {"observation", json_io::encode(entry.obs)}}
        .dump();
}

TraceEntry parse_trace_line(const std::string& line, const std::string& source)
{
    const Json j = json_io::parse_document(line, source);
    TraceEntry e;
    e.true_venue = json_io::value<std::string>(j, "true_venue", source);
    e.claimed_venue = json_io::value<std::string>(j, "claimed_venue", source);
    e.fake = json_io::value<bool>(j, "fake", source);
    e.obs = json_io::decode_observation(json_io::field(j, "observation", source), source + ".observation");
    return e;
}

void save_trace(const std::vector<TraceEntry>& trace, const std::filesystem::path& path)
{
    std::string text;
    for (const auto& e : trace) {
        text += trace_line(e);
        text += '\n';
    }
    json_io::write_file(path, text);
}

std::vector<TraceEntry> load_trace(const std::filesystem::path& path)
{
    std::istringstream in(json_io::read_file(path));
    std::vector<TraceEntry> trace;
    std::string line;
    for (int n = 1; std::getline(in, line); ++n) {
        if (line.empty()) {
            continue;
        }
        trace.push_back(parse_trace_line(line, path.string() + ":" + std::to_string(n)));
    }
    return trace;
}

std::string ground_truth_document(const World& world)
{
    Json venues = Json::array();
    for (const auto& v : world.venues) {
        venues.push_back(Json{{"id", v.id},
                              {"name", v.name},
                              {"brand", v.brand ? Json(*v.brand) : Json(nullptr)},
                              {"category", std::string(to_string(v.category.category))},
                              {"subcategory", v.category.subcategory},
                              {"mall", v.mall},
                              {"polygon", v.polygon},
                              {"covered", v.covered},
                              {"center", json_io::encode(v.center)}});
    }
    return Json{{"schema_version", 1}, {"venues", venues}}.dump(1) + "\n";
}

} // namespace venuesense::sim
