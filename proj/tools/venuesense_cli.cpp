// venuesense: command-line front end for the inference engine and the
// synthetic mall harness. Exit codes: 0 success, 1 usage error, 2 data error.

#include "venuesense/coverage.hpp"
#include "venuesense/integrity.hpp"
#include "venuesense/json_io.hpp"
#include "venuesense/labeling.hpp"
#include "venuesense/pipeline.hpp"
#include "venuesense/simharness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace venuesense;

namespace {

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "mall";
    std::string format = "json";
};

// Simulation config: --config when given, else the one saved next to the
// mall files, else defaults.
sim::SimConfig resolve_config(const Globals& g, const fs::path& dir)
{
    if (!g.config.empty()) {
        return sim::load_sim_config(g.config);
    }
    if (fs::exists(dir / "sim_config.json")) {
        return sim::load_sim_config(dir / "sim_config.json");
    }
    return {};
}

sim::SimConfig saved_config(const fs::path& dir)
{
    return sim::load_sim_config(dir / "sim_config.json");
}

std::map<std::string, Floorplan> load_floorplans(const VenueStore& store, const fs::path& dir)
{
    std::map<std::string, Floorplan> plans;
    for (const auto& mall : store.malls()) {
        const fs::path path = dir / (mall + ".floorplan.json");
        if (fs::exists(path)) {
            plans.emplace(mall, load_floorplan(path));
        }
    }
    return plans;
}

const Floorplan* plan_for(const std::map<std::string, Floorplan>& plans, const std::string& mall)
{
    const auto it = plans.find(mall);
    return it == plans.end() ? nullptr : &it->second;
}

CheckInObservation load_observation(const fs::path& path)
{
    const Json j = json_io::parse_document(json_io::read_file(path), path.string());
    return json_io::decode_observation(j, path.string());
}

int cmd_generate(const Globals& g)
{
    const fs::path dir = g.out;
    sim::SimConfig cfg = g.config.empty() ? sim::SimConfig{} : sim::load_sim_config(g.config);
    if (g.seed) {
        cfg.seed = *g.seed;
    }
    const sim::World world = sim::generate_world(cfg);
    const MockLbsnSource catalog = sim::build_catalog(world);
    const VenueStore store = sim::initial_store(world, catalog);

    json_io::write_file(dir / "sim_config.json", nlohmann::json(cfg).dump(2) + "\n");
    for (const auto& [mall, plan] : world.floorplans) {
        save_floorplan(plan, dir / (mall + ".floorplan.json"));
    }
    save_catalog(catalog, dir / "catalog.json");
    save_store(store, dir);
    std::string brands;
    for (const auto& b : world.brands) {
        brands += b + "\n";
    }
    json_io::write_file(dir / "brands.txt", brands);
    json_io::write_file(dir / "ground_truth.json", sim::ground_truth_document(world));
    std::cout << "generated " << world.venues.size() << " venues in " << world.floorplans.size() << " mall(s), "
              << store.size() << " in the store, under " << dir.string() << "\n";
    return 0;
}

int cmd_simulate(const Globals& g, int checkins, std::optional<double> p_e, int per_venue)
{
    const fs::path dir = g.out;
    sim::SimConfig cfg = saved_config(dir);
    if (!g.config.empty()) {
        // Noise may be overridden; the world itself stays the generated one.
        cfg.noise = sim::load_sim_config(g.config).noise;
    }
    if (p_e) {
        cfg.noise.fake_checkin_prob = *p_e;
    }
    const sim::World world = sim::generate_world(cfg);
    const std::uint64_t seed = g.seed.value_or(cfg.seed + 1);
    const auto trace = per_venue > 0 ? sim::simulate_claims_per_venue(world, per_venue, cfg.noise, seed)
                                     : sim::simulate_checkins(world, checkins > 0 ? checkins : cfg.trace_checkins,
                                                              cfg.noise, seed);
    sim::save_trace(trace, dir / "trace.jsonl");
    std::cout << "wrote " << trace.size() << " check-ins to " << (dir / "trace.jsonl").string() << "\n";
    return 0;
}

int cmd_replay(const Globals& g, bool frozen)
{
    const fs::path dir = g.out;
    const sim::SimConfig cfg = saved_config(dir);
    const sim::World world = sim::generate_world(cfg);
    VenueStore store = load_store(dir);
    auto plans = load_floorplans(store, dir);
    const auto trace = sim::load_trace(dir / "trace.jsonl");
    sim::ReplayOptions options;
    options.feedback = !frozen && cfg.pipeline.feedback;
    const sim::MetricsReport report = sim::replay(world, trace, store, plans, options);
    for (const auto& [name, text] : sim::metrics_documents(report, g.format == "csv")) {
        json_io::write_file(dir / "metrics" / name, text);
    }
    std::printf("check-ins %zu  top-1 %.3f  top-5 %.3f  median error %.1f m\n", report.checkins,
                report.top1_recall, report.top5_recall, sim::quantile(report.distance_errors, 0.5));
    return 0;
}

int cmd_rank(const Globals& g, const std::string& obs_path)
{
    const fs::path dir = g.out;
    const Config cfg = resolve_config(g, dir).pipeline;
    const VenueStore store = load_store(dir);
    const auto plans = load_floorplans(store, dir);
    const CheckInObservation obs = load_observation(obs_path);
    const InvertedIndex images = build_image_index(store);
    const InferenceContext ctx{store, cfg, plan_for(plans, obs.location.mall), &images};
    const InferenceResult result = infer_venue(obs, ctx, RankerWeights::equal(cfg));
    if (result.new_venue) {
        std::printf("new venue (best wifi similarity %.4f)\n", result.best_wifi_similarity);
        return 0;
    }
    std::size_t rank = 1;
    for (const auto& [id, score] : result.ranking.entries) {
        std::printf("%zu\t%s\t%.6f\t%s\n", rank++, id.c_str(), score, store.get(id).name().c_str());
    }
    return 0;
}

int cmd_detect_fakes(const Globals& g, const std::string& venue, bool write)
{
    const fs::path dir = g.out;
    const Config cfg = resolve_config(g, dir).pipeline;
    VenueStore store = load_store(dir);
    const auto plans = load_floorplans(store, dir);
    std::vector<VenueId> ids;
    if (venue.empty()) {
        for (const auto& [id, record] : store.venues()) {
            if (!record.checkin_log.empty()) {
                ids.push_back(id);
            }
        }
    } else {
        ids.push_back(store.get(venue).id);
    }
    for (const auto& id : ids) {
        const ClusterResult result = classify_checkins(store, id, cfg, plan_for(plans, store.get(id).mall));
        for (const auto& b : result.binds) {
            std::printf("%s\t%s\t%s\n", id.c_str(), b.checkin_id.c_str(),
                        std::string(to_string(result.labels.at(b.checkin_id))).c_str());
        }
        if (write) {
            apply_labels(store, id, result);
        }
    }
    if (write) {
        save_store(store, dir);
    }
    return 0;
}

int cmd_label(const Globals& g)
{
    const fs::path dir = g.out;
    VenueStore store = load_store(dir);
    auto plans = load_floorplans(store, dir);
    std::size_t labeled = 0;
    for (const auto& [id, record] : store.venues()) {
        std::vector<Point2> correct;
        for (const auto& b : record.checkin_log) {
            if (b.label == BindLabel::Correct) {
                correct.push_back(b.location);
            }
        }
        const auto plan = plans.find(record.mall);
        if (correct.empty() || plan == plans.end()) {
            continue;
        }
        const Point2 at = estimate_venue_location(correct);
        store.edit(id).estimated_location = at;
        plan->second = label_floorplan(id, at, std::move(plan->second), record.floor);
        ++labeled;
    }
    for (const auto& [mall, plan] : plans) {
        save_floorplan(plan, dir / (mall + ".floorplan.json"));
        if (!plan.ground_truth.empty()) {
            std::printf("%s: labeling accuracy %.4f\n", mall.c_str(), labeling_accuracy(plan, plan.ground_truth));
        }
    }
    save_store(store, dir);
    std::printf("labeled %zu venues\n", labeled);
    return 0;
}

int cmd_extend_coverage(const Globals& g, const std::string& obs_path, const std::string& brands_path, bool write)
{
    const fs::path dir = g.out;
    const Config cfg = resolve_config(g, dir).pipeline;
    VenueStore store = load_store(dir);
    const auto names = load_brand_list(brands_path.empty() ? dir / "brands.txt" : fs::path(brands_path));
    const BrandIndex brands = build_brand_index(store, names);
    const CheckInObservation obs = load_observation(obs_path);
    CoverageOutcome outcome = extend_coverage(obs, store, brands, RankerWeights::equal(cfg), cfg);
    std::printf("%s\t%s\t%s\n", outcome.record.id.c_str(), outcome.record.name().c_str(),
                std::string(to_string(outcome.source)).c_str());
    if (write) {
        store.upsert(std::move(outcome.record));
        save_store(store, dir);
    }
    return 0;
}

int cmd_dedup(const Globals& g, const std::string& brands_path)
{
    const fs::path dir = g.out;
    const Config cfg = resolve_config(g, dir).pipeline;
    VenueStore store = load_store(dir);
    const auto names = load_brand_list(brands_path.empty() ? dir / "brands.txt" : fs::path(brands_path));
    const DedupReport report = dedup_venues(store, names, cfg.brand_snap_edit, cfg.dup_cluster_edit, cfg);
    for (const auto& r : report.renames) {
        std::printf("rename\t%s\t%s\t%s\n", r.venue.c_str(), r.from.c_str(), r.to.c_str());
    }
    for (const auto& m : report.merges) {
        std::printf("merge\t%s\t%s\n", m.canonical.c_str(), m.duplicate.c_str());
    }
    save_store(store, dir);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Venue inference engine and synthetic mall harness"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "Simulation config file (JSON)");
    app.add_option("--seed", g.seed, "Random seed");
    app.add_option("--out", g.out, "Mall directory")->capture_default_str();
    app.add_option("--format", g.format, "Metrics format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    auto* generate = app.add_subcommand("generate", "Generate a synthetic mall, catalog and venue store");

    int checkins = 0;
    int per_venue = 0;
    std::optional<double> p_e;
    auto* simulate = app.add_subcommand("simulate", "Simulate a check-in trace for a generated mall");
    simulate->add_option("--checkins", checkins, "Number of check-ins (default from the config)");
    simulate->add_option("--per-venue", per_venue, "Claims per venue instead of habit-driven check-ins");
    simulate->add_option("--p-e", p_e, "Fake check-in probability")->check(CLI::Range(0.0, 1.0));

    bool frozen = false;
    auto* replay = app.add_subcommand("replay", "Replay the trace through the pipeline and write metrics");
    replay->add_flag("--frozen", frozen, "Keep ranker weights equal");

    std::string obs_path;
    auto* rank = app.add_subcommand("rank", "Rank candidate venues for one observation");
    rank->add_option("--obs", obs_path, "Observation file (JSON)")->required();

    std::string venue;
    bool write = false;
    auto* detect = app.add_subcommand("detect-fakes", "Classify the check-ins of one venue (or all)");
    detect->add_option("--venue", venue, "Venue id");
    detect->add_flag("--write", write, "Store the labels");

    auto* label = app.add_subcommand("label", "Label floorplan polygons from correct check-ins");

    std::string brands_path;
    auto* extend = app.add_subcommand("extend-coverage", "Name a venue missing from the store");
    extend->add_option("--obs", obs_path, "Observation file (JSON)")->required();
    extend->add_option("--brands", brands_path, "Brand list (default: brands.txt in the mall directory)");
    extend->add_flag("--write", write, "Insert the new venue into the store");

    auto* dedup = app.add_subcommand("dedup", "Snap names onto brands and merge duplicates");
    dedup->add_option("--brands", brands_path, "Brand list (default: brands.txt in the mall directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const auto extra = app.remaining();
        if (!extra.empty() && extra.front().rfind("-", 0) != 0) {
            std::cerr << "unknown subcommand: " << extra.front() << "\n\n" << app.help();
            return 1;
        }
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (generate->parsed()) return cmd_generate(g);
        if (simulate->parsed()) return cmd_simulate(g, checkins, p_e, per_venue);
        if (replay->parsed()) return cmd_replay(g, frozen);
        if (rank->parsed()) return cmd_rank(g, obs_path);
        if (detect->parsed()) return cmd_detect_fakes(g, venue, write);
        if (label->parsed()) return cmd_label(g);
        if (extend->parsed()) return cmd_extend_coverage(g, obs_path, brands_path, write);
        if (dedup->parsed()) return cmd_dedup(g, brands_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
