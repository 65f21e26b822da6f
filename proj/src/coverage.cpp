#include "venuesense/coverage.hpp"
#include "venuesense/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace venuesense {

LogicalFingerprint logical_part(const VenueFingerprint& fp)
{
    return {fp.mobility, fp.sound, fp.color, fp.text.ocr_terms, fp.text.visterms};
}

LogicalFingerprint logical_part(const CheckInObservation& obs, const Config& cfg)
{
    return logical_part(fingerprint_from_observation(obs, cfg));
}

void BrandIndex::add_brand(const std::string& name)
{
    if (name.empty()) {
        return;
    }
    auto& brand = brands[casefold(name)];
    if (brand.name.empty()) {
        brand.name = name;
    }
}

void BrandIndex::add_entry(const std::string& name, BrandEntry entry)
{
    add_brand(name);
    brands[casefold(name)].entries.push_back(std::move(entry));
}

const BrandIndex::Brand* BrandIndex::find(const std::string& name) const
{
    const auto it = brands.find(casefold(name));
    return it == brands.end() ? nullptr : &it->second;
}

BrandIndex build_brand_index(const VenueStore& store, std::span<const std::string> brand_names)
{
    BrandIndex index;
    for (const auto& name : brand_names) {
        index.add_brand(name);
    }
    for (const auto& [id, record] : store.venues()) {
        if (record.brand && !record.pending_naming) {
            index.add_entry(*record.brand, {id, record.mall, record.category, logical_part(record.fingerprint)});
        }
    }
    return index;
}

std::vector<std::string> parse_brand_list(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        const auto last = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(first, last - first + 1));
    }
    return out;
}

std::vector<std::string> load_brand_list(const std::filesystem::path& path)
{
    return parse_brand_list(json_io::read_file(path));
}

std::optional<std::string> predict_name_by_ssid(const CheckInObservation& obs, const BrandIndex& brands, int max_edit)
{
    if (!obs.text.ssid_strongest || brands.empty()) {
        return std::nullopt;
    }
    std::size_t best = std::numeric_limits<std::size_t>::max();
    const std::string* winner = nullptr;
    bool tied = false;
    for (const auto& [key, brand] : brands.brands) {
        const std::size_t d = edit_distance(*obs.text.ssid_strongest, brand.name);
        if (d < best) {
            best = d;
            winner = &brand.name;
            tied = false;
        } else if (d == best) {
            tied = true;
        }
    }
    if (winner == nullptr || tied || best > static_cast<std::size_t>(std::max(max_edit, 0))) {
        return std::nullopt;
    }
    return *winner;
}

namespace {

// Highest joint probability any observation could reach under `fp`.
double mobility_ceiling(const MobilityFingerprint& fp, double epsilon)
{
    MobilityObservation best;
    Eigen::Index at = 0;
    fp.visit_hist().maxCoeff(&at);
    best.visit_period = static_cast<VisitPeriod>(at);
    fp.activity_hist().maxCoeff(&at);
    best.activity = static_cast<Activity>(at);
    const Eigen::VectorXd duration = fp.duration_hist();
    at = 0;
    if (duration.size() > 0) {
        duration.maxCoeff(&at);
    }
    best.duration_bucket = static_cast<int>(at);
    return mobility_similarity(best, fp, epsilon).value;
}

double cosine(const VistermBag& a, const VistermBag& b)
{
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (const auto& [term, c] : a) {
        na += static_cast<double>(c * c);
        const auto it = b.find(term);
        if (it != b.end()) {
            dot += static_cast<double>(c * it->second);
        }
    }
    for (const auto& [term, c] : b) {
        nb += static_cast<double>(c * c);
    }
    return na > 0.0 && nb > 0.0 ? dot / std::sqrt(na * nb) : 0.0;
}

} // namespace

LogicalKernels logical_kernels(const CheckInObservation& obs, const LogicalFingerprint& venue, const Config& cfg)
{
    LogicalKernels k;
    if (!venue.mobility.empty()) {
        const double ceiling = mobility_ceiling(venue.mobility, cfg.mobility_epsilon);
        const double m = mobility_similarity(obs.mobility, venue.mobility, cfg.mobility_epsilon).value;
        k.mobility = ceiling > 0.0 ? std::clamp(m / ceiling, 0.0, 1.0) : 0.0;
    }
    if (obs.sound) {
        if (const auto d = sound_distance(*obs.sound, venue.sound)) {
            k.sound = std::clamp(1.0 - d->value / std::sqrt(2.0), 0.0, 1.0);
        }
    }
    if (obs.color && !obs.color->empty() && !venue.color.empty()) {
        const double ab = color_similarity(*obs.color, venue.color, cfg.delta_min).value;
        const double aa = color_similarity(*obs.color, *obs.color, cfg.delta_min).value;
        const double bb = color_similarity(venue.color, venue.color, cfg.delta_min).value;
        k.color = std::clamp(ab / std::sqrt(aa * bb), 0.0, 1.0);
    }
    if (!obs.text.ocr_terms.empty() && !venue.ocr_terms.empty()) {
        k.ocr = ocr_overlap(obs.text.ocr_terms, venue.ocr_terms).value /
                static_cast<double>(obs.text.ocr_terms.size());
    }
    if (!obs.text.visterms.empty() && !venue.visterms.empty()) {
        k.visterm = cosine(obs.text.visterms, venue.visterms);
    }
    return k;
}

double logical_score(const LogicalKernels& k, const RankerWeights& weights)
{
    const std::array<std::pair<Ranker, const std::optional<double>*>, 5> parts{{
        {Ranker::Mobility, &k.mobility},
        {Ranker::Sound, &k.sound},
        {Ranker::Color, &k.color},
        {Ranker::Ocr, &k.ocr},
        {Ranker::Image, &k.visterm},
    }};
    double total_weight = 0.0;
    std::size_t available = 0;
    for (const auto& [r, v] : parts) {
        if (v->has_value()) {
            total_weight += weights.weight(r);
            ++available;
        }
    }
    if (available == 0) {
        return 0.0;
    }
    double score = 0.0;
    for (const auto& [r, v] : parts) {
        if (v->has_value()) {
            const double w = total_weight > 0.0 ? weights.weight(r) / total_weight : 1.0 / static_cast<double>(available);
            score += w * **v;
        }
    }
    return score;
}

std::optional<LogicalMatch> predict_name_by_logical_fingerprint(const CheckInObservation& obs,
                                                                const BrandIndex& brands,
                                                                const RankerWeights& weights, double tau,
                                                                const Config& cfg)
{
    std::optional<LogicalMatch> best;
    bool tied = false;
    for (const auto& [key, brand] : brands.brands) {
        double brand_best = -1.0;
        for (const auto& entry : brand.entries) {
            brand_best = std::max(brand_best, logical_score(logical_kernels(obs, entry.fingerprint, cfg), weights));
        }
        if (brand.entries.empty()) {
            continue;
        }
        if (!best || brand_best > best->score + kScoreTieTolerance) {
            best = LogicalMatch{brand.name, brand_best};
            tied = false;
        } else if (std::abs(brand_best - best->score) <= kScoreTieTolerance) {
            tied = true;
        }
    }
    if (!best || tied || best->score < tau) {
        return std::nullopt;
    }
    return best;
}

namespace {

void add_alias(std::vector<std::string>& names, const std::string& name)
{
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        names.push_back(name);
    }
}

// Brand uniquely closest to `name` within `max_edit`.
std::optional<std::string> snap_target(const std::string& name, std::span<const std::string> brands, int max_edit)
{
    std::optional<std::string> target;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    bool tied = false;
    for (const auto& brand : brands) {
        const std::size_t d = edit_distance(name, brand);
        if (d < best) {
            best = d;
            target = brand;
            tied = false;
        } else if (d == best && casefold(brand) != casefold(*target)) {
            tied = true;
        }
    }
    if (!target || tied || best > static_cast<std::size_t>(std::max(max_edit, 0))) {
        return std::nullopt;
    }
    return target;
}

} // namespace

DedupReport dedup_venues(VenueStore& store, std::span<const std::string> brand_names, int brand_snap_edit,
                         int dup_cluster_edit, const Config& cfg)
{
    DedupReport report;
    std::vector<VenueId> ids;
    for (const auto& [id, record] : store.venues()) {
        ids.push_back(id);
    }

    for (const auto& id : ids) {
        const VenueRecord& record = store.get(id);
        if (record.pending_naming) {
            continue;
        }
        const auto target = snap_target(record.name(), brand_names, brand_snap_edit);
        if (!target) {
            continue;
        }
        const bool rename = record.name() != *target;
        const bool relink = !record.brand || casefold(*record.brand) != casefold(*target);
        if (!rename && !relink) {
            continue;
        }
        VenueRecord& r = store.edit(id);
        if (rename) {
            report.renames.push_back({id, r.name(), *target});
            std::vector<std::string> names{*target};
            for (const auto& n : r.names) {
                add_alias(names, n);
            }
            r.names = std::move(names);
        }
        r.brand = *target;
    }

    // Union-find over the remaining unbranded names, per mall.
    std::vector<std::size_t> parent(ids.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    auto eligible = [&](const VenueRecord& r) { return !r.brand && !r.pending_naming; };
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const VenueRecord& a = store.get(ids[i]);
        if (!eligible(a)) {
            continue;
        }
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            const VenueRecord& b = store.get(ids[j]);
            if (eligible(b) && a.mall == b.mall &&
                edit_distance(a.name(), b.name()) <= static_cast<std::size_t>(std::max(dup_cluster_edit, 0))) {
                // ids are sorted, so the root stays the lowest id.
                const auto ra = find(i);
                const auto rb = find(j);
                parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    }
    for (std::size_t j = 0; j < ids.size(); ++j) {
        const std::size_t root = find(j);
        if (root == j) {
            continue;
        }
        VenueRecord duplicate = store.get(ids[j]);
        VenueRecord& canonical = store.edit(ids[root]);
        for (const auto& n : duplicate.names) {
            add_alias(canonical.names, n);
        }
        canonical.fingerprint = merge_fingerprints(canonical.fingerprint, duplicate.fingerprint, cfg);
        canonical.tips.insert(canonical.tips.end(), duplicate.tips.begin(), duplicate.tips.end());
        canonical.image_corpus.insert(canonical.image_corpus.end(), duplicate.image_corpus.begin(),
                                      duplicate.image_corpus.end());
        for (auto bind : duplicate.checkin_log) {
            bind.venue = canonical.id;
            canonical.checkin_log.push_back(std::move(bind));
        }
        store.erase(ids[j]);
        report.merges.push_back({ids[root], ids[j]});
    }
    return report;
}

std::string_view to_string(NamingSource s)
{
    switch (s) {
    case NamingSource::Ssid:
        return "ssid";
    case NamingSource::LogicalFingerprint:
        return "logical";
    case NamingSource::Unnamed:
        break;
    }
    return "unnamed";
}

CoverageOutcome extend_coverage(const CheckInObservation& obs, const VenueStore& store, const BrandIndex& brands,
                                const RankerWeights& weights, const Config& cfg)
{
    CoverageOutcome out;
    std::optional<std::string> name = predict_name_by_ssid(obs, brands, cfg.max_ssid_edit);
    if (name) {
        out.source = NamingSource::Ssid;
    } else if (const auto match = predict_name_by_logical_fingerprint(obs, brands, weights, cfg.logical_tau, cfg)) {
        name = match->brand;
        out.source = NamingSource::LogicalFingerprint;
    }

    VenueRecord& r = out.record;
    r.id = store.fresh_id((obs.location.mall.empty() ? std::string("venue") : obs.location.mall) + "-new-");
    r.mall = obs.location.mall;
    r.floor = obs.location.floor;
    r.claimed_location = obs.location.xy;
    r.fingerprint = fingerprint_from_observation(obs, cfg);
    r.checkin_log.push_back(make_bind(obs, r.id));
    if (name) {
        r.names = {*name};
        r.brand = *name;
        if (const auto* brand = brands.find(*name); brand != nullptr && !brand->entries.empty()) {
            r.category = brand->entries.front().category;
        }
    } else {
        r.names = {"unnamed " + r.id};
        r.pending_naming = true;
    }
    return out;
}

} // namespace venuesense
