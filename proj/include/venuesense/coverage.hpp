#pragma once

#include "venuesense/pipeline.hpp"
#include "venuesense/store.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace venuesense {

/// Location-independent part of a venue fingerprint.
struct LogicalFingerprint {
    MobilityFingerprint mobility;
    SoundFingerprint sound;
    ColorLightFingerprint color;
    std::set<std::string> ocr_terms;
    VistermBag visterms;
};

LogicalFingerprint logical_part(const VenueFingerprint& fp);
LogicalFingerprint logical_part(const CheckInObservation& obs, const Config& cfg = {});

struct BrandEntry {
    VenueId venue;
    std::string mall;
    VenueCategory category;
    LogicalFingerprint fingerprint;
};

struct BrandIndex {
    struct Brand {
        std::string name;  // as first listed
        std::vector<BrandEntry> entries;
    };
    std::map<std::string, Brand> brands;  // casefolded name -> brand

    bool empty() const { return brands.empty(); }
    void add_brand(const std::string& name);
    void add_entry(const std::string& brand, BrandEntry entry);
    const Brand* find(const std::string& name) const;
};

/// Brands from `brand_names` plus every brand linked in the store, with the
/// store's branch venues as entries.
BrandIndex build_brand_index(const VenueStore& store, std::span<const std::string> brand_names);

/// One brand per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> load_brand_list(const std::filesystem::path& path);
std::vector<std::string> parse_brand_list(const std::string& text);

/// Brand closest in edit distance to the observation's strongest SSID,
/// provided the distance is at most `max_edit` and no other brand ties it.
std::optional<std::string> predict_name_by_ssid(const CheckInObservation& obs, const BrandIndex& brands,
                                                int max_edit);

/// Per-kernel similarities in [0, 1]; a kernel is absent when either side
/// lacks the modality.
struct LogicalKernels {
    std::optional<double> mobility;
    std::optional<double> sound;
    std::optional<double> color;
    std::optional<double> ocr;
    std::optional<double> visterm;
};

LogicalKernels logical_kernels(const CheckInObservation& obs, const LogicalFingerprint& venue, const Config& cfg);

/// Weighted mean of the available kernels, using the ranker weights of the
/// matching modalities renormalized over those present.
double logical_score(const LogicalKernels& k, const RankerWeights& weights);

struct LogicalMatch {
    std::string brand;
    double score = 0.0;
};

/// Best brand by its best-matching branch; returned only when the score
/// reaches `tau` and no other brand ties it.
std::optional<LogicalMatch> predict_name_by_logical_fingerprint(const CheckInObservation& obs,
                                                                const BrandIndex& brands,
                                                                const RankerWeights& weights, double tau,
                                                                const Config& cfg = {});

struct DedupReport {
    struct Rename {
        VenueId venue;
        std::string from;
        std::string to;
    };
    struct Merge {
        VenueId canonical;
        VenueId duplicate;
    };
    std::vector<Rename> renames;
    std::vector<Merge> merges;

    bool empty() const { return renames.empty() && merges.empty(); }
};

/// Snaps near-brand names onto the brand, then folds same-mall venues whose
/// names are within `dup_cluster_edit` of each other into the lowest id.
DedupReport dedup_venues(VenueStore& store, std::span<const std::string> brand_names, int brand_snap_edit,
                         int dup_cluster_edit, const Config& cfg = {});

enum class NamingSource { Ssid, LogicalFingerprint, Unnamed };

std::string_view to_string(NamingSource s);

struct CoverageOutcome {
    VenueRecord record;
    NamingSource source = NamingSource::Unnamed;
};

/// New venue record for an observation the pipeline flagged as new. Not
/// inserted into the store.
CoverageOutcome extend_coverage(const CheckInObservation& obs, const VenueStore& store, const BrandIndex& brands,
                                const RankerWeights& weights, const Config& cfg);

} // namespace venuesense
