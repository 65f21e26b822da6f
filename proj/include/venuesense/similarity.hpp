#pragma once

#include "venuesense/fingerprint.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace venuesense {

class VenueStore;
struct VenueRecord;

enum class Polarity { Similarity, Distance };

struct SimilarityScore {
    double value = 0.0;
    Polarity polarity = Polarity::Similarity;

    /// True when `*this` is a strictly better match than `other`.
    bool better_than(const SimilarityScore& other) const
    {
        return polarity == Polarity::Similarity ? value > other.value : value < other.value;
    }
};

/// Range [0, 2]; symmetric; zero for disjoint or empty fingerprints.
SimilarityScore wifi_similarity(const WifiFingerprint& a, const WifiFingerprint& b);

/// Joint probability of the visit period, activity and stay bucket under the
/// venue histograms; `epsilon` > 0 adds that mass to every bin before renormalizing.
SimilarityScore mobility_similarity(const MobilityObservation& obs, const MobilityFingerprint& fp,
                                    double epsilon = 0.01);

/// Size-weighted inverse centroid distance; distances below `delta_min` are
/// clamped to it. Throws "no color data" when either side is empty.
SimilarityScore color_similarity(const ColorLightFingerprint& a, const ColorLightFingerprint& b,
                                 double delta_min = 0.01);

/// Euclidean distance between the per-axis summaries.
SimilarityScore magnetic_distance(const MagneticSignature& a, const MagneticSignature& b);

/// Euclidean distance between energy spectra, the shorter one zero-padded.
SimilarityScore magnetic_spectrum_distance(const MagneticSignature& a, const MagneticSignature& b);

SimilarityScore sound_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Abstains (nullopt) when the venue has no histogram for the sample's hour.
std::optional<SimilarityScore> sound_distance(const SoundSample& sample, const SoundFingerprint& venue);

/// ln(n / df); zero when df is zero.
double idf(double image_count, double document_frequency);

/// Visterm -> image postings over the venue image corpus.
class InvertedIndex {
public:
    void add_image(const VenueId& venue, const VistermBag& image);

    std::size_t image_count() const { return image_venue_.size(); }
    std::size_t document_frequency(const std::string& term) const;
    double idf(const std::string& term) const;
    bool venue_has(const VenueId& venue, const std::string& term) const;

private:
    std::map<std::string, std::vector<std::size_t>> postings_;
    std::vector<VenueId> image_venue_;
    std::map<VenueId, std::set<std::string>> venue_terms_;
};

InvertedIndex build_image_index(const VenueStore& store);

/// Mean IDF of the distinct query visterms found among the venue's images.
SimilarityScore visterm_score(const VistermBag& query, const VenueId& venue, const InvertedIndex& index);

SimilarityScore ocr_overlap(const std::set<std::string>& ocr_terms, const std::set<std::string>& tips_terms);

/// Levenshtein distance after ASCII case folding.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Mean edit distance between `text` and every name of a venue.
double mean_edit_distance(std::string_view text, std::span<const std::string> names);

/// Check-ins by `user` at the venue plus `beta` times those at other venues of
/// the same brand.
SimilarityScore familiarity_score(const UserId& user, const VenueRecord& venue, const VenueStore& store,
                                  double beta = 0.5);

} // namespace venuesense
