#include "venuesense/similarity.hpp"
#include "venuesense/store.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace venuesense {

SimilarityScore wifi_similarity(const WifiFingerprint& a, const WifiFingerprint& b)
{
    // Merge-walk the two sorted maps over the union of MACs.
    auto ia = a.fractions.begin();
    auto ib = b.fractions.begin();
    double sum = 0.0;
    std::size_t union_size = 0;
    while (ia != a.fractions.end() || ib != b.fractions.end()) {
        ++union_size;
        if (ib == b.fractions.end() || (ia != a.fractions.end() && ia->first < ib->first)) {
            ++ia;  // absent on one side: ratio 0
        } else if (ia == a.fractions.end() || ib->first < ia->first) {
            ++ib;
        } else {
            const double f1 = ia->second;
            const double f2 = ib->second;
            const double hi = std::max(f1, f2);
            if (hi > 0.0) {
                sum += (f1 + f2) * std::min(f1, f2) / hi;
            }
            ++ia;
            ++ib;
        }
    }
    return {union_size == 0 ? 0.0 : sum / static_cast<double>(union_size), Polarity::Similarity};
}

SimilarityScore mobility_similarity(const MobilityObservation& obs, const MobilityFingerprint& fp, double epsilon)
{
    auto prob = [&](const Eigen::VectorXd& hist, Eigen::Index bins, Eigen::Index at) {
        const double mass = at < hist.size() ? hist[at] : 0.0;
        if (epsilon <= 0.0) {
            return mass;
        }
        return (mass + epsilon) / (hist.sum() + epsilon * static_cast<double>(bins));
    };
    const Eigen::Index duration_bins = std::max<Eigen::Index>(fp.duration_counts.size(), obs.duration_bucket + 1);
    const double m = prob(fp.visit_hist(), kVisitPeriods, static_cast<int>(obs.visit_period)) *
                     prob(fp.activity_hist(), kActivities, static_cast<int>(obs.activity)) *
                     prob(fp.duration_hist(), duration_bins, obs.duration_bucket);
    return {m, Polarity::Similarity};
}

SimilarityScore color_similarity(const ColorLightFingerprint& a, const ColorLightFingerprint& b, double delta_min)
{
    if (a.empty() || b.empty()) {
        throw Error("no color data");
    }
    const double t1 = static_cast<double>(a.total_pixels);
    const double t2 = static_cast<double>(b.total_pixels);
    double s = 0.0;
    for (const auto& ci : a.clusters) {
        for (const auto& cj : b.clusters) {
            const double delta = std::max((ci.centroid - cj.centroid).norm(), delta_min);
            s += (1.0 / delta) * (static_cast<double>(ci.size) / t1) * (static_cast<double>(cj.size) / t2);
        }
    }
    return {s, Polarity::Similarity};
}

SimilarityScore magnetic_distance(const MagneticSignature& a, const MagneticSignature& b)
{
    return {(a.summary - b.summary).norm(), Polarity::Distance};
}

SimilarityScore magnetic_spectrum_distance(const MagneticSignature& a, const MagneticSignature& b)
{
    const Eigen::Index n = std::max(a.energy_spectrum.size(), b.energy_spectrum.size());
    Eigen::VectorXd pa = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd pb = Eigen::VectorXd::Zero(n);
    pa.head(a.energy_spectrum.size()) = a.energy_spectrum;
    pb.head(b.energy_spectrum.size()) = b.energy_spectrum;
    return {(pa - pb).norm(), Polarity::Distance};
}

SimilarityScore sound_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    if (a.size() != kSoundBins || b.size() != kSoundBins) {
        throw Error("sound: histogram must have 100 bins");
    }
    return {(a - b).norm(), Polarity::Distance};
}

std::optional<SimilarityScore> sound_distance(const SoundSample& sample, const SoundFingerprint& venue)
{
    const auto* hist = venue.at_hour(sample.hour);
    if (hist == nullptr) {
        return std::nullopt;
    }
    return sound_distance(sample.histogram, *hist);
}

double idf(double image_count, double document_frequency)
{
    if (document_frequency <= 0.0 || image_count <= 0.0) {
        return 0.0;
    }
    return std::log(image_count / document_frequency);
}

void InvertedIndex::add_image(const VenueId& venue, const VistermBag& image)
{
    const std::size_t id = image_venue_.size();
    image_venue_.push_back(venue);
    auto& terms = venue_terms_[venue];
    for (const auto& [term, count] : image) {
        if (count == 0) {
            continue;
        }
        postings_[term].push_back(id);
        terms.insert(term);
    }
}

std::size_t InvertedIndex::document_frequency(const std::string& term) const
{
    const auto it = postings_.find(term);
    return it == postings_.end() ? 0 : it->second.size();
}

double InvertedIndex::idf(const std::string& term) const
{
    return venuesense::idf(static_cast<double>(image_count()), static_cast<double>(document_frequency(term)));
}

bool InvertedIndex::venue_has(const VenueId& venue, const std::string& term) const
{
    const auto it = venue_terms_.find(venue);
    return it != venue_terms_.end() && it->second.count(term) != 0;
}

InvertedIndex build_image_index(const VenueStore& store)
{
    InvertedIndex index;
    for (const auto& [id, record] : store.venues()) {
        for (const auto& image : record.image_corpus) {
            index.add_image(id, image);
        }
    }
    return index;
}

SimilarityScore visterm_score(const VistermBag& query, const VenueId& venue, const InvertedIndex& index)
{
    double sum = 0.0;
    std::size_t hits = 0;
    for (const auto& [term, count] : query) {
        if (count > 0 && index.venue_has(venue, term)) {
            sum += index.idf(term);
            ++hits;
        }
    }
    return {hits == 0 ? 0.0 : sum / static_cast<double>(hits), Polarity::Similarity};
}

SimilarityScore ocr_overlap(const std::set<std::string>& ocr_terms, const std::set<std::string>& tips_terms)
{
    std::size_t common = 0;
    auto a = ocr_terms.begin();
    auto b = tips_terms.begin();
    while (a != ocr_terms.end() && b != tips_terms.end()) {
        if (*a < *b) {
            ++a;
        } else if (*b < *a) {
            ++b;
        } else {
            ++common;
            ++a;
            ++b;
        }
    }
    return {static_cast<double>(common), Polarity::Similarity};
}

std::size_t edit_distance(std::string_view a_raw, std::string_view b_raw)
{
    const std::string a = casefold(a_raw);
    const std::string b = casefold(b_raw);
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t subst = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

double mean_edit_distance(std::string_view text, std::span<const std::string> names)
{
    if (names.empty()) {
        return static_cast<double>(text.size());
    }
    double sum = 0.0;
    for (const auto& name : names) {
        sum += static_cast<double>(edit_distance(text, name));
    }
    return sum / static_cast<double>(names.size());
}

SimilarityScore familiarity_score(const UserId& user, const VenueRecord& venue, const VenueStore& store, double beta)
{
    auto count_at = [&](const VenueRecord& r) -> double {
        const auto it = r.fingerprint.familiarity_counts.find(user);
        return it == r.fingerprint.familiarity_counts.end() ? 0.0 : static_cast<double>(it->second);
    };
    double score = count_at(venue);
    if (venue.brand) {
        for (const auto& sibling : store.brand_siblings(*venue.brand)) {
            if (sibling != venue.id) {
                score += beta * count_at(store.get(sibling));
            }
        }
    }
    return {score, Polarity::Similarity};
}

} // namespace venuesense
