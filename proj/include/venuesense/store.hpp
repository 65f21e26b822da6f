#pragma once

#include "venuesense/observation.hpp"
#include "venuesense/rtree.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace venuesense {

enum class Category { FoodRestaurants, ClothingFashion, ArtsEntertainment, Others };
inline constexpr int kCategories = 4;

std::string_view to_string(Category c);
Category category_from_string(std::string_view s);

struct VenueCategory {
    Category category = Category::Others;
    std::string subcategory;

    friend bool operator==(const VenueCategory&, const VenueCategory&) = default;
};

struct VenueRecord {
    VenueId id;
    std::vector<std::string> names;  // canonical first, then aliases
    std::optional<std::string> brand;
    VenueCategory category;
    std::string mall;
    int floor = 0;
    Point2 claimed_location = Point2::Zero();  // as reported by the external LBSN
    std::optional<Point2> estimated_location;  // from floorplan labeling
    VenueFingerprint fingerprint;
    std::vector<std::string> tips;
    std::vector<VistermBag> image_corpus;
    std::vector<CheckInBind> checkin_log;  // recent binds claiming this venue
    bool pending_naming = false;

    const std::string& name() const { return names.front(); }
    /// Estimated location once known, the claimed one before.
    Point2 location() const { return estimated_location.value_or(claimed_location); }
};

bool operator==(const VenueRecord& a, const VenueRecord& b);

/// Venue database with a spatial index over venue locations and a brand index.
///
/// Single writer, many readers: const member functions may run concurrently;
/// mutations must not overlap with anything else. The derived indexes are
/// rebuilt lazily (under an internal lock) after mutations.
class VenueStore {
public:
    VenueStore() = default;
    VenueStore(const VenueStore& other);
    VenueStore& operator=(const VenueStore& other);
    VenueStore(VenueStore&& other) noexcept;
    VenueStore& operator=(VenueStore&& other) noexcept;

    void upsert(VenueRecord record);
    bool erase(const VenueId& id);
    bool contains(const VenueId& id) const { return venues_.count(id) != 0; }

    /// Throws NotFoundError for unknown ids.
    const VenueRecord& get(const VenueId& id) const;
    VenueRecord& edit(const VenueId& id);

    const std::map<VenueId, VenueRecord>& venues() const { return venues_; }
    std::size_t size() const { return venues_.size(); }
    bool empty() const { return venues_.empty(); }

    /// The `n` venues nearest to `point` by Euclidean distance of their
    /// location(), ties broken by id.
    std::vector<VenueId> nearest_venues(const Point2& point, std::size_t n) const;
    std::vector<VenueId> within_radius(const Point2& point, double radius) const;

    /// Ids of venues whose brand folds to the same key as `brand`.
    std::vector<VenueId> brand_siblings(const std::string& brand) const;

    std::set<std::string> malls() const;
    std::vector<VenueId> venues_in_mall(const std::string& mall) const;

    /// Id not yet used in the store, derived from `prefix`.
    VenueId fresh_id(const std::string& prefix) const;

private:
    void invalidate();
    void ensure_indexes() const;

    std::map<VenueId, VenueRecord> venues_;

    mutable std::mutex index_mutex_;
    mutable bool index_valid_ = false;
    mutable PointRTree<double> spatial_;
    mutable std::vector<VenueId> spatial_ids_;
    mutable std::map<std::string, std::vector<VenueId>> brands_;
};

bool operator==(const VenueStore& a, const VenueStore& b);

/// External LBSN stand-in: a venue catalog with coverage gaps, duplicates and
/// coarse granularity entries.
struct MockLbsnSource {
    std::vector<VenueRecord> catalog;
    double coverage_ratio = 1.0;

    /// Up to `limit` venues whose claimed location lies within `radius`,
    /// nearest first.
    std::vector<VenueRecord> fetch_nearby(const Point2& location, double radius, std::size_t limit) const;
};

inline constexpr int kVenueSchemaVersion = 1;

/// Writes one `<mall>.venues.json` document per mall into `dir`.
void save_store(const VenueStore& store, const std::filesystem::path& dir);

/// Reads every `*.venues.json` document in `dir`.
VenueStore load_store(const std::filesystem::path& dir);

std::string mall_document(const VenueStore& store, const std::string& mall);
void parse_mall_document(const std::string& text, const std::string& source, VenueStore& into);

void save_catalog(const MockLbsnSource& source, const std::filesystem::path& path);
MockLbsnSource load_catalog(const std::filesystem::path& path);

} // namespace venuesense
