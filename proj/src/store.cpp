#include "venuesense/store.hpp"
#include "venuesense/json_io.hpp"

#include <algorithm>
#include <array>

namespace venuesense {

namespace {

constexpr std::array<std::pair<Category, std::string_view>, kCategories> kCategoryNames{{
    {Category::FoodRestaurants, "food_restaurants"},
    {Category::ClothingFashion, "clothing_fashion"},
    {Category::ArtsEntertainment, "arts_entertainment"},
    {Category::Others, "others"},
}};

} // namespace

std::string_view to_string(Category c)
{
    for (const auto& [cat, name] : kCategoryNames) {
        if (cat == c) {
            return name;
        }
    }
    return "others";
}

Category category_from_string(std::string_view s)
{
    for (const auto& [cat, name] : kCategoryNames) {
        if (name == s) {
            return cat;
        }
    }
    throw ParseError("unknown category '" + std::string(s) + "'");
}

bool operator==(const VenueRecord& a, const VenueRecord& b)
{
    auto opt_point_eq = [](const std::optional<Point2>& x, const std::optional<Point2>& y) {
        return x.has_value() == y.has_value() && (!x || *x == *y);
    };
    return a.id == b.id && a.names == b.names && a.brand == b.brand && a.category == b.category &&
           a.mall == b.mall && a.floor == b.floor && a.claimed_location == b.claimed_location &&
           opt_point_eq(a.estimated_location, b.estimated_location) && a.fingerprint == b.fingerprint &&
           a.tips == b.tips && a.image_corpus == b.image_corpus && a.checkin_log == b.checkin_log &&
           a.pending_naming == b.pending_naming;
}

VenueStore::VenueStore(const VenueStore& other) : venues_(other.venues_) {}

VenueStore& VenueStore::operator=(const VenueStore& other)
{
    if (this != &other) {
        venues_ = other.venues_;
        invalidate();
    }
    return *this;
}

VenueStore::VenueStore(VenueStore&& other) noexcept : venues_(std::move(other.venues_))
{
    other.invalidate();
}

VenueStore& VenueStore::operator=(VenueStore&& other) noexcept
{
    if (this != &other) {
        venues_ = std::move(other.venues_);
        invalidate();
        other.invalidate();
    }
    return *this;
}

void VenueStore::upsert(VenueRecord record)
{
    if (record.id.empty()) {
        throw Error("venue id must not be empty");
    }
    if (record.names.empty()) {
        throw Error("venue " + record.id + ": names must not be empty");
    }
    const VenueId id = record.id;
    venues_.insert_or_assign(id, std::move(record));
    invalidate();
}

bool VenueStore::erase(const VenueId& id)
{
    const bool removed = venues_.erase(id) != 0;
    if (removed) {
        invalidate();
    }
    return removed;
}

const VenueRecord& VenueStore::get(const VenueId& id) const
{
    const auto it = venues_.find(id);
    if (it == venues_.end()) {
        throw NotFoundError("unknown venue '" + id + "'");
    }
    return it->second;
}

VenueRecord& VenueStore::edit(const VenueId& id)
{
    const auto it = venues_.find(id);
    if (it == venues_.end()) {
        throw NotFoundError("unknown venue '" + id + "'");
    }
    // Locations and brands may change through the returned reference.
    invalidate();
    return it->second;
}

void VenueStore::invalidate()
{
    std::lock_guard lock(index_mutex_);
    index_valid_ = false;
}

void VenueStore::ensure_indexes() const
{
    std::lock_guard lock(index_mutex_);
    if (index_valid_) {
        return;
    }
    // Keys are positions in the id-sorted venue list, so key order is id order.
    std::vector<PointRTree<double>::Item> items;
    spatial_ids_.clear();
    brands_.clear();
    for (const auto& [id, record] : venues_) {
        items.emplace_back(record.location(), spatial_ids_.size());
        spatial_ids_.push_back(id);
        if (record.brand) {
            brands_[casefold(*record.brand)].push_back(id);
        }
    }
    spatial_ = PointRTree<double>(std::move(items));
    index_valid_ = true;
}

std::vector<VenueId> VenueStore::nearest_venues(const Point2& point, std::size_t n) const
{
    ensure_indexes();
    std::vector<VenueId> out;
    for (const auto key : spatial_.nearest(point, n)) {
        out.push_back(spatial_ids_[key]);
    }
    return out;
}

std::vector<VenueId> VenueStore::within_radius(const Point2& point, double radius) const
{
    ensure_indexes();
    std::vector<VenueId> out;
    for (const auto key : spatial_.within(point, radius)) {
        out.push_back(spatial_ids_[key]);
    }
    return out;
}

std::vector<VenueId> VenueStore::brand_siblings(const std::string& brand) const
{
    ensure_indexes();
    const auto it = brands_.find(casefold(brand));
    return it == brands_.end() ? std::vector<VenueId>{} : it->second;
}

std::set<std::string> VenueStore::malls() const
{
    std::set<std::string> out;
    for (const auto& [id, record] : venues_) {
        out.insert(record.mall);
    }
    return out;
}

std::vector<VenueId> VenueStore::venues_in_mall(const std::string& mall) const
{
    std::vector<VenueId> out;
    for (const auto& [id, record] : venues_) {
        if (record.mall == mall) {
            out.push_back(id);
        }
    }
    return out;
}

VenueId VenueStore::fresh_id(const std::string& prefix) const
{
    for (std::size_t n = venues_.size();; ++n) {
        VenueId id = prefix + std::to_string(n);
        if (!contains(id)) {
            return id;
        }
    }
}

bool operator==(const VenueStore& a, const VenueStore& b) { return a.venues() == b.venues(); }

std::vector<VenueRecord> MockLbsnSource::fetch_nearby(const Point2& location, double radius, std::size_t limit) const
{
    std::vector<std::pair<double, std::size_t>> hits;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        const double d = (catalog[i].claimed_location - location).norm();
        if (d <= radius) {
            hits.emplace_back(d, i);
        }
    }
    std::sort(hits.begin(), hits.end(), [&](const auto& x, const auto& y) {
        return x.first != y.first ? x.first < y.first : catalog[x.second].id < catalog[y.second].id;
    });
    std::vector<VenueRecord> out;
    for (std::size_t i = 0; i < hits.size() && i < limit; ++i) {
        out.push_back(catalog[hits[i].second]);
    }
    return out;
}

namespace {

void check_version(const Json& doc, const std::string& source)
{
    const int version = json_io::value<int>(doc, "schema_version", source);
    if (version != kVenueSchemaVersion) {
        throw VersionError(source + ": schema_version " + std::to_string(version) + " is not supported (expected " +
                           std::to_string(kVenueSchemaVersion) + ")");
    }
}

std::vector<VenueRecord> decode_venue_list(const Json& doc, const std::string& source)
{
    const Json& venues = json_io::field(doc, "venues", source);
    if (!venues.is_array()) {
        throw ParseError(source + ".venues: expected an array");
    }
    std::vector<VenueRecord> out;
    for (std::size_t i = 0; i < venues.size(); ++i) {
        out.push_back(json_io::decode_venue(venues[i], source + ":venues[" + std::to_string(i) + "]"));
    }
    return out;
}

constexpr const char* kMallSuffix = ".venues.json";

} // namespace

std::string mall_document(const VenueStore& store, const std::string& mall)
{
    Json venues = Json::array();
    for (const auto& [id, record] : store.venues()) {
        if (record.mall == mall) {
            venues.push_back(json_io::encode(record));
        }
    }
    Json doc{{"schema_version", kVenueSchemaVersion}, {"mall", mall}, {"venues", venues}};
    return doc.dump(1) + "\n";
}

void parse_mall_document(const std::string& text, const std::string& source, VenueStore& into)
{
    const Json doc = json_io::parse_document(text, source);
    check_version(doc, source);
    const auto mall = json_io::value<std::string>(doc, "mall", source);
    for (auto& record : decode_venue_list(doc, source)) {
        if (record.mall != mall) {
            throw ParseError(source + ": venue " + record.id + " belongs to mall '" + record.mall + "'");
        }
        if (into.contains(record.id)) {
            throw ParseError(source + ": duplicate venue id " + record.id);
        }
        into.upsert(std::move(record));
    }
}

void save_store(const VenueStore& store, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    for (const auto& mall : store.malls()) {
        json_io::write_file(dir / (mall + kMallSuffix), mall_document(store, mall));
    }
}

VenueStore load_store(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) {
        throw NotFoundError("venue directory " + dir.string() + " does not exist");
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > std::string_view(kMallSuffix).size() &&
            name.ends_with(kMallSuffix)) {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw NotFoundError("no *.venues.json files in " + dir.string());
    }
    std::sort(files.begin(), files.end());
    VenueStore store;
    for (const auto& file : files) {
        parse_mall_document(json_io::read_file(file), file.string(), store);
    }
    return store;
}

void save_catalog(const MockLbsnSource& source, const std::filesystem::path& path)
{
    Json venues = Json::array();
    for (const auto& record : source.catalog) {
        venues.push_back(json_io::encode(record));
    }
    Json doc{{"schema_version", kVenueSchemaVersion}, {"coverage_ratio", source.coverage_ratio}, {"venues", venues}};
    json_io::write_file(path, doc.dump(1) + "\n");
}

MockLbsnSource load_catalog(const std::filesystem::path& path)
{
    const std::string source = path.string();
    const Json doc = json_io::parse_document(json_io::read_file(path), source);
    check_version(doc, source);
    MockLbsnSource out;
    out.coverage_ratio = json_io::value<double>(doc, "coverage_ratio", source);
    out.catalog = decode_venue_list(doc, source);
    return out;
}

} // namespace venuesense
