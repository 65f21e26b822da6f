#include "venuesense/fingerprint.hpp"
#include "venuesense/kmeans.hpp"
#include "venuesense/observation.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numeric>

namespace venuesense {

namespace {

template <typename Vec>
bool same_vector(const Vec& a, const Vec& b)
{
    return a.size() == b.size() && (a.array() == b.array()).all();
}

bool same_padded(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    const Eigen::Index n = std::max(a.size(), b.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        if (x != y) {
            return false;
        }
    }
    return true;
}

Eigen::VectorXd normalized(const Eigen::VectorXd& counts, double total)
{
    if (total <= 0.0) {
        return Eigen::VectorXd::Zero(counts.size());
    }
    return counts / total;
}

void add_padded(Eigen::VectorXd& into, const Eigen::VectorXd& from)
{
    if (from.size() > into.size()) {
        const Eigen::Index old = into.size();
        into.conservativeResize(from.size());
        into.tail(from.size() - old).setZero();
    }
    into.head(from.size()) += from;
}

} // namespace

// ---------------------------------------------------------------------------
// WiFi

void WifiScan::validate() const
{
    std::set<MacAddress> seen;
    for (const auto& r : readings) {
        if (!seen.insert(r.mac).second) {
            throw Error("wifi scan: duplicate mac " + r.mac);
        }
        if (!(r.rss >= -100.0 && r.rss <= 0.0)) {
            throw Error("wifi scan: rss out of range for " + r.mac);
        }
    }
}

double WifiFingerprint::fraction(const MacAddress& mac) const
{
    const auto it = fractions.find(mac);
    return it == fractions.end() ? 0.0 : it->second;
}

WifiFingerprint build_wifi_fingerprint(std::span<const WifiScan> scans)
{
    if (scans.empty()) {
        throw Error("no scans");
    }
    std::map<MacAddress, std::size_t> counts;
    for (const auto& scan : scans) {
        scan.validate();
        for (const auto& r : scan.readings) {
            ++counts[r.mac];
        }
    }
    WifiFingerprint fp;
    fp.scan_count = scans.size();
    for (const auto& [mac, c] : counts) {
        fp.fractions[mac] = static_cast<double>(c) / static_cast<double>(fp.scan_count);
    }
    return fp;
}

WifiFingerprint single_scan_fingerprint(const WifiScan& scan)
{
    return build_wifi_fingerprint(std::span<const WifiScan>(&scan, 1));
}

std::map<MacAddress, double> mean_rss(std::span<const WifiScan> scans)
{
    std::map<MacAddress, std::pair<double, std::size_t>> acc;
    for (const auto& scan : scans) {
        for (const auto& r : scan.readings) {
            auto& slot = acc[r.mac];
            slot.first += r.rss;
            ++slot.second;
        }
    }
    std::map<MacAddress, double> out;
    for (const auto& [mac, s] : acc) {
        out[mac] = s.first / static_cast<double>(s.second);
    }
    return out;
}

WifiFingerprint merge_wifi(const WifiFingerprint& a, const WifiFingerprint& b)
{
    if (a.scan_count == 0) {
        return b;
    }
    if (b.scan_count == 0) {
        return a;
    }
    // Fractions are count/scan_count, so the counts are recovered exactly.
    std::map<MacAddress, long long> counts;
    for (const auto* fp : {&a, &b}) {
        for (const auto& [mac, f] : fp->fractions) {
            counts[mac] += std::llround(f * static_cast<double>(fp->scan_count));
        }
    }
    WifiFingerprint out;
    out.scan_count = a.scan_count + b.scan_count;
    for (const auto& [mac, c] : counts) {
        if (c > 0) {
            out.fractions[mac] = static_cast<double>(c) / static_cast<double>(out.scan_count);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Mobility

namespace {
constexpr std::array<std::string_view, kVisitPeriods> kPeriodNames{
    "early_morning", "late_morning", "early_afternoon", "late_afternoon", "early_evening", "late_evening"};
constexpr std::array<std::string_view, kActivities> kActivityNames{"stationary", "browsing", "walking"};
} // namespace

std::string_view to_string(VisitPeriod p) { return kPeriodNames[static_cast<std::size_t>(p)]; }
std::string_view to_string(Activity a) { return kActivityNames[static_cast<std::size_t>(a)]; }

VisitPeriod visit_period_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kPeriodNames.size(); ++i) {
        if (kPeriodNames[i] == s) {
            return static_cast<VisitPeriod>(i);
        }
    }
    throw ParseError("unknown visit period '" + std::string(s) + "'");
}

Activity activity_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kActivityNames.size(); ++i) {
        if (kActivityNames[i] == s) {
            return static_cast<Activity>(i);
        }
    }
    throw ParseError("unknown activity '" + std::string(s) + "'");
}

VisitPeriod visit_period_for(double local_hour, const std::array<int, 6>& starts)
{
    const double h = std::fmod(std::fmod(local_hour, 24.0) + 24.0, 24.0);
    int period = kVisitPeriods - 1;  // before the first start: wrapped last period
    for (int i = 0; i < kVisitPeriods; ++i) {
        if (h >= starts[static_cast<std::size_t>(i)]) {
            period = i;
        }
    }
    return static_cast<VisitPeriod>(period);
}

MobilityObservation quantize_mobility(double mobility_ratio, double local_hour, double stay_seconds,
                                      const Config& cfg)
{
    if (!std::isfinite(mobility_ratio) || !std::isfinite(local_hour) || !std::isfinite(stay_seconds)) {
        throw Error("quantize_mobility: non-finite input");
    }
    if (mobility_ratio < 0.0 || local_hour < 0.0 || stay_seconds < 0.0) {
        throw Error("quantize_mobility: negative input");
    }
    MobilityObservation obs;
    if (mobility_ratio < 0.2) {
        obs.activity = Activity::Stationary;
    } else if (mobility_ratio <= 2.0) {
        obs.activity = Activity::Browsing;
    } else {
        obs.activity = Activity::Walking;
    }
    obs.visit_period = visit_period_for(local_hour, cfg.period_start_hours);
    const double bucket = std::floor(stay_seconds / 1800.0);
    obs.duration_bucket = static_cast<int>(std::min(bucket, static_cast<double>(cfg.max_duration_bucket)));
    return obs;
}

double local_hour_of(double timestamp)
{
    const double day = std::fmod(timestamp, 86400.0);
    return (day < 0.0 ? day + 86400.0 : day) / 3600.0;
}

void MobilityFingerprint::add(const MobilityObservation& obs)
{
    if (obs.duration_bucket < 0) {
        throw Error("mobility: negative duration bucket");
    }
    visit_counts[static_cast<int>(obs.visit_period)] += 1.0;
    activity_counts[static_cast<int>(obs.activity)] += 1.0;
    if (duration_counts.size() <= obs.duration_bucket) {
        const Eigen::Index old = duration_counts.size();
        duration_counts.conservativeResize(obs.duration_bucket + 1);
        duration_counts.tail(duration_counts.size() - old).setZero();
    }
    duration_counts[obs.duration_bucket] += 1.0;
    samples += 1.0;
}

void MobilityFingerprint::add(const MobilityFingerprint& other)
{
    visit_counts += other.visit_counts;
    activity_counts += other.activity_counts;
    add_padded(duration_counts, other.duration_counts);
    samples += other.samples;
}

Eigen::VectorXd MobilityFingerprint::visit_hist() const { return normalized(visit_counts, samples); }
Eigen::VectorXd MobilityFingerprint::activity_hist() const { return normalized(activity_counts, samples); }
Eigen::VectorXd MobilityFingerprint::duration_hist() const { return normalized(duration_counts, samples); }

bool operator==(const MobilityFingerprint& a, const MobilityFingerprint& b)
{
    return a.samples == b.samples && same_vector(a.visit_counts, b.visit_counts) &&
           same_vector(a.activity_counts, b.activity_counts) && same_padded(a.duration_counts, b.duration_counts);
}

// ---------------------------------------------------------------------------
// Sound

SoundSample build_sound_fingerprint(std::span<const double> amplitudes, int hour)
{
    if (amplitudes.empty()) {
        throw Error("sound: no samples");
    }
    if (hour < 0 || hour >= 24) {
        throw Error("sound: hour out of range");
    }
    SoundSample out;
    out.hour = hour;
    out.histogram = Eigen::VectorXd::Zero(kSoundBins);
    for (double a : amplitudes) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw Error("sound: amplitude out of [0, 1]");
        }
        const int bin = std::min(static_cast<int>(a * kSoundBins), kSoundBins - 1);
        out.histogram[bin] += 1.0;
    }
    out.histogram /= static_cast<double>(amplitudes.size());
    return out;
}

void SoundFingerprint::add(const SoundSample& sample)
{
    if (sample.histogram.size() != kSoundBins) {
        throw Error("sound: histogram must have 100 bins");
    }
    auto& n = hour_counts[sample.hour];
    auto it = hour_bins.find(sample.hour);
    if (it == hour_bins.end()) {
        hour_bins.emplace(sample.hour, sample.histogram);
    } else {
        it->second = (it->second * static_cast<double>(n) + sample.histogram) / static_cast<double>(n + 1);
    }
    ++n;
}

void SoundFingerprint::add(const SoundFingerprint& other)
{
    for (const auto& [hour, vec] : other.hour_bins) {
        const std::size_t m = other.hour_counts.at(hour);
        auto& n = hour_counts[hour];
        auto it = hour_bins.find(hour);
        if (it == hour_bins.end()) {
            hour_bins.emplace(hour, vec);
        } else {
            it->second = (it->second * static_cast<double>(n) + vec * static_cast<double>(m)) /
                         static_cast<double>(n + m);
        }
        n += m;
    }
}

const Eigen::VectorXd* SoundFingerprint::at_hour(int hour) const
{
    const auto it = hour_bins.find(hour);
    return it == hour_bins.end() ? nullptr : &it->second;
}

bool operator==(const SoundFingerprint& a, const SoundFingerprint& b)
{
    if (a.hour_counts != b.hour_counts || a.hour_bins.size() != b.hour_bins.size()) {
        return false;
    }
    for (const auto& [hour, vec] : a.hour_bins) {
        const auto it = b.hour_bins.find(hour);
        if (it == b.hour_bins.end() || !same_vector(vec, it->second)) {
            return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Color / light

bool valid_hsl(const Hsl& p)
{
    return p.allFinite() && p[0] >= 0.0 && p[0] <= 360.0 && p[1] >= 0.0 && p[1] <= 1.0 && p[2] >= 0.0 &&
           p[2] <= 1.0;
}

bool operator==(const ColorLightFingerprint& a, const ColorLightFingerprint& b)
{
    if (a.total_pixels != b.total_pixels || a.clusters.size() != b.clusters.size() ||
        a.reservoir.size() != b.reservoir.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.clusters.size(); ++i) {
        if (a.clusters[i].size != b.clusters[i].size || a.clusters[i].centroid != b.clusters[i].centroid) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.reservoir.size(); ++i) {
        if (a.reservoir[i] != b.reservoir[i]) {
            return false;
        }
    }
    return true;
}

namespace {

// Deterministic sample of `count` items without replacement, preserving order.
std::vector<Hsl> sample_pixels(std::span<const Hsl> pixels, std::size_t count, std::uint64_t seed)
{
    if (count >= pixels.size()) {
        return {pixels.begin(), pixels.end()};
    }
    std::vector<std::size_t> idx(pixels.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(idx[i], idx[i + rng.index(idx.size() - i)]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    std::vector<Hsl> out;
    out.reserve(count);
    for (std::size_t i : idx) {
        out.push_back(pixels[i]);
    }
    return out;
}

// Largest-remainder scaling of counts so they sum to `total`.
std::vector<std::size_t> scale_counts(const std::vector<std::size_t>& counts, std::size_t total)
{
    const std::size_t sum = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
    if (sum == total || sum == 0) {
        return counts;
    }
    std::vector<std::size_t> out(counts.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double exact = static_cast<double>(counts[i]) * static_cast<double>(total) / static_cast<double>(sum);
        out[i] = static_cast<std::size_t>(std::floor(exact));
        assigned += out[i];
        remainders.emplace_back(-(exact - std::floor(exact)), i);
    }
    std::sort(remainders.begin(), remainders.end());
    for (std::size_t r = 0; assigned < total; ++r, ++assigned) {
        ++out[remainders[r % remainders.size()].second];
    }
    return out;
}

std::vector<Hsl> pixels_of(const ColorLightFingerprint& fp, std::size_t cap)
{
    if (!fp.reservoir.empty()) {
        return fp.reservoir;
    }
    // No retained sample: stand in with centroids weighted by cluster size.
    std::vector<std::size_t> sizes;
    for (const auto& c : fp.clusters) {
        sizes.push_back(c.size);
    }
    const auto scaled = scale_counts(sizes, std::min(fp.total_pixels, cap));
    std::vector<Hsl> out;
    for (std::size_t i = 0; i < fp.clusters.size(); ++i) {
        out.insert(out.end(), scaled[i], fp.clusters[i].centroid);
    }
    return out;
}

} // namespace

ColorLightFingerprint cluster_pixel_sample(std::vector<Hsl> pixels, std::size_t total_pixels, const Config& cfg)
{
    if (pixels.empty()) {
        return {};
    }
    const int k = std::min<int>(cfg.color_clusters, static_cast<int>(pixels.size()));
    Eigen::MatrixXd points(static_cast<Eigen::Index>(pixels.size()), 3);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        points.row(static_cast<Eigen::Index>(i)) = pixels[i].transpose();
    }
    const auto km = kmeans(points, k, cfg.kmeans_seed, cfg.kmeans_max_iterations);
    const auto sizes = scale_counts(km.sizes, total_pixels);

    ColorLightFingerprint fp;
    fp.total_pixels = total_pixels;
    for (int c = 0; c < k; ++c) {
        fp.clusters.push_back({km.centroids.row(c).transpose(), sizes[static_cast<std::size_t>(c)]});
    }
    fp.reservoir = std::move(pixels);
    return fp;
}

ColorLightFingerprint build_color_fingerprint(std::span<const Hsl> pixels, int clusters, const Config& cfg)
{
    if (clusters <= 0) {
        throw Error("color: cluster count must be positive");
    }
    if (pixels.size() < static_cast<std::size_t>(clusters)) {
        throw Error("color: fewer pixels than clusters");
    }
    for (const auto& p : pixels) {
        if (!valid_hsl(p)) {
            throw Error("color: pixel outside HSL ranges");
        }
    }
    Eigen::MatrixXd points(static_cast<Eigen::Index>(pixels.size()), 3);
    for (std::size_t i = 0; i < pixels.size(); ++i) {
        points.row(static_cast<Eigen::Index>(i)) = pixels[i].transpose();
    }
    const auto km = kmeans(points, clusters, cfg.kmeans_seed, cfg.kmeans_max_iterations);

    ColorLightFingerprint fp;
    fp.total_pixels = pixels.size();
    for (int c = 0; c < clusters; ++c) {
        fp.clusters.push_back({km.centroids.row(c).transpose(), km.sizes[static_cast<std::size_t>(c)]});
    }
    fp.reservoir = sample_pixels(pixels, cfg.pixel_reservoir, cfg.kmeans_seed ^ pixels.size());
    return fp;
}

ColorLightFingerprint merge_color(const ColorLightFingerprint& a, const ColorLightFingerprint& b, const Config& cfg)
{
    if (a.empty()) {
        return b;
    }
    if (b.empty()) {
        return a;
    }
    const std::size_t total = a.total_pixels + b.total_pixels;
    auto pa = pixels_of(a, cfg.pixel_reservoir);
    auto pb = pixels_of(b, cfg.pixel_reservoir);
    if (pa.size() + pb.size() > cfg.pixel_reservoir) {
        // Keep each side in proportion to the pixels it represents.
        const auto take_a = static_cast<std::size_t>(std::llround(
            static_cast<double>(cfg.pixel_reservoir) * static_cast<double>(a.total_pixels) / static_cast<double>(total)));
        const std::size_t na = std::min(take_a, pa.size());
        const std::size_t nb = std::min(cfg.pixel_reservoir - na, pb.size());
        pa = sample_pixels(pa, na, cfg.kmeans_seed ^ (total * 2));
        pb = sample_pixels(pb, nb, cfg.kmeans_seed ^ (total * 2 + 1));
    }
    pa.insert(pa.end(), pb.begin(), pb.end());
    return cluster_pixel_sample(std::move(pa), total, cfg);
}

// ---------------------------------------------------------------------------
// Magnetic

bool operator==(const MagneticSignature& a, const MagneticSignature& b)
{
    return same_vector(a.energy_spectrum, b.energy_spectrum) && a.summary == b.summary;
}

MagneticSignature build_magnetic_signature(std::span<const Eigen::Vector3d> readings)
{
    if (readings.empty()) {
        throw Error("magnetic: no readings");
    }
    const auto n = static_cast<Eigen::Index>(readings.size());
    Eigen::MatrixXd series(n, 3);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!readings[static_cast<std::size_t>(i)].allFinite()) {
            throw Error("magnetic: non-finite reading");
        }
        series.row(i) = readings[static_cast<std::size_t>(i)].transpose();
    }
    series.rowwise() -= series.colwise().mean();

    MagneticSignature sig;
    sig.summary = (series.colwise().squaredNorm() / static_cast<double>(n)).cwiseSqrt().transpose();

    Eigen::Index padded = 1;
    while (padded < n) {
        padded *= 2;
    }
    const Eigen::Index bins = padded / 2 + 1;
    Eigen::VectorXd energy = Eigen::VectorXd::Zero(bins);
    Eigen::FFT<double> fft;
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<double> input(static_cast<std::size_t>(padded), 0.0);
        for (Eigen::Index i = 0; i < n; ++i) {
            input[static_cast<std::size_t>(i)] = series(i, axis);
        }
        std::vector<std::complex<double>> spectrum;
        if (padded == 1) {
            spectrum.assign(1, input[0]);  // kissfft cannot do a length-1 real transform
        } else {
            fft.fwd(spectrum, input);
        }
        for (Eigen::Index k = 0; k < bins; ++k) {
            energy[k] += std::norm(spectrum[static_cast<std::size_t>(k)]);
        }
    }
    sig.energy_spectrum = energy.cwiseSqrt();
    return sig;
}

// ---------------------------------------------------------------------------
// Text

bool ssid_stoplisted(std::string_view ssid, std::span<const std::string> stoplist)
{
    const std::string folded = casefold(ssid);
    return std::any_of(stoplist.begin(), stoplist.end(), [&](const std::string& stop) {
        return !stop.empty() && folded.find(casefold(stop)) != std::string::npos;
    });
}

std::optional<std::string> strongest_ssid(std::span<const WifiScan> scans, std::span<const std::string> stoplist)
{
    std::map<MacAddress, std::string> ssid_of;
    for (const auto& scan : scans) {
        for (const auto& r : scan.readings) {
            ssid_of.emplace(r.mac, r.ssid);
        }
    }
    std::optional<std::string> best;
    double best_rss = -std::numeric_limits<double>::infinity();
    for (const auto& [mac, rss] : mean_rss(scans)) {
        const auto& ssid = ssid_of[mac];
        if (ssid.empty() || ssid_stoplisted(ssid, stoplist)) {
            continue;
        }
        if (rss > best_rss) {
            best_rss = rss;
            best = ssid;
        }
    }
    return best;
}

std::set<std::string> extract_terms(std::string_view text, std::span<const std::string> stop_words)
{
    std::set<std::string> terms;
    std::string token;
    auto flush = [&] {
        const bool has_digit = std::any_of(token.begin(), token.end(),
                                           [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
        if (token.size() >= 2 && !has_digit &&
            std::find(stop_words.begin(), stop_words.end(), token) == stop_words.end()) {
            terms.insert(token);
        }
        token.clear();
    };
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            token.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        } else {
            flush();
        }
    }
    flush();
    return terms;
}

// ---------------------------------------------------------------------------
// Venue fingerprint

bool operator==(const VenueFingerprint& a, const VenueFingerprint& b)
{
    if (a.location_samples.size() != b.location_samples.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.location_samples.size(); ++i) {
        if (a.location_samples[i] != b.location_samples[i]) {
            return false;
        }
    }
    return a.wifi == b.wifi && a.mobility == b.mobility && a.sound == b.sound && a.color == b.color &&
           a.magnetic == b.magnetic && a.magnetic_samples == b.magnetic_samples && a.text == b.text &&
           a.ssid_votes == b.ssid_votes && a.familiarity_counts == b.familiarity_counts;
}

VenueFingerprint merge_fingerprints(const VenueFingerprint& a, const VenueFingerprint& b, const Config& cfg)
{
    VenueFingerprint out;
    out.wifi = merge_wifi(a.wifi, b.wifi);
    out.mobility = a.mobility;
    out.mobility.add(b.mobility);
    out.sound = a.sound;
    out.sound.add(b.sound);
    out.color = merge_color(a.color, b.color, cfg);

    out.magnetic_samples = a.magnetic_samples + b.magnetic_samples;
    if (a.magnetic && b.magnetic) {
        const double wa = static_cast<double>(a.magnetic_samples);
        const double wb = static_cast<double>(b.magnetic_samples);
        MagneticSignature m;
        m.summary = (a.magnetic->summary * wa + b.magnetic->summary * wb) / (wa + wb);
        m.energy_spectrum = a.magnetic->energy_spectrum * wa;
        add_padded(m.energy_spectrum, b.magnetic->energy_spectrum * wb);
        m.energy_spectrum /= (wa + wb);
        out.magnetic = std::move(m);
    } else {
        out.magnetic = a.magnetic ? a.magnetic : b.magnetic;
    }

    out.text.ocr_terms = a.text.ocr_terms;
    out.text.ocr_terms.insert(b.text.ocr_terms.begin(), b.text.ocr_terms.end());
    out.text.visterms = a.text.visterms;
    for (const auto& [term, c] : b.text.visterms) {
        out.text.visterms[term] += c;
    }
    out.ssid_votes = a.ssid_votes;
    for (const auto& [ssid, c] : b.ssid_votes) {
        out.ssid_votes[ssid] += c;
    }
    std::size_t best_votes = 0;
    for (const auto& [ssid, c] : out.ssid_votes) {
        if (c > best_votes) {
            best_votes = c;
            out.text.ssid_strongest = ssid;
        }
    }
    if (!out.text.ssid_strongest) {
        out.text.ssid_strongest = a.text.ssid_strongest ? a.text.ssid_strongest : b.text.ssid_strongest;
    }

    out.location_samples = a.location_samples;
    out.location_samples.insert(out.location_samples.end(), b.location_samples.begin(), b.location_samples.end());
    out.familiarity_counts = a.familiarity_counts;
    for (const auto& [user, c] : b.familiarity_counts) {
        out.familiarity_counts[user] += c;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Observations and binds

void CheckInObservation::validate() const
{
    if (wifi_scans.empty()) {
        throw Error("observation " + checkin_id + ": no wifi scans");
    }
    for (const auto& scan : wifi_scans) {
        scan.validate();
    }
    if (!location.xy.allFinite()) {
        throw Error("observation " + checkin_id + ": non-finite location");
    }
    if (sound && sound->histogram.size() != kSoundBins) {
        throw Error("observation " + checkin_id + ": sound histogram must have 100 bins");
    }
}

VenueFingerprint fingerprint_from_observation(const CheckInObservation& obs, const Config&)
{
    obs.validate();
    VenueFingerprint fp;
    fp.wifi = build_wifi_fingerprint(obs.wifi_scans);
    fp.mobility.add(obs.mobility);
    if (obs.sound) {
        fp.sound.add(*obs.sound);
    }
    if (obs.color) {
        fp.color = *obs.color;
    }
    if (obs.magnetic) {
        fp.magnetic = obs.magnetic;
        fp.magnetic_samples = 1;
    }
    fp.text = obs.text;
    if (obs.text.ssid_strongest) {
        fp.ssid_votes[*obs.text.ssid_strongest] = 1;
    }
    fp.location_samples.push_back(obs.location.xy);
    if (!obs.user.empty()) {
        fp.familiarity_counts[obs.user] = 1;
    }
    return fp;
}

VenueFingerprint merge_observation(const VenueFingerprint& fp, const CheckInObservation& obs, const Config& cfg)
{
    return merge_fingerprints(fp, fingerprint_from_observation(obs, cfg), cfg);
}

std::string_view to_string(BindLabel label)
{
    switch (label) {
    case BindLabel::Correct:
        return "correct";
    case BindLabel::Fake:
        return "fake";
    case BindLabel::Unclassified:
        break;
    }
    return "unclassified";
}

BindLabel bind_label_from_string(std::string_view s)
{
    if (s == "correct") {
        return BindLabel::Correct;
    }
    if (s == "fake") {
        return BindLabel::Fake;
    }
    if (s == "unclassified") {
        return BindLabel::Unclassified;
    }
    throw ParseError("unknown bind label '" + std::string(s) + "'");
}

bool operator==(const CheckInBind& a, const CheckInBind& b)
{
    return a.checkin_id == b.checkin_id && a.venue == b.venue && a.user == b.user && a.wifi == b.wifi &&
           a.rss == b.rss && a.location == b.location && a.timestamp == b.timestamp && a.label == b.label;
}

CheckInBind make_bind(const CheckInObservation& obs, const VenueId& claimed)
{
    CheckInBind bind;
    bind.checkin_id = obs.checkin_id;
    bind.venue = claimed;
    bind.user = obs.user;
    bind.wifi = build_wifi_fingerprint(obs.wifi_scans);
    bind.rss = mean_rss(obs.wifi_scans);
    bind.location = obs.location.xy;
    bind.timestamp = obs.timestamp;
    return bind;
}

} // namespace venuesense
