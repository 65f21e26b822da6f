#pragma once

// Reference implementations written straight from the definitions, slow on
// purpose. Tests and the acceptance binary compare the library against them.

#include "venuesense/integrity.hpp"
#include "venuesense/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using Fractions = std::map<std::string, double>;

inline double reference_similarity(const Fractions& a, const Fractions& b)
{
    std::set<std::string> macs;
    for (const auto& [m, f] : a) {
        macs.insert(m);
    }
    for (const auto& [m, f] : b) {
        macs.insert(m);
    }
    if (macs.empty()) {
        return 0.0;
    }
    double sum = 0.0;
    for (const auto& m : macs) {
        const double f1 = a.count(m) ? a.at(m) : 0.0;
        const double f2 = b.count(m) ? b.at(m) : 0.0;
        const double hi = std::max(f1, f2);
        sum += hi == 0.0 ? 0.0 : (f1 + f2) * std::min(f1, f2) / hi;
    }
    return sum / static_cast<double>(macs.size());
}

inline double reference_similarity(const venuesense::WifiFingerprint& a, const venuesense::WifiFingerprint& b)
{
    return reference_similarity(a.fractions, b.fractions);
}

// Venue order for aggregate scores: score desc, WiFi score desc, id asc,
// scores within 1e-9 counting as tied. Built by repeated selection of the
// best remaining venue.
inline std::vector<std::string> order_by(const std::map<std::string, double>& score,
                                         const std::map<std::string, double>& wifi)
{
    const auto w = [&](const std::string& id) { return wifi.count(id) ? wifi.at(id) : 0.0; };
    const auto before = [&](const std::string& x, const std::string& y) {
        if (std::abs(score.at(x) - score.at(y)) > 1e-9) {
            return score.at(x) > score.at(y);
        }
        if (std::abs(w(x) - w(y)) > 1e-9) {
            return w(x) > w(y);
        }
        return x < y;
    };
    std::vector<std::string> left;
    for (const auto& [id, s] : score) {
        left.push_back(id);
    }
    std::vector<std::string> out;
    while (!left.empty()) {
        auto best = left.begin();
        for (auto it = left.begin(); it != left.end(); ++it) {
            if (before(*it, *best)) {
                best = it;
            }
        }
        out.push_back(*best);
        left.erase(best);
    }
    return out;
}

struct Ballot {
    std::vector<std::string> order;
    std::map<std::string, double> scores;
    bool distance = false;
    double weight = 0.0;
};

inline std::map<std::string, double> wifi_scores(const std::map<venuesense::Ranker, Ballot>& ballots)
{
    const auto it = ballots.find(venuesense::Ranker::Wifi);
    return it == ballots.end() ? std::map<std::string, double>{} : it->second.scores;
}

inline double weight_total(const std::map<venuesense::Ranker, Ballot>& ballots)
{
    double total = 0.0;
    for (const auto& [r, b] : ballots) {
        total += b.weight;
    }
    return total;
}

// Weighted Borda: position p in a list of m earns m - 1 - p points.
inline std::vector<std::string> borda(const std::map<venuesense::Ranker, Ballot>& ballots)
{
    std::map<std::string, double> score;
    const double total = weight_total(ballots);
    for (const auto& [r, b] : ballots) {
        const double w = total > 0.0 ? b.weight / total : 1.0 / double(ballots.size());
        const double m = static_cast<double>(b.order.size());
        for (std::size_t p = 0; p < b.order.size(); ++p) {
            score[b.order[p]] += w * (m - 1.0 - static_cast<double>(p));
        }
    }
    return order_by(score, wifi_scores(ballots));
}

// Weighted sum of min-max normalized scores, distances flipped.
inline std::vector<std::string> combsum(const std::map<venuesense::Ranker, Ballot>& ballots)
{
    std::map<std::string, double> score;
    const double total = weight_total(ballots);
    for (const auto& [r, b] : ballots) {
        for (const auto& id : b.order) {
            score[id] += 0.0;
        }
        if (b.scores.empty()) {
            continue;
        }
        double lo = b.scores.begin()->second;
        double hi = lo;
        for (const auto& [id, s] : b.scores) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        if (hi == lo) {
            continue;
        }
        const double w = total > 0.0 ? b.weight / total : 1.0 / double(ballots.size());
        for (const auto& [id, s] : b.scores) {
            const double n = (s - lo) / (hi - lo);
            score[id] += w * (b.distance ? 1.0 - n : n);
        }
    }
    return order_by(score, wifi_scores(ballots));
}

// Average linkage recomputed from the raw pairwise matrix at every step.
inline venuesense::Partition agglomerate(const std::vector<std::vector<double>>& pair, double cutoff, bool similarity)
{
    constexpr double kTie = 1e-9;
    venuesense::Partition clusters;
    for (std::size_t i = 0; i < pair.size(); ++i) {
        clusters.push_back({i});
    }
    const auto link = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
        double sum = 0.0;
        for (auto x : a) {
            for (auto y : b) {
                sum += pair[x][y];
            }
        }
        return sum / double(a.size() * b.size());
    };
    while (clusters.size() > 1) {
        std::size_t bi = 0, bj = 1;
        double best = link(clusters[0], clusters[1]);
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            for (std::size_t j = i + 1; j < clusters.size(); ++j) {
                const double v = link(clusters[i], clusters[j]);
                if (similarity ? v > best + kTie : v < best - kTie) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (similarity ? best < cutoff : best > cutoff) {
            break;
        }
        clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
        std::sort(clusters[bi].begin(), clusters[bi].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
    }
    return clusters;
}

inline double rss_distance(const std::map<std::string, double>& a, const std::map<std::string, double>& b,
                           double missing)
{
    std::set<std::string> macs;
    for (const auto& [m, v] : a) {
        macs.insert(m);
    }
    for (const auto& [m, v] : b) {
        macs.insert(m);
    }
    double sum = 0.0;
    for (const auto& m : macs) {
        const double x = a.count(m) ? a.at(m) : missing;
        const double y = b.count(m) ? b.at(m) : missing;
        sum += (x - y) * (x - y);
    }
    return std::sqrt(sum);
}

inline std::vector<std::vector<double>> pair_matrix(const std::vector<venuesense::CheckInBind>& binds, bool similarity)
{
    const std::size_t n = binds.size();
    std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            out[i][j] = similarity ? reference_similarity(binds[i].wifi, binds[j].wifi) : rss_distance(binds[i].rss, binds[j].rss, -100.0);
        }
    }
    return out;
}

inline Fractions centroid(const std::vector<venuesense::CheckInBind>& binds, const std::vector<std::size_t>& members)
{
    Fractions out;
    for (auto m : members) {
        for (const auto& [mac, f] : binds[m].wifi.fractions) {
            out[mac] += f / double(members.size());
        }
    }
    return out;
}

// argmin over clusters of sum(2 - wifi_similarity) to the neighbor centroids; ties to
// the larger, then earlier, cluster.
inline std::size_t select_cluster(const venuesense::Partition& clusters, const std::vector<venuesense::CheckInBind>& binds,
                       const std::vector<Fractions>& neighbors)
{
    std::vector<double> cost(clusters.size(), 0.0);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const Fractions mid = centroid(binds, clusters[c]);
        for (const auto& n : neighbors) {
            cost[c] += 2.0 - reference_similarity(mid, n);
        }
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < clusters.size(); ++c) {
        const bool cheaper = cost[c] < cost[best] - 1e-9;
        const bool tied = std::abs(cost[c] - cost[best]) <= 1e-9;
        if (cheaper || (tied && clusters[c].size() > clusters[best].size())) {
            best = c;
        }
    }
    return best;
}

// Plain recursion with memo over suffixes, on case-folded input.
inline std::size_t levenshtein(std::string a, std::string b)
{
    for (auto* s : {&a, &b}) {
        for (auto& ch : *s) {
            ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        }
    }
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
    std::function<std::size_t(std::size_t, std::size_t)> go = [&](std::size_t i, std::size_t j) -> std::size_t {
        if (i == a.size()) {
            return b.size() - j;
        }
        if (j == b.size()) {
            return a.size() - i;
        }
        const auto key = std::make_pair(i, j);
        if (auto it = memo.find(key); it != memo.end()) {
            return it->second;
        }
        const std::size_t v = a[i] == b[j] ? go(i + 1, j + 1)
                                           : 1 + std::min({go(i + 1, j), go(i, j + 1), go(i + 1, j + 1)});
        return memo[key] = v;
    };
    return go(0, 0);
}

// Winding number around a closed polygon; nonzero means inside. Points on
// the boundary are reported separately because the library counts them in.
inline int winding_number(const venuesense::Point2& p, const std::vector<venuesense::Point2>& v)
{
    int wn = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        const double cross = (b.x() - a.x()) * (p.y() - a.y()) - (p.x() - a.x()) * (b.y() - a.y());
        if (a.y() <= p.y()) {
            if (b.y() > p.y() && cross > 0) {
                ++wn;
            }
        } else if (b.y() <= p.y() && cross < 0) {
            --wn;
        }
    }
    return wn;
}

} // namespace oracle
