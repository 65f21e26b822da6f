#pragma once

#include "venuesense/random.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace venuesense {

template <typename Scalar>
struct KMeansResult {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> centroids;  // k x dim
    std::vector<int> assignment;
    std::vector<std::size_t> sizes;
    /// Sum of squared point-to-centroid distances after every assignment step.
    std::vector<Scalar> objective_trace;

    Scalar objective() const { return objective_trace.empty() ? Scalar(0) : objective_trace.back(); }
};

/// Lloyd's algorithm with k-means++ seeding. Rows of `points` are samples.
/// Assignment ties go to the lowest centroid index; a cluster that loses all of
/// its points keeps its previous centroid, so the objective never increases.
template <typename Derived>
KMeansResult<typename Derived::Scalar> kmeans(const Eigen::MatrixBase<Derived>& points, int k,
                                              std::uint64_t seed, int max_iterations = 100)
{
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    const Eigen::Index n = points.rows();
    const Eigen::Index dim = points.cols();
    if (k <= 0) {
        throw std::invalid_argument("kmeans: k must be positive");
    }
    if (n < k) {
        throw std::invalid_argument("kmeans: fewer points than clusters");
    }

    Rng rng(seed);
    Matrix centroids(k, dim);
    centroids.row(0) = points.row(static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n))));

    std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (int c = 1; c < k; ++c) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = static_cast<double>((points.row(i) - centroids.row(c - 1)).squaredNorm());
            if (d < nearest[static_cast<std::size_t>(i)]) {
                nearest[static_cast<std::size_t>(i)] = d;
            }
        }
        centroids.row(c) = points.row(static_cast<Eigen::Index>(rng.weighted(nearest)));
    }

    KMeansResult<Scalar> result;
    result.assignment.assign(static_cast<std::size_t>(n), -1);

    for (int iter = 0; iter < std::max(1, max_iterations); ++iter) {
        bool changed = false;
        Scalar objective(0);
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            Scalar best_d = (points.row(i) - centroids.row(0)).squaredNorm();
            for (int c = 1; c < k; ++c) {
                const Scalar d = (points.row(i) - centroids.row(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            objective += best_d;
            auto& slot = result.assignment[static_cast<std::size_t>(i)];
            if (slot != best) {
                slot = best;
                changed = true;
            }
        }
        result.objective_trace.push_back(objective);
        if (!changed) {
            break;
        }

        Matrix sums = Matrix::Zero(k, dim);
        std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = result.assignment[static_cast<std::size_t>(i)];
            sums.row(c) += points.row(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centroids.row(c) = sums.row(c) / static_cast<Scalar>(counts[static_cast<std::size_t>(c)]);
            }
        }
    }

    result.sizes.assign(static_cast<std::size_t>(k), 0);
    for (int c : result.assignment) {
        ++result.sizes[static_cast<std::size_t>(c)];
    }
    result.centroids = std::move(centroids);
    return result;
}

} // namespace venuesense
