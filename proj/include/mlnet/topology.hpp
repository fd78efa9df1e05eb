#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mlnet/netcore.hpp"

namespace mlnet {

struct DegreeProfile {
    std::string layer_id;
    std::vector<std::size_t> in_degree;
    std::vector<std::size_t> out_degree;
};

/// Counts of nonzero off-diagonal entries per column (in) and row (out).
DegreeProfile degree_profile(const ExposureMatrix& layer);

enum class DistanceMode {
    /// Edge length max_w / w: strong exposures are short, the strongest edge
    /// has length one.
    InverseWeight,
    Unweighted,
};

struct CentralityTable {
    std::string layer_id;
    std::vector<double> pagerank;     ///< sums to one
    std::vector<double> betweenness;  ///< divided by (n-1)(n-2)
    std::vector<double> closeness;    ///< harmonic, divided by n-1
    double median_pagerank = 0.0;
    double median_betweenness = 0.0;
    double median_closeness = 0.0;
    std::size_t pagerank_iterations = 0;
};

/// Weighted PageRank by power iteration (uniform teleport, dangling mass
/// spread uniformly, L1 tolerance 1e-12) plus betweenness and harmonic
/// closeness on all-pairs shortest paths. Throws InvalidDamping.
CentralityTable centralities(const ExposureMatrix& layer, double damping = 0.85,
                             DistanceMode mode = DistanceMode::InverseWeight);

std::vector<double> pagerank(const ExposureMatrix& layer, double damping = 0.85,
                             double tolerance = 1e-12, std::size_t* iterations = nullptr);

struct DensityCurve {
    std::vector<double> xs;
    std::vector<double> ys;
    double bandwidth = 0.0;
};

/// Gaussian KDE with Scott's bandwidth sigma * k^(-1/5); the grid spans four
/// bandwidths beyond the sample range. Throws DegenerateSample.
DensityCurve kde_density(std::span<const double> samples, std::size_t grid_points = 256);

double median(std::vector<double> values);

}  // namespace mlnet
