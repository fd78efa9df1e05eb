#include "mlnet/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace mlnet {

DegreeProfile degree_profile(const ExposureMatrix& layer) {
    const std::size_t n = layer.size();
    DegreeProfile p{layer.layer_id(), std::vector<std::size_t>(n, 0), std::vector<std::size_t>(n, 0)};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && layer(i, j) != 0.0) {
                ++p.out_degree[i];
                ++p.in_degree[j];
            }
    return p;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t k = values.size();
    return k % 2 ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
}

std::vector<double> pagerank(const ExposureMatrix& layer, double damping, double tolerance,
                             std::size_t* iterations) {
    if (!(damping > 0.0 && damping < 1.0))
        throw Error(ErrorCode::InvalidDamping, "damping must lie in (0,1)");
    const std::size_t n = layer.size();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> out_weight(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out_weight[i] += layer(i, j);

    std::vector<double> pr(n, inv_n), next(n);
    std::size_t it = 0;
    constexpr std::size_t kMaxIterations = 100000;
    for (; it < kMaxIterations; ++it) {
        double dangling = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (out_weight[i] == 0.0) dangling += pr[i];
        const double base = (1.0 - damping) * inv_n + damping * dangling * inv_n;
        std::fill(next.begin(), next.end(), base);
        for (std::size_t i = 0; i < n; ++i) {
            if (out_weight[i] == 0.0) continue;
            const double share = damping * pr[i] / out_weight[i];
            auto row = layer.weights().row(i);
            for (std::size_t j = 0; j < n; ++j) next[j] += share * row[j];
        }
        double change = 0.0;
        for (std::size_t j = 0; j < n; ++j) change += std::abs(next[j] - pr[j]);
        pr.swap(next);
        if (change < tolerance) {
            ++it;
            break;
        }
    }
    double total = 0.0;
    for (double x : pr) total += x;
    for (double& x : pr) x /= total;
    if (iterations) *iterations = it;
    return pr;
}

namespace {

// Brandes' accumulation over single-source shortest paths (Dijkstra).
void shortest_path_centralities(const ExposureMatrix& layer, DistanceMode mode,
                                std::vector<double>& betweenness, std::vector<double>& closeness) {
    const std::size_t n = layer.size();
    double max_w = 0.0;
    for (double x : layer.weights().values()) max_w = std::max(max_w, x);

    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && layer(i, j) > 0.0)
                adj[i].emplace_back(j, mode == DistanceMode::Unweighted ? 1.0 : max_w / layer(i, j));

    constexpr double inf = std::numeric_limits<double>::infinity();
    constexpr double rel_eps = 1e-12;
    std::vector<double> dist(n), sigma(n), delta(n);
    std::vector<std::vector<std::size_t>> preds(n);
    std::vector<std::size_t> order;
    order.reserve(n);

    for (std::size_t s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), inf);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : preds) p.clear();
        order.clear();

        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
        std::vector<bool> settled(n, false);
        dist[s] = 0.0;
        sigma[s] = 1.0;
        queue.emplace(0.0, s);
        while (!queue.empty()) {
            auto [d, u] = queue.top();
            queue.pop();
            if (settled[u]) continue;
            settled[u] = true;
            order.push_back(u);
            for (auto [v, len] : adj[u]) {
                if (settled[v]) continue;
                const double nd = d + len;
                const double tol = rel_eps * std::max(1.0, nd);
                if (nd < dist[v] - tol) {
                    dist[v] = nd;
                    sigma[v] = sigma[u];
                    preds[v].assign(1, u);
                    queue.emplace(nd, v);
                } else if (std::abs(nd - dist[v]) <= tol) {
                    sigma[v] += sigma[u];
                    preds[v].push_back(u);
                }
            }
        }

        double harmonic = 0.0;
        for (std::size_t t = 0; t < n; ++t)
            if (t != s && dist[t] < inf) harmonic += 1.0 / dist[t];
        closeness[s] = n > 1 ? harmonic / static_cast<double>(n - 1) : 0.0;

        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            const std::size_t w = *it;
            for (std::size_t v : preds[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            if (w != s) betweenness[w] += delta[w];
        }
    }
    if (n > 2) {
        const double norm = static_cast<double>(n - 1) * static_cast<double>(n - 2);
        for (double& b : betweenness) b /= norm;
    } else {
        std::fill(betweenness.begin(), betweenness.end(), 0.0);
    }
}

}  // namespace

CentralityTable centralities(const ExposureMatrix& layer, double damping, DistanceMode mode) {
    CentralityTable t;
    t.layer_id = layer.layer_id();
    t.pagerank = pagerank(layer, damping, 1e-12, &t.pagerank_iterations);
    t.betweenness.assign(layer.size(), 0.0);
    t.closeness.assign(layer.size(), 0.0);
    shortest_path_centralities(layer, mode, t.betweenness, t.closeness);
    t.median_pagerank = median(t.pagerank);
    t.median_betweenness = median(t.betweenness);
    t.median_closeness = median(t.closeness);
    return t;
}

DensityCurve kde_density(std::span<const double> samples, std::size_t grid_points) {
    const std::size_t k = samples.size();
    if (k < 2) throw Error(ErrorCode::DegenerateSample, "KDE needs at least two samples");
    if (grid_points < 2) throw Error(ErrorCode::InvalidArgument, "KDE grid needs two points");
    for (double x : samples)
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidArgument, "non-finite KDE sample");

    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(k);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(k - 1));
    if (!(sd > 0.0)) throw Error(ErrorCode::DegenerateSample, "all KDE samples are equal");

    const double h = sd * std::pow(static_cast<double>(k), -0.2);
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    const double lo = *lo_it - 4.0 * h;
    const double hi = *hi_it + 4.0 * h;

    DensityCurve c;
    c.bandwidth = h;
    c.xs.resize(grid_points);
    c.ys.resize(grid_points);
    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    const double norm = 1.0 / (static_cast<double>(k) * h * std::sqrt(2.0 * std::numbers::pi));
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double x = lo + step * static_cast<double>(g);
        double y = 0.0;
        for (double s : samples) {
            const double z = (x - s) / h;
            y += std::exp(-0.5 * z * z);
        }
        c.xs[g] = x;
        c.ys[g] = y * norm;
    }
    return c;
}

}  // namespace mlnet
