#include "mlnet/debtrank.hpp"

#include <algorithm>
#include <numeric>

#include "mlnet/parallel.hpp"

namespace mlnet {

const char* to_string(Calibration c) noexcept {
    return c == Calibration::Credit ? "credit" : "liquidity";
}

const char* to_string(DistressThreshold t) noexcept {
    return t == DistressThreshold::AnyDistress ? "any-distress" : "full-default";
}

namespace {

PropagationWeights buffer_scaled(const ExposureMatrix& layer, std::span<const double> buffer,
                                 bool transpose, Calibration calibration) {
    const std::size_t n = layer.size();
    if (buffer.size() != n)
        throw Error(ErrorCode::LengthMismatch, "buffer vector length differs from node count");
    PropagationWeights pw;
    pw.w = Matrix(n, n);
    pw.calibration = calibration;
    pw.source_layers = {layer.layer_id()};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double x = transpose ? layer(j, i) : layer(i, j);
            if (x <= 0.0) continue;
            pw.w(i, j) = buffer[i] <= 0.0 ? 1.0 : std::min(1.0, x / buffer[i]);
        }
    }
    return pw;
}

bool crosses(double h, DistressThreshold threshold) {
    return threshold == DistressThreshold::AnyDistress ? h > 0.0 : h >= 1.0;
}

}  // namespace

PropagationWeights credit_weights(const ExposureMatrix& layer, std::span<const double> eq) {
    return buffer_scaled(layer, eq, false, Calibration::Credit);
}

LiquidityBuffers liquidity_buffers(const BalanceSheets& bs, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0))
        throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0,1]");
    if (bs.cash.size() != bs.deposits.size())
        throw Error(ErrorCode::LengthMismatch, "cash and deposits differ in length");
    LiquidityBuffers out;
    out.beta = beta;
    out.liq.resize(bs.cash.size());
    for (std::size_t i = 0; i < out.liq.size(); ++i) out.liq[i] = bs.cash[i] - beta * bs.deposits[i];
    return out;
}

PropagationWeights liquidity_weights(const ExposureMatrix& layer, const LiquidityBuffers& liq) {
    auto pw = buffer_scaled(layer, liq.liq, true, Calibration::Liquidity);
    pw.beta = liq.beta;
    return pw;
}

EconomicValueVector economic_value(const ExposureMatrix& layer) {
    const std::size_t n = layer.size();
    std::vector<double> rows(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rows[i] += layer(i, j);
    double total = 0.0;
    for (double r : rows) total += r;
    if (!(total > 0.0))
        throw Error(ErrorCode::EmptyLayer, "layer '" + layer.layer_id() + "' has no weight");
    for (double& r : rows) r /= total;
    return {std::move(rows)};
}

namespace {

// One step of the recursion. On entry ws.h/ws.d/ws.inactive hold H(t-1),
// D(t-1), I(t-1); on exit they hold H(t), D(t), I(t). Returns whether D(t)
// has any node set.
bool debtrank_step(const Matrix& w, DistressThreshold threshold, DebtRankWorkspace& ws) {
    const std::size_t n = ws.h.size();
    std::fill(ws.pulse.begin(), ws.pulse.end(), 0.0);
    // pulse = W (H o D), accumulated over distressed columns in index order.
    for (std::size_t j = 0; j < n; ++j) {
        if (!ws.d[j]) continue;
        const double hj = ws.h[j];
        for (std::size_t i = 0; i < n; ++i) ws.pulse[i] += w(i, j) * hj;
    }
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        ws.next[i] = std::min(ws.h[i] + ws.pulse[i], 1.0);
        // I(t) = min(I(t-1) + D(t-1), 1)
        if (ws.d[i]) ws.inactive[i] = 1;
    }
    for (std::size_t i = 0; i < n; ++i) {
        // A node propagates once: when it first crosses the threshold while
        // still active.
        ws.d[i] = (!ws.inactive[i] && crosses(ws.next[i], threshold)) ? 1 : 0;
        any = any || ws.d[i];
    }
    ws.h.swap(ws.next);
    return any;
}

void debtrank_init(std::size_t n, std::size_t seed, DebtRankWorkspace& ws) {
    ws.h.assign(n, 0.0);
    ws.pulse.assign(n, 0.0);
    ws.next.assign(n, 0.0);
    ws.d.assign(n, 0);
    ws.inactive.assign(n, 0);
    ws.h[seed] = 1.0;
    ws.d[seed] = 1;
    ws.h0 = ws.h;
}

double debtrank_value(std::span<const double> h_final, std::span<const double> h_initial,
                      std::span<const double> v) {
    double dr = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) dr += (h_final[j] - h_initial[j]) * v[j];
    return dr;
}

void check_seed(std::size_t n, std::size_t seed, std::span<const double> v, const Matrix& w) {
    if (seed >= n) throw Error(ErrorCode::UnknownSeed, "seed index out of range");
    if (v.size() != n || w.rows() != n || w.cols() != n)
        throw Error(ErrorCode::LengthMismatch, "weights and economic values differ in size");
}

}  // namespace

double debtrank_score(const Matrix& w, std::span<const double> v, std::size_t seed,
                      DistressThreshold threshold, DebtRankWorkspace& ws, std::size_t* steps) {
    const std::size_t n = v.size();
    check_seed(w.rows(), seed, v, w);
    debtrank_init(n, seed, ws);
    std::size_t t = 1;
    while (debtrank_step(w, threshold, ws)) ++t;
    ++t;  // the step that produced an all-zero D
    if (steps) *steps = t;
    return debtrank_value(ws.h, ws.h0, v);
}

DebtRankRun run_debtrank(const PropagationWeights& weights, const EconomicValueVector& v,
                         std::size_t seed_node, DistressThreshold threshold) {
    const std::size_t n = weights.w.rows();
    check_seed(n, seed_node, v.v, weights.w);
    DebtRankWorkspace ws;
    debtrank_init(n, seed_node, ws);

    DebtRankRun run;
    run.seed_node = seed_node;
    run.H.push_back(ws.h);
    run.D.push_back(ws.d);
    run.I.push_back(ws.inactive);
    bool more = true;
    while (more) {
        more = debtrank_step(weights.w, threshold, ws);
        run.H.push_back(ws.h);
        run.D.push_back(ws.d);
        run.I.push_back(ws.inactive);
    }
    run.T = run.H.size();
    run.dr = debtrank_value(run.H.back(), run.H.front(), v.v);
    return run;
}

DebtRankRun run_debtrank(const PropagationWeights& weights, const EconomicValueVector& v,
                         const NodeSet& nodes, std::string_view seed_id,
                         DistressThreshold threshold) {
    const auto seed = nodes.find(seed_id);
    if (!seed) throw Error(ErrorCode::UnknownSeed, "unknown seed node '" + std::string(seed_id) + "'");
    return run_debtrank(weights, v, *seed, threshold);
}

std::vector<std::string> calibration_layers(Calibration calibration) {
    if (calibration == Calibration::Credit) return {"ltc", "cs"};
    return {"stc", "stf"};
}

namespace {

// DR of every node as seed; all zeros when the layer carries no weight.
std::vector<double> all_seeds(const PropagationWeights& w, const ExposureMatrix& layer,
                              DistressThreshold threshold, unsigned threads) {
    const std::size_t n = layer.size();
    std::vector<double> out(n, 0.0);
    if (!(layer.total_weight() > 0.0)) return out;
    const EconomicValueVector v = economic_value(layer);
    parallel_for(n, threads, [&](std::size_t seed) {
        DebtRankWorkspace ws;
        out[seed] = debtrank_score(w.w, v.v, seed, threshold, ws);
    });
    return out;
}

PropagationWeights calibrated(const MultiLayerNetwork& net, const ExposureMatrix& layer,
                              Calibration calibration, const LiquidityBuffers* liq) {
    if (calibration == Calibration::Credit)
        return credit_weights(layer, net.balance_sheets().eq);
    return liquidity_weights(layer, *liq);
}

}  // namespace

std::vector<DebtRankRow> debtrank_sweep(const MultiLayerNetwork& net, Calibration calibration,
                                        std::span<const double> betas, DistressThreshold threshold,
                                        unsigned threads) {
    const auto names = calibration_layers(calibration);
    for (const auto& name : names) net.layer(name);  // MissingLayer before any work
    if (calibration == Calibration::Liquidity && betas.empty())
        throw Error(ErrorCode::InvalidArgument, "liquidity sweep needs at least one beta");
    for (double b : betas)
        if (!(b >= 0.0 && b <= 1.0)) throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0,1]");

    std::vector<DebtRankRow> rows;
    for (const auto& name : names) {
        const ExposureMatrix& layer = net.layer(name);
        auto emit = [&](std::optional<double> beta, const std::vector<double>& dr) {
            for (std::size_t i = 0; i < dr.size(); ++i) rows.push_back({i, name, beta, threshold, dr[i]});
        };
        if (calibration == Calibration::Credit) {
            emit(std::nullopt, all_seeds(calibrated(net, layer, calibration, nullptr), layer,
                                         threshold, threads));
        } else {
            for (double beta : betas) {
                const LiquidityBuffers liq = liquidity_buffers(net.balance_sheets(), beta);
                emit(beta, all_seeds(calibrated(net, layer, calibration, &liq), layer, threshold,
                                     threads));
            }
        }
    }
    return rows;
}

std::vector<SuperpositionRow> superposition_experiment(
    const MultiLayerNetwork& net, const std::pair<std::string, std::string>& pair,
    Calibration calibration, std::optional<double> beta, DistressThreshold threshold,
    unsigned threads) {
    const ExposureMatrix& first = net.layer(pair.first);
    const ExposureMatrix& second = net.layer(pair.second);
    if (!first.directed() || !second.directed())
        throw Error(ErrorCode::InvalidArgument, "superposition needs directed exposure layers");

    std::optional<LiquidityBuffers> liq;
    if (calibration == Calibration::Liquidity) {
        if (!beta) throw Error(ErrorCode::InvalidArgument, "liquidity superposition needs beta");
        liq = liquidity_buffers(net.balance_sheets(), *beta);
    }
    const LiquidityBuffers* liq_ptr = liq ? &*liq : nullptr;

    const ExposureMatrix both[] = {first, second};
    const ExposureMatrix aggregated = flatten(both, pair.first + "+" + pair.second).layer;

    const auto dr_agg = all_seeds(calibrated(net, aggregated, calibration, liq_ptr), aggregated,
                                  threshold, threads);
    const auto dr_first =
        all_seeds(calibrated(net, first, calibration, liq_ptr), first, threshold, threads);
    const auto dr_second =
        all_seeds(calibrated(net, second, calibration, liq_ptr), second, threshold, threads);

    const std::size_t n = net.size();
    std::vector<SuperpositionRow> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = {i, dr_agg[i], dr_first[i] + dr_second[i], 0};

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rows[a].dr_aggregated + rows[a].dr_linear_sum >
               rows[b].dr_aggregated + rows[b].dr_linear_sum;
    });
    for (std::size_t r = 0; r < n; ++r) rows[order[r]].avg_rank = r + 1;
    return rows;
}

}  // namespace mlnet
