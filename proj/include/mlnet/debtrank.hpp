#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mlnet/netcore.hpp"

namespace mlnet {

enum class Calibration { Credit, Liquidity };

/// Which distress level lets a node propagate. AnyDistress (h > 0) is the
/// classic DebtRank rule; FullDefault requires h = 1.
enum class DistressThreshold { AnyDistress, FullDefault };

const char* to_string(Calibration c) noexcept;
const char* to_string(DistressThreshold t) noexcept;

struct PropagationWeights {
    Matrix w;
    Calibration calibration = Calibration::Credit;
    std::vector<std::string> source_layers;
    std::optional<double> beta;
};

struct LiquidityBuffers {
    std::vector<double> liq;
    double beta = 0.0;
};

struct EconomicValueVector {
    std::vector<double> v;
};

struct DebtRankRun {
    std::vector<std::vector<double>> H;
    std::vector<std::vector<unsigned char>> D;
    std::vector<std::vector<unsigned char>> I;
    std::size_t seed_node = 0;
    std::size_t T = 1;
    double dr = 0.0;
};

/// w(i,j) = min(1, exposure(i,j) / eq_i); a positive exposure against a
/// non-positive buffer maps to 1.
PropagationWeights credit_weights(const ExposureMatrix& layer, std::span<const double> eq);

/// liq_i = cash_i - beta * deposits_i. Throws BetaOutOfRange.
LiquidityBuffers liquidity_buffers(const BalanceSheets& bs, double beta);

/// Transposed funding exposures: w(i,j) = min(1, layer(j,i) / liq_i).
PropagationWeights liquidity_weights(const ExposureMatrix& layer, const LiquidityBuffers& liq);

/// Row-sum share of the total layer weight. Throws EmptyLayer.
EconomicValueVector economic_value(const ExposureMatrix& layer);

/// Reusable buffers for the trajectory-free path.
struct DebtRankWorkspace {
    std::vector<double> h, h0, pulse, next;
    std::vector<unsigned char> d, inactive;
};

/// Runs the recursion from a single defaulted seed and returns only DR.
/// Shares the update code with run_debtrank; used by sweeps.
double debtrank_score(const Matrix& w, std::span<const double> v, std::size_t seed,
                      DistressThreshold threshold, DebtRankWorkspace& ws,
                      std::size_t* steps = nullptr);

/// Full run with the H, D, I trajectories. Throws UnknownSeed.
DebtRankRun run_debtrank(const PropagationWeights& weights, const EconomicValueVector& v,
                         std::size_t seed_node, DistressThreshold threshold);
DebtRankRun run_debtrank(const PropagationWeights& weights, const EconomicValueVector& v,
                         const NodeSet& nodes, std::string_view seed_id,
                         DistressThreshold threshold);

struct DebtRankRow {
    std::size_t node = 0;
    std::string layer;
    std::optional<double> beta;
    DistressThreshold mode = DistressThreshold::AnyDistress;
    double dr = 0.0;
};

/// One DebtRank run per node on every layer of the calibration (ltc and cs
/// for credit; stc and stf per beta for liquidity). Rows are ordered by
/// layer, then beta, then node. An empty layer yields dr = 0 throughout.
std::vector<DebtRankRow> debtrank_sweep(const MultiLayerNetwork& net, Calibration calibration,
                                        std::span<const double> betas,
                                        DistressThreshold threshold = DistressThreshold::AnyDistress,
                                        unsigned threads = 1);

std::vector<std::string> calibration_layers(Calibration calibration);

struct SuperpositionRow {
    std::size_t node = 0;
    double dr_aggregated = 0.0;
    double dr_linear_sum = 0.0;
    /// 1 = largest average of the two methods; ties broken by node order.
    std::size_t avg_rank = 0;
};

/// Compares DR on the edgewise sum of two layers with the sum of the per-layer
/// DRs. Liquidity buffers are computed once and shared by both methods.
std::vector<SuperpositionRow> superposition_experiment(
    const MultiLayerNetwork& net, const std::pair<std::string, std::string>& pair,
    Calibration calibration, std::optional<double> beta = std::nullopt,
    DistressThreshold threshold = DistressThreshold::AnyDistress, unsigned threads = 1);

}  // namespace mlnet
