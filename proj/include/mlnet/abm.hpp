#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlnet/netcore.hpp"

namespace mlnet {

enum class PriceMode {
    /// Sold fraction measured against the initial float S0.
    Static,
    /// Sold fraction measured against the float left at the start of the
    /// round, which compounds successive sales.
    Dynamic,
};

const char* to_string(PriceMode mode) noexcept;

struct AbmParams {
    /// Interbank risk weight: one entry (uniform) or one per node.
    std::vector<double> w_b{0.2};
    double beta = 0.05;
    double gamma_bar = 0.10;
    /// Risk-weighted assets outside the model: one entry or one per node.
    std::vector<double> c_te{0.0};
    PriceMode price_mode = PriceMode::Dynamic;
    double fp_tol = 1e-10;
    std::size_t fp_max_iter = 10000;
    /// Uses each balance-sheet formula exactly as typeset (see
    /// docs/abm_model.md) instead of the single consistent asset base.
    bool strict_paper_formulas = false;
    /// Uniform overrides of the per-issuer alpha / risk weights.
    std::optional<double> alpha;
    std::optional<double> w_s;

    double interbank_weight(std::size_t i) const { return w_b.size() == 1 ? w_b[0] : w_b[i]; }
    double other_rwa(std::size_t i) const { return c_te.size() == 1 ? c_te[0] : c_te[i]; }

    /// Throws InvalidConfig / BetaOutOfRange.
    void validate(std::size_t n) const;
};

struct BankBalanceSheet {
    double c = 0.0;    ///< cash
    double e = 0.0;    ///< external securities at market value
    double u_a = 0.0;  ///< cross-securities holdings
    double u_l = 0.0;  ///< cross-securities issued
    double l_l = 0.0;  ///< long-term interbank loans
    double b_l = 0.0;  ///< long-term interbank borrowing
    double l_s = 0.0;  ///< short-term interbank loans
    double b_s = 0.0;  ///< short-term interbank borrowing
    double h_a = 0.0;  ///< repo lending (asset side)
    double h_l = 0.0;  ///< short-term funding received
    double o_a = 0.0;  ///< other assets (carried, never transacted)
    double o_l = 0.0;  ///< other liabilities (carried, never transacted)
    double d = 0.0;    ///< deposits
    double eq = 0.0;   ///< equity
};

enum Status : std::uint8_t { Normal = 0, Distress = 1, Default = 2 };

struct AbmState {
    std::vector<BankBalanceSheet> sheets;
    HoldingsTable holdings;
    std::vector<std::uint8_t> phi;
    std::vector<std::uint8_t> frozen;
    Matrix W_ltc, W_cs, W_stc, W_stf;
    std::size_t cycle = 0;

    std::size_t size() const noexcept { return sheets.size(); }

    /// Marks node i defaulted (phi = 2) and freezes its portfolio.
    void set_default(std::size_t i);
};

/// Builds the cascade state from a network carrying ltc, cs, stc, stf and
/// holdings. Throws MissingLayer.
AbmState make_state(const MultiLayerNetwork& net, const AbmParams& params);

/// Interbank assets entering the capital ratio (and the capital sell-off
/// base when not in strict mode).
double interbank_risk_base(const BankBalanceSheet& s, bool strict);
/// Short-term assets that can be withdrawn from the market.
double rollable_assets(const BankBalanceSheet& s, bool strict);

/// eq / (w_b * interbank risk base + sum_mu s w_s p + C_te); +inf when the
/// denominator is zero.
std::vector<double> capital_ratio(const AbmState& state, const AbmParams& params);

/// c < beta (d + b_s + h_l)
std::vector<std::uint8_t> liquidity_violation(const AbmState& state, const AbmParams& params);

struct RolloverResult {
    std::vector<double> f;      ///< fraction of short-term assets not rolled over
    std::vector<double> p_bar;  ///< W_st^T f: repayments each node owes
    std::vector<double> r_liq;
    std::vector<double> r_cap;
    std::size_t iterations = 0;
    double residual = 0.0;
    std::vector<std::vector<double>> history;  ///< iterates, when requested
};

/// Components of the roll-over map at f. Exposed so that callers can check
/// fixed points independently of the solver.
struct RolloverTerms {
    std::vector<double> phi;  ///< the map value
    std::vector<double> p_bar;
    std::vector<double> r_liq;
    std::vector<double> r_cap;
    std::vector<double> c_buf;
};
RolloverTerms rollover_map(const AbmState& state, const AbmParams& params, std::span<const double> f);

/// Least fixed point of the roll-over map, iterating upward from f = 0.
/// Throws NoConvergence after fp_max_iter iterations.
RolloverResult rollover_fixed_point(const AbmState& state, const AbmParams& params,
                                    bool record_history = false);

struct SellOff {
    Matrix Z;
    Matrix Z_interbank, Z_liquidity, Z_capital;
    std::vector<double> liquidity_raised;  ///< Z P at the prices used
};

/// Sales needed at the state's current prices and equity for clearing vector
/// p, given the roll-over decision. Frozen portfolios never sell.
SellOff sell_off(const AbmState& state, const AbmParams& params, const RolloverResult& rollover,
                 std::span<const double> p);

/// Exponential price impact p' = p exp(-alpha delta); S becomes S - Z.
void price_update(HoldingsTable& holdings, const Matrix& Z, PriceMode mode);

struct ClearingResult {
    std::vector<double> p;
    std::vector<double> p_bar;
    Matrix Z;
    std::vector<double> prices;  ///< prices after the cycle's sales
    std::vector<double> liquidity_raised;
    std::vector<double> inflow;  ///< Pi^T p received by each creditor
    std::size_t iterations = 0;
    std::vector<std::vector<double>> p_history;      ///< when requested
    std::vector<std::vector<double>> price_history;  ///< when requested
};

/// Greatest clearing vector on [0, p_bar], iterating down from p_bar. For
/// each iterate the sales and prices are brought to their joint equilibrium
/// before the clearing map is evaluated. Throws NoConvergence.
ClearingResult fire_sale_clearing(const AbmState& state, const AbmParams& params,
                                  const RolloverResult& rollover, bool record_history = false);

/// Writes off every surviving creditor's claims on the defaulted nodes and
/// removes those nodes from all four exposure matrices.
void book_defaults(AbmState& state, std::span<const std::size_t> defaulted);

struct CycleLog {
    std::size_t cycle = 0;
    std::size_t new_defaults = 0;
    std::size_t total_defaults = 0;
    std::size_t distressed = 0;
    double price_index = 1.0;
    double sold_eur = 0.0;
    double defaulted_capital_fraction = 0.0;
};

struct CascadeResult {
    std::size_t seed_node = 0;
    double beta = 0.0;
    std::size_t additional_defaults = 0;
    double defaulted_capital_fraction = 0.0;
    std::size_t cycles = 0;
    std::vector<CycleLog> per_cycle_log;
    std::vector<std::uint8_t> final_phi;
};

/// Exogenous default of seed_node followed by propagation cycles until a
/// cycle ends without new defaults.
CascadeResult run_cascade(const MultiLayerNetwork& net, std::size_t seed_node,
                          const AbmParams& params);

/// One cascade per (beta, seed); results ordered by beta, then seed.
std::vector<CascadeResult> systemic_sweep(const MultiLayerNetwork& net, const AbmParams& params,
                                          std::span<const double> beta_grid, unsigned threads = 1);

}  // namespace mlnet
