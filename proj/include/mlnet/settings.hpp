#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlnet/abm.hpp"
#include "mlnet/ingest.hpp"

namespace mlnet {

using Setting = std::pair<std::string, std::string>;

/// Flat "key = value" text: one pair per line, '#' starts a comment, blank
/// lines are skipped. Throws ConfigError with the line number.
std::vector<Setting> parse_settings(std::string_view text);

/// Synthetic generator keys: n, m, seed, core_fraction, holdings_density,
/// core_holdings_boost, quantity_mu, quantity_sigma, price_mu, price_sigma,
/// equity_scale, deposit_share, cash_ratio_min, cash_ratio_max,
/// other_assets_mult and <layer>.{core_core,core_periphery,
/// periphery_periphery,mu,sigma}. Throws ConfigError naming the key.
void apply_setting(SyntheticConfig& cfg, std::string_view key, std::string_view value);

/// Cascade keys: w_b, beta, gamma_bar, c_te, price_mode, fp_tol,
/// fp_max_iter, strict_paper_formulas, alpha, w_s. List values are
/// comma-separated.
void apply_setting(AbmParams& params, std::string_view key, std::string_view value);

double parse_real(std::string_view key, std::string_view value);
std::vector<double> parse_real_list(std::string_view key, std::string_view value);
unsigned long long parse_unsigned(std::string_view key, std::string_view value);
bool parse_bool(std::string_view key, std::string_view value);

}  // namespace mlnet
