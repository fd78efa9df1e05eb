#include "mlnet/settings.hpp"

#include <charconv>
#include <cmath>

#include "textio.hpp"

namespace mlnet {

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
    throw Error(ErrorCode::ConfigError, "setting '" + std::string(key) + "': expected " + expected +
                                            ", got '" + std::string(value) + "'");
}

[[noreturn]] void unknown_key(std::string_view key) {
    throw Error(ErrorCode::ConfigError, "unknown setting '" + std::string(key) + "'");
}

}  // namespace

std::vector<Setting> parse_settings(std::string_view text) {
    std::vector<Setting> out;
    std::size_t line_no = 0, pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = textio::trim(line);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": expected key = value");
        const auto key = textio::trim(line.substr(0, eq));
        const auto value = textio::trim(line.substr(eq + 1));
        if (key.empty()) throw Error(ErrorCode::ConfigError, "line " + std::to_string(line_no) + ": empty key");
        out.emplace_back(std::string(key), std::string(value));
        if (end == text.size()) break;
    }
    return out;
}

double parse_real(std::string_view key, std::string_view value) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(x))
        bad_value(key, value, "a finite number");
    return x;
}

std::vector<double> parse_real_list(std::string_view key, std::string_view value) {
    std::vector<double> out;
    for (auto part : textio::split(value, ',')) out.push_back(parse_real(key, textio::trim(part)));
    if (out.empty()) bad_value(key, value, "a non-empty list");
    return out;
}

unsigned long long parse_unsigned(std::string_view key, std::string_view value) {
    unsigned long long x = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
    if (ec != std::errc{} || ptr != value.data() + value.size()) bad_value(key, value, "an unsigned integer");
    return x;
}

bool parse_bool(std::string_view key, std::string_view value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad_value(key, value, "true or false");
}

void apply_setting(SyntheticConfig& cfg, std::string_view key, std::string_view value) {
    auto real = [&] { return parse_real(key, value); };
    if (key == "n") cfg.n = parse_unsigned(key, value);
    else if (key == "m") cfg.m = parse_unsigned(key, value);
    else if (key == "seed") cfg.seed = parse_unsigned(key, value);
    else if (key == "core_fraction") cfg.core_fraction = real();
    else if (key == "holdings_density") cfg.holdings_density = real();
    else if (key == "core_holdings_boost") cfg.core_holdings_boost = real();
    else if (key == "quantity_mu") cfg.quantity.mu = real();
    else if (key == "quantity_sigma") cfg.quantity.sigma = real();
    else if (key == "price_mu") cfg.price.mu = real();
    else if (key == "price_sigma") cfg.price.sigma = real();
    else if (key == "equity_scale") cfg.equity_scale = real();
    else if (key == "deposit_share") cfg.deposit_share = real();
    else if (key == "cash_ratio_min") cfg.cash_ratio_min = real();
    else if (key == "cash_ratio_max") cfg.cash_ratio_max = real();
    else if (key == "other_assets_mult") cfg.other_assets_mult = real();
    else {
        const auto dot = key.find('.');
        if (dot == std::string_view::npos) unknown_key(key);
        const auto layer = key.substr(0, dot);
        const auto field = key.substr(dot + 1);
        for (auto& spec : cfg.layers) {
            if (spec.name != layer) continue;
            if (field == "core_core") spec.density.core_core = real();
            else if (field == "core_periphery") spec.density.core_periphery = real();
            else if (field == "periphery_periphery") spec.density.periphery_periphery = real();
            else if (field == "mu") spec.weights.mu = real();
            else if (field == "sigma") spec.weights.sigma = real();
            else unknown_key(key);
            return;
        }
        unknown_key(key);
    }
}

void apply_setting(AbmParams& p, std::string_view key, std::string_view value) {
    if (key == "w_b") p.w_b = parse_real_list(key, value);
    else if (key == "c_te") p.c_te = parse_real_list(key, value);
    else if (key == "beta") p.beta = parse_real(key, value);
    else if (key == "gamma_bar") p.gamma_bar = parse_real(key, value);
    else if (key == "fp_tol") p.fp_tol = parse_real(key, value);
    else if (key == "fp_max_iter") p.fp_max_iter = parse_unsigned(key, value);
    else if (key == "strict_paper_formulas") p.strict_paper_formulas = parse_bool(key, value);
    else if (key == "alpha") p.alpha = parse_real(key, value);
    else if (key == "w_s") p.w_s = parse_real(key, value);
    else if (key == "price_mode") {
        if (value == "static") p.price_mode = PriceMode::Static;
        else if (value == "dynamic") p.price_mode = PriceMode::Dynamic;
        else bad_value(key, value, "static or dynamic");
    } else {
        unknown_key(key);
    }
}

}  // namespace mlnet
