#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mlnet/abm.hpp"
#include "mlnet/ingest.hpp"
#include "mlnet/netcore.hpp"

namespace fixtures {

using mlnet::Matrix;

inline mlnet::NodeSetPtr nodes(std::size_t n, const std::string& prefix = "N") {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
    return std::make_shared<const mlnet::NodeSet>(ids);
}

inline Matrix square(std::vector<std::vector<double>> rows) {
    Matrix m(rows.size(), rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

/// Hand-built cascade instance. Matrices default to zero; balance-sheet
/// interbank items are derived from the matrices by network().
struct Instance {
    std::size_t n;
    Matrix ltc, cs, stc, stf;
    std::vector<double> cash, eq, deposits;
    Matrix S;
    std::vector<double> prices;

    Instance(std::size_t n_, std::size_t m)
        : n(n_), ltc(n_, n_), cs(n_, n_), stc(n_, n_), stf(n_, n_),
          cash(n_, 0.0), eq(n_, 0.0), deposits(n_, 0.0), S(n_, m), prices(m, 100.0) {}

    mlnet::MultiLayerNetwork network() const {
        auto ns = nodes(n, "B");
        mlnet::MultiLayerNetwork net(ns);
        net.add_layer(mlnet::ExposureMatrix("ltc", ns, ltc, true));
        net.add_layer(mlnet::ExposureMatrix("cs", ns, cs, true));
        net.add_layer(mlnet::ExposureMatrix("stc", ns, stc, true));
        net.add_layer(mlnet::ExposureMatrix("stf", ns, stf, true));
        std::vector<std::string> issuers;
        for (std::size_t mu = 0; mu < prices.size(); ++mu) issuers.push_back("S" + std::to_string(mu));
        net.set_holdings(mlnet::HoldingsTable::make(issuers, S, prices));

        auto b = mlnet::BalanceSheets::zeros(n);
        auto rows = [&](const Matrix& w, std::size_t i) {
            double r = 0.0;
            for (std::size_t j = 0; j < n; ++j) r += w(i, j);
            return r;
        };
        auto cols = [&](const Matrix& w, std::size_t j) {
            double c = 0.0;
            for (std::size_t i = 0; i < n; ++i) c += w(i, j);
            return c;
        };
        const auto mv = net.holdings()->market_values();
        for (std::size_t i = 0; i < n; ++i) {
            b.loans_lt[i] = rows(ltc, i);
            b.borrow_lt[i] = cols(ltc, i);
            b.cross_holdings_a[i] = rows(cs, i);
            b.cross_issued_l[i] = cols(cs, i);
            b.loans_st[i] = rows(stc, i);
            b.borrow_st[i] = cols(stc, i);
            b.repo_a[i] = rows(stf, i);
            b.repo_l[i] = cols(stf, i);
            b.cash[i] = cash[i];
            b.eq[i] = eq[i];
            b.deposits[i] = deposits[i];
            b.ext_securities[i] = mv[i];
            b.total_assets[i] = cash[i] + mv[i] + b.loans_lt[i] + b.cross_holdings_a[i] +
                                b.loans_st[i] + b.repo_a[i];
        }
        net.set_balance_sheets(std::move(b));
        return net;
    }
};

/// Four banks A -> B -> C -> D, each lending short-term to the next. A is
/// short of liquidity and withdraws from B, which then has to withdraw from
/// C, and so on. Equity is large so capital never binds.
inline Instance rollover_chain() {
    Instance x(4, 1);
    x.stc(0, 1) = 100;
    x.stc(1, 2) = 200;
    x.stc(2, 3) = 100;
    x.cash = {10, 20, 5, 1000};
    x.deposits = {300, 100, 50, 0};
    x.eq = {1e6, 1e6, 1e6, 1e6};
    return x;
}

/// Short-term ring A -> B -> C -> A (arrows point from debtor to creditor):
/// A owes B 100, B owes C 80, C owes A 100. C is short of funds and is the
/// only bank that has to sell; all three hold the one security.
inline Instance clearing_ring() {
    Instance x(3, 1);
    x.stc(1, 0) = 100;
    x.stc(2, 1) = 80;
    x.stc(0, 2) = 100;
    x.cash = {20, 0, 0};
    x.eq = {1000, 1000, 1000};
    x.S(0, 0) = 3;
    x.S(1, 0) = 2;
    x.S(2, 0) = 1;
    x.prices = {10.0};
    return x;
}

/// A roll-over decision imposed from outside: every bank withdraws fraction
/// f of its short-term claims.
inline mlnet::RolloverResult imposed_rollover(const mlnet::AbmState& s, std::vector<double> f) {
    const std::size_t n = s.size();
    mlnet::RolloverResult r;
    r.p_bar.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r.p_bar[i] += (s.W_stc(j, i) + s.W_stf(j, i)) * f[j];
    r.f = std::move(f);
    r.r_liq.assign(n, 0.0);
    r.r_cap.assign(n, 0.0);
    return r;
}

/// Seed A, B holds a long-term claim of 50 on A against equity 30, C holds a
/// claim of 20 on B against equity 100.
inline Instance golden_chain() {
    Instance x(3, 1);
    x.ltc(1, 0) = 50;
    x.ltc(2, 1) = 20;
    x.cash = {10, 10, 50};
    x.deposits = {50, 100, 100};
    x.eq = {10, 30, 100};
    return x;
}

/// Synthetic network with thin cash buffers so that roll-over withdrawals and
/// fire sales actually happen.
inline mlnet::SyntheticConfig stressed_config(std::uint64_t seed, std::size_t n = 114,
                                              std::size_t m = 500) {
    mlnet::SyntheticConfig cfg;
    cfg.seed = seed;
    cfg.n = n;
    cfg.m = m;
    cfg.cash_ratio_min = 0.02;
    cfg.cash_ratio_max = 0.15;
    return cfg;
}

/// A mid-cascade state: the stressed network after the losses of one
/// defaulted node have been booked.
inline mlnet::AbmState stressed_state(std::uint64_t seed, const mlnet::AbmParams& params,
                                      std::size_t n = 114, std::size_t m = 500) {
    const auto net = mlnet::generate_synthetic(stressed_config(seed, n, m));
    auto state = mlnet::make_state(net, params);
    std::mt19937_64 rng(seed * 7919u + 1u);
    const std::size_t victim = static_cast<std::size_t>(rng() % n);
    const std::size_t defaulted[] = {victim};
    mlnet::book_defaults(state, defaulted);
    return state;
}

}  // namespace fixtures
