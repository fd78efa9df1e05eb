#include "mlnet/abm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mlnet/parallel.hpp"

namespace mlnet {

const char* to_string(PriceMode mode) noexcept {
    return mode == PriceMode::Static ? "static" : "dynamic";
}

void AbmParams::validate(std::size_t n) const {
    auto bad = [](const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); };
    auto check_vector = [&](const std::vector<double>& v, const char* name) {
        if (v.size() != 1 && v.size() != n)
            bad(std::string(name) + " must hold one value or one per node");
        for (double x : v)
            if (!(std::isfinite(x) && x >= 0.0)) bad(std::string(name) + " must be finite and >= 0");
    };
    check_vector(w_b, "w_b");
    check_vector(c_te, "c_te");
    if (!(beta >= 0.0 && beta <= 1.0)) throw Error(ErrorCode::BetaOutOfRange, "beta must lie in [0,1]");
    if (!(gamma_bar >= 0.0 && gamma_bar < 1.0)) bad("gamma_bar must lie in [0,1)");
    if (!(fp_tol > 0.0)) bad("fp_tol must be positive");
    if (fp_max_iter == 0) bad("fp_max_iter must be positive");
    if (alpha && !(*alpha >= 0.0 && *alpha <= 1.0)) bad("alpha must lie in [0,1]");
    if (w_s && !(std::isfinite(*w_s) && *w_s >= 0.0)) bad("w_s must be finite and >= 0");
}

void AbmState::set_default(std::size_t i) {
    phi[i] = Default;
    frozen[i] = 1;
}

AbmState make_state(const MultiLayerNetwork& net, const AbmParams& params) {
    const std::size_t n = net.size();
    const ExposureMatrix& ltc = net.layer("ltc");
    const ExposureMatrix& cs = net.layer("cs");
    const ExposureMatrix& stc = net.layer("stc");
    const ExposureMatrix& stf = net.layer("stf");
    if (!net.holdings())
        throw Error(ErrorCode::MissingLayer, "the cascade model needs a holdings table");
    params.validate(n);

    const BalanceSheets& bs = net.balance_sheets();
    if (bs.size() != n) throw Error(ErrorCode::LengthMismatch, "balance sheets differ from node count");

    AbmState s;
    s.holdings = *net.holdings();
    if (params.alpha) std::fill(s.holdings.alpha.begin(), s.holdings.alpha.end(), *params.alpha);
    if (params.w_s)
        std::fill(s.holdings.risk_weights.begin(), s.holdings.risk_weights.end(), *params.w_s);
    s.holdings.validate(n);
    const auto mv = s.holdings.market_values();

    s.sheets.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        BankBalanceSheet& b = s.sheets[i];
        b.c = bs.cash[i];
        b.e = mv[i];
        b.u_a = bs.cross_holdings_a[i];
        b.u_l = bs.cross_issued_l[i];
        b.l_l = bs.loans_lt[i];
        b.b_l = bs.borrow_lt[i];
        b.l_s = bs.loans_st[i];
        b.b_s = bs.borrow_st[i];
        b.h_a = bs.repo_a[i];
        b.h_l = bs.repo_l[i];
        b.o_a = bs.other_a[i];
        b.o_l = bs.other_l[i];
        b.d = bs.deposits[i];
        b.eq = bs.eq[i];
    }
    s.phi.assign(n, Normal);
    s.frozen.assign(n, 0);
    s.W_ltc = ltc.weights();
    s.W_cs = cs.weights();
    s.W_stc = stc.weights();
    s.W_stf = stf.weights();
    return s;
}

double interbank_risk_base(const BankBalanceSheet& s, bool strict) {
    return strict ? s.l_l + s.l_s + s.u_a : s.l_l + s.l_s + s.u_a + s.h_a;
}

double rollable_assets(const BankBalanceSheet& s, bool strict) {
    return strict ? s.l_s + s.u_a : s.l_s + s.h_a;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack for constraint re-checks after a cycle's actions.
constexpr double kConstraintSlack = 1e-6;

double short_liabilities(const BankBalanceSheet& s) { return s.d + s.b_s + s.h_l; }

// Base of the interbank term in the capital sell-off.
double capital_sale_base(const BankBalanceSheet& s, bool strict) {
    return strict ? s.l_l + s.l_s + s.h_a : interbank_risk_base(s, false);
}

std::vector<double> risk_weighted_securities(const AbmState& state) {
    const auto& h = state.holdings;
    std::vector<double> out(state.size(), 0.0);
    for (std::size_t i = 0; i < state.size(); ++i) {
        auto row = h.quantities.row(i);
        double acc = 0.0;
        for (std::size_t mu = 0; mu < row.size(); ++mu) acc += row[mu] * h.risk_weights[mu] * h.prices[mu];
        out[i] = acc;
    }
    return out;
}

// owed(i, j): what i must repay j per unit of j's withdrawal fraction.
Matrix short_term_owed(const AbmState& s) {
    const std::size_t n = s.size();
    Matrix owed(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) owed(i, j) = s.W_stc(j, i) + s.W_stf(j, i);
    return owed;
}

std::string error_context(const Error& e, const std::string& prefix) {
    return prefix + ": " + e.what();
}

}  // namespace

std::vector<double> capital_ratio(const AbmState& state, const AbmParams& params) {
    const auto sv = risk_weighted_securities(state);
    std::vector<double> out(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        const auto& b = state.sheets[i];
        const double den = params.interbank_weight(i) * interbank_risk_base(b, params.strict_paper_formulas) +
                           sv[i] + params.other_rwa(i);
        out[i] = den > 0.0 ? b.eq / den : kInf;
    }
    return out;
}

std::vector<std::uint8_t> liquidity_violation(const AbmState& state, const AbmParams& params) {
    std::vector<std::uint8_t> out(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) {
        const auto& b = state.sheets[i];
        out[i] = b.c < params.beta * short_liabilities(b) ? 1 : 0;
    }
    return out;
}

namespace {

class RolloverSystem {
public:
    RolloverSystem(const AbmState& state, const AbmParams& params)
        : n_(state.size()), beta_(params.beta), owed_(short_term_owed(state)) {
        const bool strict = params.strict_paper_formulas;
        const auto sv = risk_weighted_securities(state);
        L_.resize(n_);
        l_.resize(n_);
        c_.resize(n_);
        x_.assign(n_, 0.0);
        cap_.assign(n_, 0);
        active_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto& b = state.sheets[i];
            L_[i] = short_liabilities(b);
            l_[i] = rollable_assets(b, strict);
            c_[i] = b.c;
            active_[i] = state.phi[i] != Default;
            const double gw = params.gamma_bar * params.interbank_weight(i);
            if (gw > 0.0) {
                cap_[i] = 1;
                x_[i] = (params.gamma_bar * (params.other_rwa(i) + sv[i]) +
                         gw * interbank_risk_base(b, strict) - b.eq) /
                        gw;
            }
        }
    }

    void eval(std::span<const double> f, RolloverTerms& t) const {
        t.phi.resize(n_);
        t.p_bar.resize(n_);
        t.r_liq.resize(n_);
        t.r_cap.resize(n_);
        t.c_buf.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            auto row = owed_.row(i);
            double y = 0.0;
            for (std::size_t j = 0; j < n_; ++j) y += row[j] * f[j];
            t.p_bar[i] = y;
        }
        for (std::size_t i = 0; i < n_; ++i) {
            const double y = t.p_bar[i];
            const double requirement = beta_ * (L_[i] - y);
            t.c_buf[i] = c_[i] - requirement;
            if (!active_[i]) {
                t.phi[i] = t.r_liq[i] = t.r_cap[i] = 0.0;
                continue;
            }
            const double rl = std::min(std::max(requirement - c_[i], 0.0), l_[i]);
            const double rc = cap_[i] ? std::min(std::max(x_[i] - rl, 0.0), l_[i] - rl) : 0.0;
            const double need = rl + rc + std::max(y - t.c_buf[i], 0.0);
            t.r_liq[i] = rl;
            t.r_cap[i] = rc;
            if (l_[i] > 0.0)
                t.phi[i] = std::min(need / l_[i], 1.0);
            else
                t.phi[i] = need > 0.0 ? 1.0 : 0.0;
        }
    }

    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    double beta_;
    Matrix owed_;
    std::vector<double> L_, l_, c_, x_;
    std::vector<std::uint8_t> cap_, active_;
};

}  // namespace

RolloverTerms rollover_map(const AbmState& state, const AbmParams& params, std::span<const double> f) {
    if (f.size() != state.size()) throw Error(ErrorCode::LengthMismatch, "f length differs from node count");
    RolloverSystem sys(state, params);
    RolloverTerms t;
    sys.eval(f, t);
    return t;
}

RolloverResult rollover_fixed_point(const AbmState& state, const AbmParams& params,
                                    bool record_history) {
    const std::size_t n = state.size();
    RolloverSystem sys(state, params);
    RolloverResult res;
    res.f.assign(n, 0.0);
    if (record_history) res.history.push_back(res.f);

    RolloverTerms t;
    double change = kInf;
    std::size_t it = 0;
    while (it < params.fp_max_iter) {
        sys.eval(res.f, t);
        ++it;
        change = 0.0;
        for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(t.phi[i] - res.f[i]));
        res.f = t.phi;
        if (record_history) res.history.push_back(res.f);
        if (change < params.fp_tol) break;
    }
    if (!(change < params.fp_tol))
        throw Error(ErrorCode::NoConvergence,
                    "roll-over fixed point: no convergence after " + std::to_string(it) +
                        " iterations (residual " + std::to_string(change) + ")");
    // Terms consistent with the returned f.
    sys.eval(res.f, t);
    res.p_bar = std::move(t.p_bar);
    res.r_liq = std::move(t.r_liq);
    res.r_cap = std::move(t.r_cap);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(t.phi[i] - res.f[i]));
    res.residual = residual;
    res.iterations = it;
    return res;
}

void price_update(HoldingsTable& h, const Matrix& Z, PriceMode mode) {
    const std::size_t n = h.banks(), m = h.securities();
    if (Z.rows() != n || Z.cols() != m) throw Error(ErrorCode::LengthMismatch, "sale matrix shape differs from holdings");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t mu = 0; mu < m; ++mu) {
            const double z = Z(i, mu), s = h.quantities(i, mu);
            if (!(z >= 0.0) || z > s + 1e-9 * (1.0 + s))
                throw Error(ErrorCode::InvalidArgument, "sales must lie between zero and the holdings");
        }
    for (std::size_t mu = 0; mu < m; ++mu) {
        double sold = 0.0, denom = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sold += Z(i, mu);
            denom += mode == PriceMode::Static ? h.initial_quantities(i, mu) : h.quantities(i, mu);
        }
        const double delta = denom > 0.0 ? sold / denom : 0.0;
        h.prices[mu] *= std::exp(-h.alpha[mu] * delta);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t mu = 0; mu < m; ++mu)
            h.quantities(i, mu) = std::max(h.quantities(i, mu) - Z(i, mu), 0.0);
}

namespace {

// Securities market for one cycle: holdings and prices at the start of the
// cycle, cumulative sales Z and the prices they imply.
class FireSaleMarket {
public:
    FireSaleMarket(const AbmState& state, const AbmParams& params, const RolloverResult& roll)
        : n_(state.size()),
          m_(state.holdings.securities()),
          params_(params),
          owed_(short_term_owed(state)),
          f_(roll.f),
          p_bar_(roll.p_bar),
          Z_(n_, m_),
          rows_(n_),
          cols_(m_) {
        if (f_.size() != n_ || p_bar_.size() != n_ || roll.r_liq.size() != n_ || roll.r_cap.size() != n_)
            throw Error(ErrorCode::LengthMismatch, "roll-over result differs from node count");
        const auto& h = state.holdings;
        const bool strict = params.strict_paper_formulas;
        c_.resize(n_);
        requirement_.resize(n_);
        eq_.resize(n_);
        A_.resize(n_);
        network_.resize(n_);
        seller_.resize(n_);
        for (std::size_t i = 0; i < n_; ++i) {
            const auto& b = state.sheets[i];
            c_[i] = b.c;
            requirement_[i] = params.beta * (short_liabilities(b) - p_bar_[i]);
            eq_[i] = b.eq;
            A_[i] = capital_sale_base(b, strict) - (roll.r_liq[i] + roll.r_cap[i]);
            double net = 0.0;
            for (std::size_t j = 0; j < n_; ++j) net += owed_(j, i);
            network_[i] = net;
            seller_[i] = !state.frozen[i];
        }
        P_start_ = h.prices;
        P_ = h.prices;
        alpha_ = h.alpha;
        w_ = h.risk_weights;
        denom_.assign(m_, 0.0);
        colZ_.assign(m_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t mu = 0; mu < m_; ++mu) {
                const double s = h.quantities(i, mu);
                denom_[mu] += params.price_mode == PriceMode::Static ? h.initial_quantities(i, mu) : s;
                if (s > 0.0) {
                    rows_[i].push_back({mu, s});
                    cols_[mu].push_back({i, s});
                }
            }
        mtm_.assign(n_, 0.0);
        rwv_.assign(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (auto [mu, s] : rows_[i]) rwv_[i] += s * w_[mu] * P_[mu];
        inflow_.assign(n_, 0.0);
        loss_.assign(n_, 0.0);
    }

    std::size_t size() const { return n_; }
    const Matrix& Z() const { return Z_; }
    const std::vector<double>& prices() const { return P_; }
    const std::vector<double>& inflow() const { return inflow_; }
    const std::vector<double>& p_bar() const { return p_bar_; }

    // Pi^T p and the creditor losses it implies.
    void set_payments(std::span<const double> p) {
        std::vector<double> ratio(n_, 0.0);
        for (std::size_t j = 0; j < n_; ++j)
            if (p_bar_[j] > 0.0) ratio[j] = p[j] / p_bar_[j];
        for (std::size_t i = 0; i < n_; ++i) {
            double acc = 0.0;
            if (f_[i] > 0.0)
                for (std::size_t j = 0; j < n_; ++j) acc += owed_(j, i) * ratio[j];
            inflow_[i] = f_[i] * acc;
            loss_[i] = std::max(f_[i] * network_[i] - inflow_[i], 0.0);
        }
    }

    struct Needs {
        double interbank = 0.0;
        double liquidity = 0.0;
    };

    Needs cash_needs(std::size_t i) const {
        // Repayment against raw cash first, then restoring the buffer; together
        // they equal max(p_bar - (c_buf + Pi^T p), 0).
        const double available = c_[i] + inflow_[i] - p_bar_[i];
        Needs nd;
        nd.interbank = std::max(-available, 0.0);
        nd.liquidity = std::max(requirement_[i] - std::max(available, 0.0), 0.0);
        return nd;
    }

    // Target cumulative sales of bank i at the current prices, split by motive.
    // Calls emit(mu, s, z_interbank, z_liquidity, z_capital) for each held
    // security.
    template <class Emit>
    bool targets(std::size_t i, Emit&& emit) const {
        if (!seller_[i] || rows_[i].empty() || !(rwv_[i] > 0.0)) return false;
        const Needs nd = cash_needs(i);
        const double den = rwv_[i];
        double remaining_rw = rwv_[i];
        if (nd.interbank > 0.0 || nd.liquidity > 0.0) {
            remaining_rw = 0.0;
            for (auto [mu, s] : rows_[i]) {
                const double unit = s * w_[mu] / den;
                const double zi = std::min(nd.interbank * unit, s);
                const double zl = std::min(nd.liquidity * unit, s - zi);
                remaining_rw += (s - zi - zl) * w_[mu] * P_[mu];
            }
        }
        double cap_need = 0.0;
        if (params_.gamma_bar > 0.0) {
            const double eq = eq_[i] + mtm_[i] - loss_[i];
            const double other = params_.strict_paper_formulas ? 0.0 : params_.other_rwa(i);
            cap_need = std::max(params_.interbank_weight(i) * A_[i] + remaining_rw + other -
                                    eq / params_.gamma_bar,
                                0.0);
        }
        if (nd.interbank <= 0.0 && nd.liquidity <= 0.0 && cap_need <= 0.0) return false;
        for (auto [mu, s] : rows_[i]) {
            const double unit = s * w_[mu] / den;
            const double zi = std::min(nd.interbank * unit, s);
            const double zl = std::min(nd.liquidity * unit, s - zi);
            const double zc = w_[mu] > 0.0 ? std::min(cap_need * s / den, s - zi - zl) : 0.0;
            emit(mu, s, zi, zl, zc);
        }
        return true;
    }

    // Brings sales and prices to their joint equilibrium for the current
    // payments. Sales only grow within a cycle.
    void equilibrate() {
        std::vector<std::uint8_t> touched(m_, 0);
        for (std::size_t round = 0;; ++round) {
            if (round >= params_.fp_max_iter)
                throw Error(ErrorCode::NoConvergence,
                            "fire-sale price equilibrium: no convergence after " +
                                std::to_string(round) + " rounds");
            double change = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                targets(i, [&](std::size_t mu, double s, double zi, double zl, double zc) {
                    const double target = zi + zl + zc;
                    double& z = Z_(i, mu);
                    if (target > z) {
                        change = std::max(change, (target - z) / (1.0 + s));
                        z = target;
                        touched[mu] = 1;
                    }
                });
            }
            for (std::size_t mu = 0; mu < m_; ++mu) {
                if (!touched[mu]) continue;
                touched[mu] = 0;
                reprice(mu);
            }
            if (change <= params_.fp_tol) return;
        }
    }

    std::vector<double> proceeds() const {
        std::vector<double> out(n_, 0.0);
        for (std::size_t i = 0; i < n_; ++i)
            for (auto [mu, s] : rows_[i]) out[i] += Z_(i, mu) * P_[mu];
        return out;
    }

    double cash(std::size_t i) const { return c_[i]; }

private:
    void reprice(std::size_t mu) {
        double sold = 0.0;
        for (auto [i, s] : cols_[mu]) sold += Z_(i, mu);
        colZ_[mu] = sold;
        const double delta = denom_[mu] > 0.0 ? sold / denom_[mu] : 0.0;
        const double next = P_start_[mu] * std::exp(-alpha_[mu] * delta);
        const double dp = next - P_[mu];
        if (dp == 0.0) return;
        for (auto [i, s] : cols_[mu]) {
            mtm_[i] += s * dp;
            rwv_[i] += s * w_[mu] * dp;
        }
        P_[mu] = next;
    }

    std::size_t n_, m_;
    const AbmParams& params_;
    Matrix owed_;
    std::vector<double> f_, p_bar_;
    Matrix Z_;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows_, cols_;
    std::vector<double> c_, requirement_, eq_, A_, network_;
    std::vector<std::uint8_t> seller_;
    std::vector<double> P_start_, P_, alpha_, w_, denom_, colZ_;
    std::vector<double> mtm_, rwv_;
    std::vector<double> inflow_, loss_;
};

}  // namespace

SellOff sell_off(const AbmState& state, const AbmParams& params, const RolloverResult& rollover,
                 std::span<const double> p) {
    FireSaleMarket market(state, params, rollover);
    const std::size_t n = state.size(), m = state.holdings.securities();
    if (p.size() != n) throw Error(ErrorCode::LengthMismatch, "p length differs from node count");
    market.set_payments(p);
    SellOff out;
    out.Z = Matrix(n, m);
    out.Z_interbank = Matrix(n, m);
    out.Z_liquidity = Matrix(n, m);
    out.Z_capital = Matrix(n, m);
    out.liquidity_raised.assign(n, 0.0);
    const auto& P = state.holdings.prices;
    for (std::size_t i = 0; i < n; ++i) {
        market.targets(i, [&](std::size_t mu, double, double zi, double zl, double zc) {
            out.Z_interbank(i, mu) = zi;
            out.Z_liquidity(i, mu) = zl;
            out.Z_capital(i, mu) = zc;
            out.Z(i, mu) = zi + zl + zc;
            out.liquidity_raised[i] += (zi + zl + zc) * P[mu];
        });
    }
    return out;
}

ClearingResult fire_sale_clearing(const AbmState& state, const AbmParams& params,
                                  const RolloverResult& rollover, bool record_history) {
    FireSaleMarket market(state, params, rollover);
    const std::size_t n = state.size();
    ClearingResult res;
    res.p_bar = market.p_bar();
    res.p = res.p_bar;
    if (record_history) res.p_history.push_back(res.p);

    std::vector<double> next(n);
    std::size_t it = 0;
    for (;;) {
        if (it >= params.fp_max_iter)
            throw Error(ErrorCode::NoConvergence, "clearing vector: no convergence after " +
                                                      std::to_string(it) + " iterations");
        market.set_payments(res.p);
        market.equilibrate();
        const auto raised = market.proceeds();
        const auto& inflow = market.inflow();
        bool settled = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = std::min(market.cash(i) + inflow[i] + raised[i], res.p_bar[i]);
            next[i] = std::max(std::min(xi, res.p[i]), 0.0);
            if (std::abs(next[i] - res.p[i]) > params.fp_tol * (1.0 + res.p_bar[i])) settled = false;
        }
        ++it;
        res.p.swap(next);
        if (record_history) {
            res.p_history.push_back(res.p);
            res.price_history.push_back(market.prices());
        }
        if (settled) break;
    }
    // Sales consistent with the final payments.
    market.set_payments(res.p);
    market.equilibrate();
    res.Z = market.Z();
    res.prices = market.prices();
    res.liquidity_raised = market.proceeds();
    res.inflow = market.inflow();
    res.iterations = it;
    return res;
}

void book_defaults(AbmState& state, std::span<const std::size_t> defaulted) {
    const std::size_t n = state.size();
    for (std::size_t j : defaulted) {
        if (j >= n) throw Error(ErrorCode::UnknownNode, "defaulted node index out of range");
        state.set_default(j);
    }
    for (std::size_t j : defaulted) {
        for (std::size_t i = 0; i < n; ++i) {
            if (state.phi[i] == Default) continue;
            BankBalanceSheet& b = state.sheets[i];
            const double lt = state.W_ltc(i, j), cs = state.W_cs(i, j);
            const double st = state.W_stc(i, j), sf = state.W_stf(i, j);
            b.eq -= lt + cs + st + sf;
            b.l_l = std::max(b.l_l - lt, 0.0);
            b.u_a = std::max(b.u_a - cs, 0.0);
            b.l_s = std::max(b.l_s - st, 0.0);
            b.h_a = std::max(b.h_a - sf, 0.0);
        }
        for (Matrix* w : {&state.W_ltc, &state.W_cs, &state.W_stc, &state.W_stf})
            for (std::size_t k = 0; k < n; ++k) {
                (*w)(j, k) = 0.0;
                (*w)(k, j) = 0.0;
            }
    }
}

namespace {

// Constraint check with a small relative slack so that actions that exactly
// restore a constraint are not undone by rounding.
bool still_violating(const AbmState& s, const AbmParams& params, std::size_t i, double sv) {
    const auto& b = s.sheets[i];
    if (b.eq < 0.0) return true;
    const double den = params.interbank_weight(i) * interbank_risk_base(b, params.strict_paper_formulas) +
                       sv + params.other_rwa(i);
    const double need_eq = params.gamma_bar * den;
    if (den > 0.0 && b.eq < need_eq - kConstraintSlack * (1.0 + need_eq)) return true;
    const double need_c = params.beta * short_liabilities(b);
    return b.c < need_c - kConstraintSlack * (1.0 + need_c);
}

// Cash and claim updates once payments and sales are fixed.
void settle(AbmState& s, const AbmParams& params, const RolloverResult& roll, const ClearingResult& clr) {
    const std::size_t n = s.size(), m = s.holdings.securities();
    const bool strict = params.strict_paper_formulas;

    std::vector<double> owed_stc(n, 0.0), owed_stf(n, 0.0), network(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            owed_stc[i] += s.W_stc(j, i) * roll.f[j];
            owed_stf[i] += s.W_stf(j, i) * roll.f[j];
            network[i] += s.W_stc(i, j) + s.W_stf(i, j);
        }

    const std::vector<double> P_start = s.holdings.prices;
    const Matrix S_start = s.holdings.quantities;
    price_update(s.holdings, clr.Z, params.price_mode);
    const auto& P = s.holdings.prices;

    for (std::size_t i = 0; i < n; ++i) {
        BankBalanceSheet& b = s.sheets[i];
        const double f = roll.f[i];

        // Debtor side: pays p, liabilities fall by what was paid.
        const double paid = clr.p[i];
        const double paid_share = clr.p_bar[i] > 0.0 ? paid / clr.p_bar[i] : 0.0;
        b.c -= paid;
        b.b_s = std::max(b.b_s - paid_share * owed_stc[i], 0.0);
        b.h_l = std::max(b.h_l - paid_share * owed_stf[i], 0.0);

        // Creditor side: the rolled-off short-term book turns into cash;
        // claims outside the modelled network are repaid in full.
        const double l = rollable_assets(b, strict);
        const double external = f * std::max(l - network[i], 0.0);
        b.c += clr.inflow[i] + external;
        b.eq -= std::max(f * network[i] - clr.inflow[i], 0.0);
        b.l_s -= f * b.l_s;
        if (strict)
            b.u_a -= f * b.u_a;
        else
            b.h_a -= f * b.h_a;

        // Sales at the cycle's closing prices; every holder marked to market.
        double proceeds = 0.0, revaluation = 0.0, value = 0.0;
        for (std::size_t mu = 0; mu < m; ++mu) {
            proceeds += clr.Z(i, mu) * P[mu];
            revaluation += S_start(i, mu) * (P[mu] - P_start[mu]);
            value += s.holdings.quantities(i, mu) * P[mu];
        }
        b.c += proceeds;
        b.eq += revaluation;
        b.e = value;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double keep = 1.0 - roll.f[i];
        if (keep == 1.0) continue;
        for (std::size_t j = 0; j < n; ++j) {
            s.W_stc(i, j) *= keep;
            s.W_stf(i, j) *= keep;
        }
    }
}

double price_index(const HoldingsTable& h, const std::vector<double>& P0) {
    if (P0.empty()) return 1.0;
    double acc = 0.0;
    for (std::size_t mu = 0; mu < P0.size(); ++mu) acc += h.prices[mu] / P0[mu];
    return acc / static_cast<double>(P0.size());
}

}  // namespace

CascadeResult run_cascade(const MultiLayerNetwork& net, std::size_t seed_node, const AbmParams& params) {
    const std::size_t n = net.size();
    if (seed_node >= n) throw Error(ErrorCode::UnknownSeed, "seed index out of range");
    AbmState state = make_state(net, params);

    const std::vector<double> eq0 = net.balance_sheets().eq;
    double eq_total = 0.0;
    for (double x : eq0) eq_total += x;
    const std::vector<double> P0 = state.holdings.prices;

    CascadeResult res;
    res.seed_node = seed_node;
    res.beta = params.beta;

    auto capital_fraction = [&] {
        if (!(eq_total > 0.0)) return 0.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (state.phi[i] == Default) acc += eq0[i];
        return std::clamp(acc / eq_total, 0.0, 1.0);
    };

    // Cycle 1 is the exogenous shock; its losses are booked in cycle 2.
    std::vector<std::size_t> pending{seed_node};
    state.sheets[seed_node].c = 0.0;
    state.sheets[seed_node].eq = 0.0;
    state.set_default(seed_node);
    std::size_t total_defaults = 0;

    for (;;) {
        ++state.cycle;
        CycleLog log;
        log.cycle = state.cycle;
        std::vector<std::size_t> fresh;
        if (state.cycle == 1) {
            fresh = pending;
        } else {
            book_defaults(state, pending);
        }

        try {
            const auto gamma = capital_ratio(state, params);
            const auto illiquid = liquidity_violation(state, params);
            std::vector<std::uint8_t> distressed(n, 0);
            for (std::size_t i = 0; i < n; ++i) {
                if (state.phi[i] == Default) continue;
                if (gamma[i] < params.gamma_bar || illiquid[i] || state.sheets[i].eq < 0.0) {
                    distressed[i] = 1;
                    state.phi[i] = std::max<std::uint8_t>(state.phi[i], Distress);
                }
            }

            const RolloverResult roll = rollover_fixed_point(state, params);
            const ClearingResult clr = fire_sale_clearing(state, params, roll);
            settle(state, params, roll, clr);
            for (std::size_t i = 0; i < n; ++i) log.sold_eur += clr.liquidity_raised[i];

            const auto sv = risk_weighted_securities(state);
            for (std::size_t i = 0; i < n; ++i) {
                if (state.phi[i] == Default) continue;
                const bool underpaid = clr.p[i] < clr.p_bar[i] - params.fp_tol * (1.0 + clr.p_bar[i]);
                const bool violating = still_violating(state, params, i, sv[i]);
                if (underpaid || state.sheets[i].eq < 0.0 || (distressed[i] && violating)) {
                    fresh.push_back(i);
                } else if (violating) {
                    state.phi[i] = std::max<std::uint8_t>(state.phi[i], Distress);
                }
            }
        } catch (const Error& e) {
            throw Error(e.code(), error_context(e, "seed " + net.nodes()->id(seed_node) + ", cycle " +
                                                      std::to_string(state.cycle)));
        }

        for (std::size_t i : fresh) state.set_default(i);
        total_defaults += fresh.size();
        std::size_t distress_count = 0;
        for (auto phi : state.phi) distress_count += phi == Distress;

        log.new_defaults = fresh.size();
        log.total_defaults = total_defaults;
        log.distressed = distress_count;
        log.price_index = price_index(state.holdings, P0);
        log.defaulted_capital_fraction = capital_fraction();
        res.per_cycle_log.push_back(log);

        pending = std::move(fresh);
        if (pending.empty() || total_defaults == n) break;
    }

    res.cycles = state.cycle;
    res.additional_defaults = total_defaults - 1;
    res.defaulted_capital_fraction = capital_fraction();
    res.final_phi = state.phi;
    return res;
}

std::vector<CascadeResult> systemic_sweep(const MultiLayerNetwork& net, const AbmParams& params,
                                          std::span<const double> beta_grid, unsigned threads) {
    if (beta_grid.empty()) throw Error(ErrorCode::InvalidArgument, "beta grid is empty");
    const std::size_t n = net.size();
    std::vector<AbmParams> per_beta;
    for (double beta : beta_grid) {
        AbmParams p = params;
        p.beta = beta;
        p.validate(n);
        per_beta.push_back(std::move(p));
    }
    make_state(net, params);  // MissingLayer before any work

    std::vector<CascadeResult> out(beta_grid.size() * n);
    parallel_for(out.size(), threads, [&](std::size_t k) {
        out[k] = run_cascade(net, k % n, per_beta[k / n]);
    });
    return out;
}

}  // namespace mlnet
