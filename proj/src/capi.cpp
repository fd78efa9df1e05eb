#include "mlnet/mlnet.h"

#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "mlnet/abm.hpp"
#include "mlnet/debtrank.hpp"
#include "mlnet/ingest.hpp"
#include "mlnet/settings.hpp"
#include "mlnet/topology.hpp"
#include "textio.hpp"

struct mlnet_network {
    mlnet::MultiLayerNetwork net;
    std::vector<std::string> layer_names;
    mutable std::unique_ptr<mlnet::ExposureMatrix> flat;

    const mlnet::ExposureMatrix& layer(std::string_view name) const {
        if (name == "flat" && !net.has_layer("flat")) {
            if (!flat) flat = std::make_unique<mlnet::ExposureMatrix>(net.flattened().layer);
            return *flat;
        }
        return net.layer(name);
    }
};

struct mlnet_table {
    struct Cell {
        std::string text;
        double number = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::vector<Cell>& add_row() { return rows.emplace_back(); }
    static Cell text(std::string s) { return {std::move(s)}; }
    static Cell number(double x) { return {mlnet::textio::format_double(x), x}; }
    static Cell count(std::size_t k) { return {std::to_string(k), static_cast<double>(k)}; }
};

struct mlnet_abm_params {
    mlnet::AbmParams params;
};

namespace {

thread_local std::string g_last_error;

mlnet_status fail(mlnet_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

template <class F>
mlnet_status guarded(F&& body) {
    try {
        body();
        g_last_error.clear();
        return MLNET_OK;
    } catch (const mlnet::Error& e) {
        return fail(static_cast<mlnet_status>(static_cast<int>(e.code())), e.what());
    } catch (const std::bad_alloc&) {
        return fail(MLNET_INTERNAL_ERROR, "out of memory");
    } catch (const std::exception& e) {
        return fail(MLNET_INTERNAL_ERROR, e.what());
    }
}

void require(const void* p, const char* what) {
    if (!p) throw mlnet::Error(mlnet::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

mlnet_network* wrap(mlnet::MultiLayerNetwork net) {
    auto* h = new mlnet_network{std::move(net), {}, nullptr};
    h->layer_names = h->net.layer_names();
    return h;
}

mlnet::DistressThreshold parse_mode(const char* mode) {
    const std::string_view m = mode ? mode : "any-distress";
    if (m == "any-distress") return mlnet::DistressThreshold::AnyDistress;
    if (m == "full-default") return mlnet::DistressThreshold::FullDefault;
    throw mlnet::Error(mlnet::ErrorCode::InvalidArgument, "unknown DebtRank mode '" + std::string(m) + "'");
}

mlnet::Calibration parse_calibration(const char* c) {
    require(c, "calibration");
    const std::string_view s = c;
    if (s == "credit") return mlnet::Calibration::Credit;
    if (s == "liquidity") return mlnet::Calibration::Liquidity;
    throw mlnet::Error(mlnet::ErrorCode::InvalidArgument, "unknown calibration '" + std::string(s) + "'");
}

}  // namespace

extern "C" {

const char* mlnet_last_error(void) { return g_last_error.c_str(); }

const char* mlnet_status_name(mlnet_status status) {
    if (status == MLNET_OK) return "Ok";
    if (status == MLNET_INTERNAL_ERROR) return "InternalError";
    if (status >= MLNET_INVALID_ARGUMENT && status <= MLNET_CONFIG_ERROR)
        return mlnet::to_string(static_cast<mlnet::ErrorCode>(static_cast<int>(status)));
    return "Unknown";
}

mlnet_status mlnet_network_load(const char* manifest_path, mlnet_network** out) {
    return guarded([&] {
        require(manifest_path, "manifest path");
        require(out, "output handle");
        *out = wrap(mlnet::load_network(std::filesystem::path(manifest_path)));
    });
}

mlnet_status mlnet_network_generate(const char* settings, mlnet_network** out) {
    return guarded([&] {
        require(out, "output handle");
        mlnet::SyntheticConfig cfg;
        if (settings)
            for (const auto& [k, v] : mlnet::parse_settings(settings)) mlnet::apply_setting(cfg, k, v);
        *out = wrap(mlnet::generate_synthetic(cfg));
    });
}

mlnet_status mlnet_network_write(const mlnet_network* net, const char* dir) {
    return guarded([&] {
        require(net, "network");
        require(dir, "directory");
        mlnet::write_network(net->net, dir);
    });
}

void mlnet_network_free(mlnet_network* net) { delete net; }

size_t mlnet_network_size(const mlnet_network* net) { return net ? net->net.size() : 0; }

mlnet_status mlnet_network_node_id(const mlnet_network* net, size_t i, const char** out) {
    return guarded([&] {
        require(net, "network");
        require(out, "output");
        if (i >= net->net.size()) throw mlnet::Error(mlnet::ErrorCode::UnknownNode, "node index out of range");
        *out = net->net.nodes()->id(i).c_str();
    });
}

size_t mlnet_network_layer_count(const mlnet_network* net) { return net ? net->layer_names.size() : 0; }

mlnet_status mlnet_network_layer_name(const mlnet_network* net, size_t k, const char** out) {
    return guarded([&] {
        require(net, "network");
        require(out, "output");
        if (k >= net->layer_names.size())
            throw mlnet::Error(mlnet::ErrorCode::MissingLayer, "layer index out of range");
        *out = net->layer_names[k].c_str();
    });
}

mlnet_status mlnet_network_layer_info(const mlnet_network* net, const char* layer, int* directed,
                                      size_t* edges, double* total_weight) {
    return guarded([&] {
        require(net, "network");
        require(layer, "layer");
        const auto& l = net->layer(layer);
        if (directed) *directed = l.directed() ? 1 : 0;
        if (edges) *edges = l.edge_count();
        if (total_weight) *total_weight = l.total_weight();
    });
}

int mlnet_network_has_holdings(const mlnet_network* net) {
    return net && net->net.holdings() ? 1 : 0;
}

size_t mlnet_table_rows(const mlnet_table* t) { return t ? t->rows.size() : 0; }
size_t mlnet_table_cols(const mlnet_table* t) { return t ? t->columns.size() : 0; }

mlnet_status mlnet_table_column(const mlnet_table* t, size_t c, const char** out) {
    return guarded([&] {
        require(t, "table");
        require(out, "output");
        if (c >= t->columns.size()) throw mlnet::Error(mlnet::ErrorCode::InvalidArgument, "column out of range");
        *out = t->columns[c].c_str();
    });
}

mlnet_status mlnet_table_text(const mlnet_table* t, size_t r, size_t c, const char** out) {
    return guarded([&] {
        require(t, "table");
        require(out, "output");
        if (r >= t->rows.size() || c >= t->columns.size())
            throw mlnet::Error(mlnet::ErrorCode::InvalidArgument, "cell out of range");
        *out = t->rows[r][c].text.c_str();
    });
}

mlnet_status mlnet_table_number(const mlnet_table* t, size_t r, size_t c, double* out) {
    return guarded([&] {
        require(t, "table");
        require(out, "output");
        if (r >= t->rows.size() || c >= t->columns.size())
            throw mlnet::Error(mlnet::ErrorCode::InvalidArgument, "cell out of range");
        *out = t->rows[r][c].number;
    });
}

mlnet_status mlnet_table_write_csv(const mlnet_table* t, const char* path) {
    return guarded([&] {
        require(t, "table");
        require(path, "path");
        std::ofstream os(path, std::ios::binary);
        if (!os) throw mlnet::Error(mlnet::ErrorCode::IoError, std::string("cannot write ") + path);
        for (std::size_t c = 0; c < t->columns.size(); ++c) os << (c ? "," : "") << t->columns[c];
        os << '\n';
        for (const auto& row : t->rows) {
            for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c].text;
            os << '\n';
        }
        if (!os) throw mlnet::Error(mlnet::ErrorCode::IoError, std::string("write failed for ") + path);
    });
}

void mlnet_table_free(mlnet_table* t) { delete t; }

mlnet_status mlnet_node_table(const mlnet_network* net, mlnet_table** out) {
    return guarded([&] {
        require(net, "network");
        require(out, "output handle");
        auto t = std::make_unique<mlnet_table>();
        t->columns = {"node_id", "label", "country", "total_assets", "equity"};
        const auto& nodes = *net->net.nodes();
        const auto& bs = net->net.balance_sheets();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            auto& row = t->add_row();
            row.push_back(mlnet_table::text(nodes.id(i)));
            row.push_back(mlnet_table::text(nodes.label(i)));
            row.push_back(mlnet_table::text(nodes.has_countries() ? nodes.country(i) : ""));
            row.push_back(mlnet_table::number(bs.total_assets[i]));
            row.push_back(mlnet_table::number(bs.eq[i]));
        }
        *out = t.release();
    });
}

mlnet_status mlnet_degree_table(const mlnet_network* net, const char* layer, mlnet_table** out) {
    return guarded([&] {
        require(net, "network");
        require(layer, "layer");
        require(out, "output handle");
        const auto p = mlnet::degree_profile(net->layer(layer));
        auto t = std::make_unique<mlnet_table>();
        t->columns = {"node_id", "layer", "in_degree", "out_degree"};
        for (std::size_t i = 0; i < p.in_degree.size(); ++i) {
            auto& row = t->add_row();
            row.push_back(mlnet_table::text(net->net.nodes()->id(i)));
            row.push_back(mlnet_table::text(layer));
            row.push_back(mlnet_table::count(p.in_degree[i]));
            row.push_back(mlnet_table::count(p.out_degree[i]));
        }
        *out = t.release();
    });
}

mlnet_status mlnet_centrality_table(const mlnet_network* net, const char* layer, double damping,
                                    const char* distance, mlnet_table** out) {
    return guarded([&] {
        require(net, "network");
        require(layer, "layer");
        require(out, "output handle");
        const std::string_view d = distance ? distance : "inverse-weight";
        mlnet::DistanceMode mode;
        if (d == "inverse-weight") mode = mlnet::DistanceMode::InverseWeight;
        else if (d == "unweighted") mode = mlnet::DistanceMode::Unweighted;
        else throw mlnet::Error(mlnet::ErrorCode::InvalidArgument, "unknown distance mode '" + std::string(d) + "'");
        const auto c = mlnet::centralities(net->layer(layer), damping, mode);
        auto t = std::make_unique<mlnet_table>();
        t->columns = {"node_id", "layer", "pagerank", "betweenness", "closeness"};
        for (std::size_t i = 0; i < c.pagerank.size(); ++i) {
            auto& row = t->add_row();
            row.push_back(mlnet_table::text(net->net.nodes()->id(i)));
            row.push_back(mlnet_table::text(layer));
            row.push_back(mlnet_table::number(c.pagerank[i]));
            row.push_back(mlnet_table::number(c.betweenness[i]));
            row.push_back(mlnet_table::number(c.closeness[i]));
        }
        *out = t.release();
    });
}

mlnet_status mlnet_kde_table(const double* samples, size_t count, size_t grid_points, double* bandwidth,
                             mlnet_table** out) {
    return guarded([&] {
        if (count) require(samples, "samples");
        require(out, "output handle");
        const auto curve = mlnet::kde_density(std::span<const double>(samples, count), grid_points);
        auto t = std::make_unique<mlnet_table>();
        t->columns = {"x", "density"};
        for (std::size_t g = 0; g < curve.xs.size(); ++g) {
            auto& row = t->add_row();
            row.push_back(mlnet_table::number(curve.xs[g]));
            row.push_back(mlnet_table::number(curve.ys[g]));
        }
        if (bandwidth) *bandwidth = curve.bandwidth;
        *out = t.release();
    });
}

mlnet_status mlnet_debtrank_table(const mlnet_network* net, const char* calibration, const double* betas,
                                  size_t beta_count, const char* mode, unsigned threads,
                                  mlnet_table** out) {
    return guarded([&] {
        require(net, "network");
        require(out, "output handle");
        if (beta_count) require(betas, "betas");
        const auto calib = parse_calibration(calibration);
        const auto rows = mlnet::debtrank_sweep(net->net, calib,
                                                std::span<const double>(betas, beta_count),
                                                parse_mode(mode), threads);
        auto t = std::make_unique<mlnet_table>();
        t->columns = {"node_id", "layer", "beta", "mode", "dr"};
        for (const auto& r : rows) {
            auto& row = t->add_row();
            row.push_back(mlnet_table::text(net->net.nodes()->id(r.node)));
            row.push_back(mlnet_table::text(r.layer));
            row.push_back(r.beta ? mlnet_table::number(*r.beta) : mlnet_table::text(""));
            row.push_back(mlnet_table::text(mlnet::to_string(r.mode)));
            row.push_back(mlnet_table::number(r.dr));
        }
        *out = t.release();
    });
}

mlnet_status mlnet_superposition_table(const mlnet_network* net, const char* layer_a, const char* layer_b,
                                       const char* calibration, double beta, const char* mode,
                                       unsigned threads, mlnet_table** out) {
    return guarded([&] {
        require(net, "network");
        require(layer_a, "first layer");
        require(layer_b, "second layer");
        require(out, "output handle");
        const auto calib = parse_calibration(calibration);
        std::optional<double> b;
        if (calib == mlnet::Calibration::Liquidity) b = beta;
        const auto rows = mlnet::superposition_experiment(net->net, {layer_a, layer_b}, calib, b,
                                                          parse_mode(mode), threads);
        auto t = std::make_unique<mlnet_table>();
        t->columns = {"node_id", "dr_aggregated", "dr_linear_sum", "avg_rank"};
        for (const auto& r : rows) {
            auto& row = t->add_row();
            row.push_back(mlnet_table::text(net->net.nodes()->id(r.node)));
            row.push_back(mlnet_table::number(r.dr_aggregated));
            row.push_back(mlnet_table::number(r.dr_linear_sum));
            row.push_back(mlnet_table::count(r.avg_rank));
        }
        *out = t.release();
    });
}

mlnet_status mlnet_abm_params_new(mlnet_abm_params** out) {
    return guarded([&] {
        require(out, "output handle");
        *out = new mlnet_abm_params{};
    });
}

mlnet_status mlnet_abm_params_set(mlnet_abm_params* p, const char* key, const char* value) {
    return guarded([&] {
        require(p, "parameters");
        require(key, "key");
        require(value, "value");
        mlnet::apply_setting(p->params, key, value);
    });
}

void mlnet_abm_params_free(mlnet_abm_params* p) { delete p; }

mlnet_status mlnet_abm_sweep(const mlnet_network* net, const mlnet_abm_params* params, const double* betas,
                             size_t beta_count, unsigned threads, mlnet_table** results,
                             mlnet_table** cycles) {
    return guarded([&] {
        require(net, "network");
        require(params, "parameters");
        if (beta_count) require(betas, "betas");
        const auto runs = mlnet::systemic_sweep(net->net, params->params,
                                                std::span<const double>(betas, beta_count), threads);
        const auto& nodes = *net->net.nodes();
        auto res = std::make_unique<mlnet_table>();
        res->columns = {"seed_node", "beta", "additional_defaults", "defaulted_capital_fraction", "cycles"};
        auto log = std::make_unique<mlnet_table>();
        log->columns = {"seed_node", "beta", "cycle", "new_defaults", "total_defaults", "distressed",
                        "price_index", "sold_eur", "defaulted_capital_fraction"};
        for (const auto& r : runs) {
            auto& row = res->add_row();
            row.push_back(mlnet_table::text(nodes.id(r.seed_node)));
            row.push_back(mlnet_table::number(r.beta));
            row.push_back(mlnet_table::count(r.additional_defaults));
            row.push_back(mlnet_table::number(r.defaulted_capital_fraction));
            row.push_back(mlnet_table::count(r.cycles));
            for (const auto& c : r.per_cycle_log) {
                auto& lr = log->add_row();
                lr.push_back(mlnet_table::text(nodes.id(r.seed_node)));
                lr.push_back(mlnet_table::number(r.beta));
                lr.push_back(mlnet_table::count(c.cycle));
                lr.push_back(mlnet_table::count(c.new_defaults));
                lr.push_back(mlnet_table::count(c.total_defaults));
                lr.push_back(mlnet_table::count(c.distressed));
                lr.push_back(mlnet_table::number(c.price_index));
                lr.push_back(mlnet_table::number(c.sold_eur));
                lr.push_back(mlnet_table::number(c.defaulted_capital_fraction));
            }
        }
        if (results) *results = res.release();
        if (cycles) *cycles = log.release();
    });
}

}  // extern "C"

static_assert(static_cast<int>(mlnet::ErrorCode::InvalidArgument) == MLNET_INVALID_ARGUMENT);
static_assert(static_cast<int>(mlnet::ErrorCode::MissingLayer) == MLNET_MISSING_LAYER);
static_assert(static_cast<int>(mlnet::ErrorCode::NoConvergence) == MLNET_NO_CONVERGENCE);
static_assert(static_cast<int>(mlnet::ErrorCode::ConfigError) == MLNET_CONFIG_ERROR);
