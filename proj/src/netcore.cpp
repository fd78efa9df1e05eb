#include "mlnet/netcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mlnet {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::UnknownNode: return "UnknownNode";
        case ErrorCode::DuplicateNode: return "DuplicateNode";
        case ErrorCode::NegativeWeight: return "NegativeWeight";
        case ErrorCode::NonFiniteWeight: return "NonFiniteWeight";
        case ErrorCode::NonPositivePrice: return "NonPositivePrice";
        case ErrorCode::AlreadyDirected: return "AlreadyDirected";
        case ErrorCode::NodeSetMismatch: return "NodeSetMismatch";
        case ErrorCode::MissingLayer: return "MissingLayer";
        case ErrorCode::DuplicateLayer: return "DuplicateLayer";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::BothExtSourcesProvided: return "BothExtSourcesProvided";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidDamping: return "InvalidDamping";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
        case ErrorCode::EmptyLayer: return "EmptyLayer";
        case ErrorCode::UnknownSeed: return "UnknownSeed";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

// ---------------------------------------------------------------------------
// NodeSet

NodeSet::NodeSet(std::vector<std::string> ids, std::vector<std::string> countries)
    : ids_(std::move(ids)), countries_(std::move(countries)) {
    if (ids_.empty()) throw Error(ErrorCode::InvalidArgument, "node set must not be empty");
    if (!countries_.empty() && countries_.size() != ids_.size())
        throw Error(ErrorCode::LengthMismatch, "country list length differs from node count");
    // A node set where no node has a country is stored without countries.
    if (std::all_of(countries_.begin(), countries_.end(), [](const auto& c) { return c.empty(); }))
        countries_.clear();

    index_.reserve(ids_.size());
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i].empty()) throw Error(ErrorCode::InvalidArgument, "empty node identifier");
        if (!index_.emplace(ids_[i], i).second)
            throw Error(ErrorCode::DuplicateNode, "duplicate node id '" + ids_[i] + "'");
    }
}

const std::string& NodeSet::country(std::size_t i) const {
    static const std::string none;
    return countries_.empty() ? none : countries_.at(i);
}

std::optional<std::size_t> NodeSet::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t NodeSet::index_of(std::string_view id) const {
    if (auto i = find(id)) return *i;
    throw Error(ErrorCode::UnknownNode, "unknown node '" + std::string(id) + "'");
}

std::string NodeSet::label(std::size_t i) const {
    const std::string& c = country(i);
    if (c.empty()) return ids_.at(i);
    std::size_t k = 0;
    for (std::size_t j = 0; j <= i; ++j)
        if (countries_[j] == c) ++k;
    return c + "-" + std::to_string(k);
}

// ---------------------------------------------------------------------------
// ExposureMatrix

ExposureMatrix::ExposureMatrix(std::string layer_id, NodeSetPtr nodes, Matrix weights,
                               bool directed)
    : layer_id_(std::move(layer_id)), nodes_(std::move(nodes)), w_(std::move(weights)),
      directed_(directed) {
    if (!nodes_) throw Error(ErrorCode::InvalidArgument, "layer without node set");
    const std::size_t n = nodes_->size();
    if (w_.rows() != n || w_.cols() != n)
        throw Error(ErrorCode::LengthMismatch, "layer '" + layer_id_ + "' is not n x n");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double x = w_(i, j);
            if (!std::isfinite(x))
                throw Error(ErrorCode::NonFiniteWeight, "non-finite weight in layer '" + layer_id_ +
                                                            "' at (" + nodes_->id(i) + ", " +
                                                            nodes_->id(j) + ")");
            if (x < 0.0)
                throw Error(ErrorCode::NegativeWeight, "negative weight in layer '" + layer_id_ +
                                                           "' at (" + nodes_->id(i) + ", " +
                                                           nodes_->id(j) + ")");
            if (i == j && x != 0.0)
                throw Error(ErrorCode::InvalidArgument,
                            "self-loop on node '" + nodes_->id(i) + "' in layer '" + layer_id_ + "'");
            if (!directed_ && x != w_(j, i))
                throw Error(ErrorCode::InvalidArgument,
                            "undirected layer '" + layer_id_ + "' is not symmetric");
        }
    }
}

ExposureMatrix ExposureMatrix::zeros(std::string layer_id, NodeSetPtr nodes, bool directed) {
    const std::size_t n = nodes->size();
    return ExposureMatrix(std::move(layer_id), std::move(nodes), Matrix(n, n), directed);
}

std::size_t ExposureMatrix::edge_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(w_.values().begin(), w_.values().end(), [](double x) { return x != 0.0; }));
}

LayerBuild build_layer(std::span<const Edge> edges, NodeSetPtr nodes, std::string layer_id,
                       bool directed) {
    if (!nodes) throw Error(ErrorCode::InvalidArgument, "layer without node set");
    const std::size_t n = nodes->size();
    Matrix w(n, n);
    std::size_t self_loops = 0;
    for (const Edge& e : edges) {
        const std::size_t i = nodes->index_of(e.src);
        const std::size_t j = nodes->index_of(e.dst);
        if (!std::isfinite(e.weight))
            throw Error(ErrorCode::NonFiniteWeight,
                        "non-finite weight on edge " + e.src + " -> " + e.dst);
        if (e.weight < 0.0) {
            std::ostringstream msg;
            msg << "negative weight " << e.weight << " on edge " << e.src << " -> " << e.dst;
            throw Error(ErrorCode::NegativeWeight, msg.str());
        }
        if (i == j) {
            ++self_loops;
            continue;
        }
        w(i, j) += e.weight;
        if (!directed) w(j, i) += e.weight;
    }
    return {ExposureMatrix(std::move(layer_id), std::move(nodes), std::move(w), directed),
            self_loops};
}

// ---------------------------------------------------------------------------
// Holdings and projections

HoldingsTable HoldingsTable::make(std::vector<std::string> issuer_ids, Matrix quantities,
                                  std::vector<double> prices) {
    HoldingsTable h;
    const std::size_t m = prices.size();
    h.issuer_ids = std::move(issuer_ids);
    h.initial_quantities = quantities;
    h.quantities = std::move(quantities);
    h.prices = std::move(prices);
    h.alpha.assign(m, default_alpha);
    h.risk_weights.assign(m, default_risk_weight);
    return h;
}

std::vector<double> HoldingsTable::market_values() const {
    std::vector<double> e(banks(), 0.0);
    for (std::size_t i = 0; i < banks(); ++i) {
        auto s = quantities.row(i);
        double v = 0.0;
        for (std::size_t mu = 0; mu < prices.size(); ++mu) v += s[mu] * prices[mu];
        e[i] = v;
    }
    return e;
}

void HoldingsTable::validate(std::size_t n) const {
    const std::size_t m = prices.size();
    if (issuer_ids.size() != m || quantities.rows() != n || quantities.cols() != m ||
        initial_quantities.rows() != n || initial_quantities.cols() != m || alpha.size() != m ||
        risk_weights.size() != m)
        throw Error(ErrorCode::LengthMismatch, "holdings table shape mismatch");
    for (std::size_t mu = 0; mu < m; ++mu) {
        if (!(prices[mu] > 0.0) || !std::isfinite(prices[mu]))
            throw Error(ErrorCode::NonPositivePrice,
                        "non-positive price for issuer '" + issuer_ids[mu] + "'");
        if (!(alpha[mu] >= 0.0 && alpha[mu] <= 1.0))
            throw Error(ErrorCode::InvalidArgument,
                        "alpha outside [0,1] for issuer '" + issuer_ids[mu] + "'");
        if (!(risk_weights[mu] >= 0.0) || !std::isfinite(risk_weights[mu]))
            throw Error(ErrorCode::InvalidArgument,
                        "negative risk weight for issuer '" + issuer_ids[mu] + "'");
    }
    for (double s : quantities.values())
        if (!(s >= 0.0) || !std::isfinite(s))
            throw Error(ErrorCode::InvalidArgument, "holding quantities must be finite and >= 0");
}

ExposureMatrix project_overlap(const HoldingsTable& holdings, NodeSetPtr nodes,
                               std::string layer_id) {
    const std::size_t n = nodes->size();
    holdings.validate(n);
    const std::size_t m = holdings.securities();
    Matrix w(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto si = holdings.quantities.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            auto sj = holdings.quantities.row(j);
            double v = 0.0;
            for (std::size_t mu = 0; mu < m; ++mu) v += std::min(si[mu], sj[mu]) * holdings.prices[mu];
            w(i, j) = v;
            w(j, i) = v;
        }
    }
    return ExposureMatrix(std::move(layer_id), std::move(nodes), std::move(w), false);
}

ExposureMatrix symmetrize(const ExposureMatrix& undirected) {
    if (undirected.directed())
        throw Error(ErrorCode::AlreadyDirected,
                    "layer '" + undirected.layer_id() + "' is already directed");
    // The undirected storage is already the symmetric pair of directed edges.
    return ExposureMatrix(undirected.layer_id(), undirected.nodes(), undirected.weights(), true);
}

Flattening flatten(std::span<const ExposureMatrix> layers, std::string layer_id) {
    if (layers.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to flatten");
    const NodeSetPtr& nodes = layers.front().nodes();
    for (const auto& l : layers)
        if (l.nodes() != nodes && !(*l.nodes() == *nodes))
            throw Error(ErrorCode::NodeSetMismatch,
                        "layer '" + l.layer_id() + "' is defined on a different node set");

    std::vector<const ExposureMatrix*> ordered;
    for (const auto& l : layers) ordered.push_back(&l);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](auto* a, auto* b) { return a->layer_id() < b->layer_id(); });

    const std::size_t n = nodes->size();
    Matrix w(n, n);
    std::vector<std::string> symmetrized;
    for (const ExposureMatrix* l : ordered) {
        if (!l->directed()) symmetrized.push_back(l->layer_id());
        const ExposureMatrix directed = l->directed() ? *l : symmetrize(*l);
        auto src = directed.weights().values();
        auto dst = w.values();
        for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k];
    }
    return {ExposureMatrix(std::move(layer_id), nodes, std::move(w), true), std::move(symmetrized)};
}

// ---------------------------------------------------------------------------
// Balance sheets

BalanceSheets BalanceSheets::zeros(std::size_t n) {
    BalanceSheets b;
    for (auto* col : b.columns()) col->assign(n, 0.0);
    return b;
}

const std::vector<std::string>& BalanceSheets::column_names() {
    static const std::vector<std::string> names = {
        "eq",       "total_assets", "cash",      "deposits", "ext_securities",
        "cross_holdings_a", "cross_issued_l", "loans_lt", "borrow_lt", "loans_st",
        "borrow_st", "repo_a",      "repo_l",    "other_a",  "other_l"};
    return names;
}

std::vector<std::vector<double>*> BalanceSheets::columns() {
    return {&eq,       &total_assets, &cash,      &deposits,  &ext_securities,
            &cross_holdings_a, &cross_issued_l, &loans_lt, &borrow_lt, &loans_st,
            &borrow_st, &repo_a,      &repo_l,    &other_a,   &other_l};
}

std::vector<const std::vector<double>*> BalanceSheets::columns() const {
    return {&eq,       &total_assets, &cash,      &deposits,  &ext_securities,
            &cross_holdings_a, &cross_issued_l, &loans_lt, &borrow_lt, &loans_st,
            &borrow_st, &repo_a,      &repo_l,    &other_a,   &other_l};
}

void BalanceSheets::validate(std::size_t n) const {
    const auto& names = column_names();
    auto cols = columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (cols[c]->size() != n)
            throw Error(ErrorCode::LengthMismatch, "balance-sheet item '" + names[c] +
                                                       "' has wrong length");
        for (double x : *cols[c])
            if (!(x >= 0.0) || !std::isfinite(x))
                throw Error(ErrorCode::InvalidArgument,
                            "balance-sheet item '" + names[c] + "' must be finite and >= 0");
    }
}

// ---------------------------------------------------------------------------
// MultiLayerNetwork

MultiLayerNetwork::MultiLayerNetwork(NodeSetPtr nodes)
    : nodes_(std::move(nodes)), balance_(BalanceSheets::zeros(nodes_ ? nodes_->size() : 0)) {
    if (!nodes_) throw Error(ErrorCode::InvalidArgument, "network without node set");
}

void MultiLayerNetwork::add_layer(ExposureMatrix layer) {
    if (layer.nodes() != nodes_ && !(*layer.nodes() == *nodes_))
        throw Error(ErrorCode::NodeSetMismatch,
                    "layer '" + layer.layer_id() + "' is defined on a different node set");
    const std::string name = layer.layer_id();
    if (layers_.count(name))
        throw Error(ErrorCode::DuplicateLayer, "layer '" + name + "' already present");
    // Re-anchor on the network's node set so all layers share one instance.
    ExposureMatrix anchored(name, nodes_, layer.weights(), layer.directed());
    layers_.emplace(name, std::move(anchored));
}

bool MultiLayerNetwork::has_layer(std::string_view name) const {
    return layers_.find(name) != layers_.end();
}

const ExposureMatrix& MultiLayerNetwork::layer(std::string_view name) const {
    auto it = layers_.find(name);
    if (it == layers_.end())
        throw Error(ErrorCode::MissingLayer, "missing layer '" + std::string(name) + "'");
    return it->second;
}

std::vector<std::string> MultiLayerNetwork::layer_names() const {
    std::vector<std::string> names;
    for (const auto& [name, _] : layers_) names.push_back(name);
    return names;
}

void MultiLayerNetwork::set_balance_sheets(BalanceSheets sheets) {
    sheets.validate(size());
    balance_ = std::move(sheets);
}

void MultiLayerNetwork::set_holdings(HoldingsTable holdings) {
    holdings.validate(size());
    ExposureMatrix ext = project_overlap(holdings, nodes_, "ext");
    layers_.erase("ext");
    layers_.emplace("ext", std::move(ext));
    holdings_ = std::move(holdings);
}

Flattening MultiLayerNetwork::flattened() const {
    std::vector<ExposureMatrix> all;
    for (const auto& [_, l] : layers_) all.push_back(l);
    if (all.empty()) return {ExposureMatrix::zeros("flat", nodes_, true), {}};
    return flatten(all);
}

}  // namespace mlnet
