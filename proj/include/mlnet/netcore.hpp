#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mlnet/error.hpp"
#include "mlnet/matrix.hpp"

namespace mlnet {

/// Ordered set of banking-group identifiers shared by every layer of a
/// network. Countries are optional two-letter codes used for report labels.
class NodeSet {
public:
    explicit NodeSet(std::vector<std::string> ids, std::vector<std::string> countries = {});

    std::size_t size() const noexcept { return ids_.size(); }
    const std::vector<std::string>& ids() const noexcept { return ids_; }
    const std::string& id(std::size_t i) const { return ids_.at(i); }

    bool has_countries() const noexcept { return !countries_.empty(); }
    const std::string& country(std::size_t i) const;

    std::optional<std::size_t> find(std::string_view id) const;
    /// Throws UnknownNode.
    std::size_t index_of(std::string_view id) const;

    /// Anonymized report label: "<country>-<k>" with k counting within the
    /// country (1-based, node order), or the plain id when no country is known.
    std::string label(std::size_t i) const;

    friend bool operator==(const NodeSet& a, const NodeSet& b) {
        return a.ids_ == b.ids_ && a.countries_ == b.countries_;
    }

private:
    std::vector<std::string> ids_;
    std::vector<std::string> countries_;
    std::unordered_map<std::string, std::size_t> index_;
};

using NodeSetPtr = std::shared_ptr<const NodeSet>;

/// Weighted adjacency on a node set. Entry (i, j) is i's exposure to j in EUR.
/// The constructor enforces a zero diagonal, finite non-negative weights and,
/// for undirected layers, exact symmetry.
class ExposureMatrix {
public:
    ExposureMatrix(std::string layer_id, NodeSetPtr nodes, Matrix weights, bool directed);

    static ExposureMatrix zeros(std::string layer_id, NodeSetPtr nodes, bool directed);

    const std::string& layer_id() const noexcept { return layer_id_; }
    const NodeSetPtr& nodes() const noexcept { return nodes_; }
    const Matrix& weights() const noexcept { return w_; }
    bool directed() const noexcept { return directed_; }
    std::size_t size() const noexcept { return w_.rows(); }

    double operator()(std::size_t i, std::size_t j) const noexcept { return w_(i, j); }
    double total_weight() const noexcept { return w_.sum(); }
    std::size_t edge_count() const noexcept;

private:
    std::string layer_id_;
    NodeSetPtr nodes_;
    Matrix w_;
    bool directed_;
};

struct Edge {
    std::string src;
    std::string dst;
    double weight = 0.0;
};

struct LayerBuild {
    ExposureMatrix layer;
    std::size_t self_loops_dropped = 0;
};

/// Aggregates an edge list onto the node set: duplicate pairs sum and
/// self-loops (intra-group exposures) are dropped and counted. For undirected
/// layers each edge contributes to both (i, j) and (j, i).
LayerBuild build_layer(std::span<const Edge> edges, NodeSetPtr nodes, std::string layer_id,
                       bool directed);

/// Issuer-level securities holdings: quantities S (banks x issuers), prices P,
/// a snapshot S0 of the initial quantities, market narrowness alpha and risk
/// weights per issuer.
struct HoldingsTable {
    static constexpr double default_alpha = 0.2;
    static constexpr double default_risk_weight = 0.1;

    std::vector<std::string> issuer_ids;
    Matrix quantities;
    std::vector<double> prices;
    Matrix initial_quantities;
    std::vector<double> alpha;
    std::vector<double> risk_weights;

    /// S0 = S, alpha and risk weights at their defaults.
    static HoldingsTable make(std::vector<std::string> issuer_ids, Matrix quantities,
                              std::vector<double> prices);

    std::size_t banks() const noexcept { return quantities.rows(); }
    std::size_t securities() const noexcept { return prices.size(); }

    /// Market value S P of each bank's portfolio.
    std::vector<double> market_values() const;

    /// Throws on shape mismatches, negative quantities and non-positive prices.
    void validate(std::size_t n) const;
};

/// Undirected overlap layer: w(i, j) = sum over issuers of min(s_i, s_j) * p.
ExposureMatrix project_overlap(const HoldingsTable& holdings, NodeSetPtr nodes,
                               std::string layer_id = "ext");

/// Directed copy of an undirected layer; throws AlreadyDirected otherwise.
ExposureMatrix symmetrize(const ExposureMatrix& undirected);

struct Flattening {
    ExposureMatrix layer;
    std::vector<std::string> symmetrized;
};

/// Edgewise sum of all layers (undirected ones symmetrized first). Layers are
/// accumulated in layer-id order so that the result does not depend on the
/// order of the input list.
Flattening flatten(std::span<const ExposureMatrix> layers, std::string layer_id = "flat");

/// Node enrichment: the simplified balance sheet items, one vector per item.
struct BalanceSheets {
    std::vector<double> eq;
    std::vector<double> total_assets;
    std::vector<double> cash;
    std::vector<double> deposits;
    std::vector<double> ext_securities;
    std::vector<double> cross_holdings_a;
    std::vector<double> cross_issued_l;
    std::vector<double> loans_lt;
    std::vector<double> borrow_lt;
    std::vector<double> loans_st;
    std::vector<double> borrow_st;
    std::vector<double> repo_a;
    std::vector<double> repo_l;
    std::vector<double> other_a;
    std::vector<double> other_l;

    static BalanceSheets zeros(std::size_t n);

    /// Column order of balance_sheets.csv (after node_id).
    static const std::vector<std::string>& column_names();
    std::vector<std::vector<double>*> columns();
    std::vector<const std::vector<double>*> columns() const;

    std::size_t size() const noexcept { return eq.size(); }
    void validate(std::size_t n) const;

    friend bool operator==(const BalanceSheets&, const BalanceSheets&) = default;
};

/// A family of exposure layers over one node set plus node enrichment.
class MultiLayerNetwork {
public:
    explicit MultiLayerNetwork(NodeSetPtr nodes);

    const NodeSetPtr& nodes() const noexcept { return nodes_; }
    std::size_t size() const noexcept { return nodes_->size(); }

    /// Throws NodeSetMismatch or DuplicateLayer.
    void add_layer(ExposureMatrix layer);
    bool has_layer(std::string_view name) const;
    /// Throws MissingLayer.
    const ExposureMatrix& layer(std::string_view name) const;
    const std::map<std::string, ExposureMatrix, std::less<>>& layers() const noexcept {
        return layers_;
    }
    std::vector<std::string> layer_names() const;

    const BalanceSheets& balance_sheets() const noexcept { return balance_; }
    void set_balance_sheets(BalanceSheets sheets);

    const std::optional<HoldingsTable>& holdings() const noexcept { return holdings_; }
    /// Stores the holdings; the ext layer is rebuilt from them via
    /// project_overlap, replacing any ext layer present.
    void set_holdings(HoldingsTable holdings);

    /// Flattening of every layer currently in the network.
    Flattening flattened() const;

private:
    NodeSetPtr nodes_;
    std::map<std::string, ExposureMatrix, std::less<>> layers_;
    BalanceSheets balance_;
    std::optional<HoldingsTable> holdings_;
};

}  // namespace mlnet
