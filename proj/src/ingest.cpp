#include "mlnet/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "json.hpp"

#include "textio.hpp"

namespace mlnet {

namespace fs = std::filesystem;
using json = nlohmann::json;
using textio::CsvReader;

namespace {

void expect_header(CsvReader& reader, const std::vector<std::string>& expected,
                   std::size_t optional_tail = 0) {
    const auto cols = reader.header();
    const std::size_t required = expected.size() - optional_tail;
    const bool ok = cols.size() >= required && cols.size() <= expected.size() &&
                    std::equal(cols.begin(), cols.end(), expected.begin());
    if (!ok) {
        std::string want;
        for (const auto& c : expected) want += (want.empty() ? "" : ",") + c;
        reader.fail(1, "unexpected header, want '" + want + "'");
    }
}

void require_fields(const CsvReader& reader, std::size_t got, std::size_t want, std::size_t line) {
    if (got != want)
        reader.fail(line, "expected " + std::to_string(want) + " fields, got " + std::to_string(got));
}

std::shared_ptr<const NodeSet> read_nodes(const fs::path& path) {
    CsvReader reader(path);
    const auto cols = reader.header();
    if (cols.empty() || cols[0] != "node_id" || cols.size() > 2 ||
        (cols.size() == 2 && cols[1] != "country"))
        reader.fail(1, "unexpected header, want 'node_id,country'");
    const bool with_country = cols.size() == 2;

    std::vector<std::string> ids, countries;
    std::set<std::string, std::less<>> seen;
    reader.rows([&](const std::vector<std::string_view>& f, std::size_t line) {
        if (f.size() != cols.size() && !(with_country && f.size() == 1))
            require_fields(reader, f.size(), cols.size(), line);
        if (f[0].empty()) reader.fail(line, "empty node_id");
        if (!seen.emplace(f[0]).second)
            throw Error(ErrorCode::DuplicateNode, reader.path().string() + ":" +
                                                      std::to_string(line) + ": duplicate node '" +
                                                      std::string(f[0]) + "'");
        ids.emplace_back(f[0]);
        countries.emplace_back(with_country && f.size() > 1 ? f[1] : std::string_view{});
        if (countries.back().size() != 0 && countries.back().size() != 2)
            reader.fail(line, "country must be a 2-letter code");
    });
    if (ids.empty()) reader.fail(1, "no nodes");
    return std::make_shared<const NodeSet>(std::move(ids), std::move(countries));
}

BalanceSheets read_balance_sheets(const fs::path& path, const NodeSet& nodes) {
    CsvReader reader(path);
    std::vector<std::string> expected = {"node_id"};
    for (const auto& c : BalanceSheets::column_names()) expected.push_back(c);
    expect_header(reader, expected);

    BalanceSheets sheets = BalanceSheets::zeros(nodes.size());
    auto cols = sheets.columns();
    std::vector<bool> present(nodes.size(), false);
    reader.rows([&](const std::vector<std::string_view>& f, std::size_t line) {
        require_fields(reader, f.size(), expected.size(), line);
        const auto i = nodes.find(f[0]);
        if (!i)
            throw Error(ErrorCode::UnknownNode, reader.path().string() + ":" +
                                                    std::to_string(line) + ": unknown node '" +
                                                    std::string(f[0]) + "'");
        if (present[*i]) reader.fail(line, "duplicate balance-sheet row for '" + nodes.id(*i) + "'");
        present[*i] = true;
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const double x = reader.number(f[c + 1], line);
            if (!(x >= 0.0)) reader.fail(line, "negative " + expected[c + 1]);
            (*cols[c])[*i] = x;
        }
    });
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (!present[i]) reader.fail(0, "missing balance-sheet row for node '" + nodes.id(i) + "'");
    return sheets;
}

ExposureMatrix read_layer(const fs::path& path, const std::string& name, bool directed,
                          const NodeSetPtr& nodes) {
    CsvReader reader(path);
    expect_header(reader, {"src", "dst", "weight_eur"});
    std::vector<Edge> edges;
    reader.rows([&](const std::vector<std::string_view>& f, std::size_t line) {
        require_fields(reader, f.size(), 3, line);
        for (std::size_t k = 0; k < 2; ++k)
            if (!nodes->find(f[k]))
                throw Error(ErrorCode::UnknownNode, reader.path().string() + ":" +
                                                        std::to_string(line) + ": unknown node '" +
                                                        std::string(f[k]) + "'");
        edges.push_back({std::string(f[0]), std::string(f[1]), reader.number(f[2], line)});
    });
    return build_layer(edges, nodes, name, directed).layer;
}

HoldingsTable read_holdings(const fs::path& holdings_path, const fs::path& prices_path,
                            const NodeSet& nodes) {
    CsvReader prices_reader(prices_path);
    expect_header(prices_reader, {"issuer_id", "price_eur"});
    std::vector<std::string> issuers;
    std::vector<double> prices;
    std::map<std::string, std::size_t, std::less<>> issuer_index;
    prices_reader.rows([&](const std::vector<std::string_view>& f, std::size_t line) {
        require_fields(prices_reader, f.size(), 2, line);
        if (f[0].empty()) prices_reader.fail(line, "empty issuer_id");
        if (!issuer_index.emplace(std::string(f[0]), issuers.size()).second)
            prices_reader.fail(line, "duplicate issuer '" + std::string(f[0]) + "'");
        const double p = prices_reader.number(f[1], line);
        if (!(p > 0.0))
            throw Error(ErrorCode::NonPositivePrice, prices_path.string() + ":" +
                                                         std::to_string(line) +
                                                         ": non-positive price for issuer '" +
                                                         std::string(f[0]) + "'");
        issuers.emplace_back(f[0]);
        prices.push_back(p);
    });

    CsvReader reader(holdings_path);
    expect_header(reader, {"node_id", "issuer_id", "quantity"});
    Matrix s(nodes.size(), issuers.size());
    reader.rows([&](const std::vector<std::string_view>& f, std::size_t line) {
        require_fields(reader, f.size(), 3, line);
        const auto i = nodes.find(f[0]);
        if (!i)
            throw Error(ErrorCode::UnknownNode, reader.path().string() + ":" +
                                                    std::to_string(line) + ": unknown node '" +
                                                    std::string(f[0]) + "'");
        auto mu = issuer_index.find(f[1]);
        if (mu == issuer_index.end())
            reader.fail(line, "issuer '" + std::string(f[1]) + "' has no price");
        const double q = reader.number(f[2], line);
        if (!(q >= 0.0)) reader.fail(line, "negative quantity");
        // Issuer-level aggregation: repeated rows accumulate.
        s(*i, mu->second) += q;
    });
    return HoldingsTable::make(std::move(issuers), std::move(s), std::move(prices));
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write failed: " + path.string());
}

}  // namespace

NetworkBundle read_manifest(const fs::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open manifest " + manifest_path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, manifest_path.string() + ": " + e.what());
    }

    NetworkBundle b;
    b.root = manifest_path.parent_path();
    try {
        b.format_version = doc.value("format_version", std::string{});
        if (b.format_version != kBundleFormatVersion)
            throw Error(ErrorCode::ParseError, manifest_path.string() +
                                                   ": unsupported format_version '" +
                                                   b.format_version + "'");
        b.nodes = doc.at("nodes").get<std::string>();
        b.balance_sheets = doc.at("balance_sheets").get<std::string>();
        if (doc.contains("layers")) {
            for (const auto& [name, entry] : doc.at("layers").items()) {
                LayerFile lf;
                lf.directed = name != "ext";
                if (entry.is_string()) {
                    lf.file = entry.get<std::string>();
                } else {
                    lf.file = entry.at("file").get<std::string>();
                    lf.directed = entry.value("directed", lf.directed);
                }
                b.layers.emplace(name, std::move(lf));
            }
        }
        if (doc.contains("holdings")) b.holdings = doc.at("holdings").get<std::string>();
        if (doc.contains("prices")) b.prices = doc.at("prices").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, manifest_path.string() + ": " + e.what());
    }
    if (b.holdings.has_value() != b.prices.has_value())
        throw Error(ErrorCode::ParseError,
                    manifest_path.string() + ": holdings and prices must be given together");
    return b;
}

void write_manifest(const NetworkBundle& b, const fs::path& manifest_path) {
    json doc;
    doc["format_version"] = b.format_version;
    doc["nodes"] = b.nodes.generic_string();
    doc["balance_sheets"] = b.balance_sheets.generic_string();
    json layers = json::object();
    for (const auto& [name, lf] : b.layers)
        layers[name] = {{"file", lf.file.generic_string()}, {"directed", lf.directed}};
    doc["layers"] = layers;
    if (b.holdings) doc["holdings"] = b.holdings->generic_string();
    if (b.prices) doc["prices"] = b.prices->generic_string();
    auto out = open_out(manifest_path);
    out << doc.dump(2) << '\n';
    finish(out, manifest_path);
}

MultiLayerNetwork load_network(const NetworkBundle& b) {
    auto check_exists = [&](const fs::path& p) {
        if (!fs::exists(b.resolve(p)))
            throw Error(ErrorCode::IoError, "bundle file not found: " + b.resolve(p).string());
    };
    if (b.format_version != kBundleFormatVersion)
        throw Error(ErrorCode::ParseError, "unsupported format_version '" + b.format_version + "'");
    check_exists(b.nodes);
    check_exists(b.balance_sheets);
    for (const auto& [_, lf] : b.layers) check_exists(lf.file);
    if (b.holdings) check_exists(*b.holdings);
    if (b.prices) check_exists(*b.prices);
    if (b.holdings && b.layers.count("ext"))
        throw Error(ErrorCode::BothExtSourcesProvided,
                    "bundle supplies both holdings and an ext edge file");

    auto nodes = read_nodes(b.resolve(b.nodes));
    MultiLayerNetwork net(nodes);
    net.set_balance_sheets(read_balance_sheets(b.resolve(b.balance_sheets), *nodes));
    for (const auto& [name, lf] : b.layers)
        net.add_layer(read_layer(b.resolve(lf.file), name, lf.directed, nodes));
    if (b.holdings) net.set_holdings(read_holdings(b.resolve(*b.holdings), b.resolve(*b.prices), *nodes));
    return net;
}

MultiLayerNetwork load_network(const fs::path& manifest_path) {
    return load_network(read_manifest(manifest_path));
}

NetworkBundle write_network(const MultiLayerNetwork& net, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

    using textio::format_double;
    const NodeSet& nodes = *net.nodes();
    const std::size_t n = nodes.size();

    NetworkBundle b;
    b.root = dir;
    b.nodes = "nodes.csv";
    b.balance_sheets = "balance_sheets.csv";

    {
        auto out = open_out(dir / b.nodes);
        out << "node_id,country\n";
        for (std::size_t i = 0; i < n; ++i) out << nodes.id(i) << ',' << nodes.country(i) << '\n';
        finish(out, dir / b.nodes);
    }
    {
        auto out = open_out(dir / b.balance_sheets);
        out << "node_id";
        for (const auto& c : BalanceSheets::column_names()) out << ',' << c;
        out << '\n';
        const auto cols = net.balance_sheets().columns();
        for (std::size_t i = 0; i < n; ++i) {
            out << nodes.id(i);
            for (const auto* col : cols) out << ',' << format_double((*col)[i]);
            out << '\n';
        }
        finish(out, dir / b.balance_sheets);
    }

    const bool ext_from_holdings = net.holdings().has_value();
    for (const auto& [name, layer] : net.layers()) {
        if (name == "ext" && ext_from_holdings) continue;
        const fs::path file = "layer_" + name + ".csv";
        auto out = open_out(dir / file);
        out << "src,dst,weight_eur\n";
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = layer.directed() ? 0 : i + 1; j < n; ++j)
                if (layer(i, j) != 0.0)
                    out << nodes.id(i) << ',' << nodes.id(j) << ',' << format_double(layer(i, j))
                        << '\n';
        finish(out, dir / file);
        b.layers.emplace(name, LayerFile{file, layer.directed()});
    }

    if (ext_from_holdings) {
        const HoldingsTable& h = *net.holdings();
        b.holdings = "holdings.csv";
        b.prices = "prices.csv";
        auto out = open_out(dir / *b.prices);
        out << "issuer_id,price_eur\n";
        for (std::size_t mu = 0; mu < h.securities(); ++mu)
            out << h.issuer_ids[mu] << ',' << format_double(h.prices[mu]) << '\n';
        finish(out, dir / *b.prices);

        auto hout = open_out(dir / *b.holdings);
        hout << "node_id,issuer_id,quantity\n";
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t mu = 0; mu < h.securities(); ++mu)
                if (h.quantities(i, mu) != 0.0)
                    hout << nodes.id(i) << ',' << h.issuer_ids[mu] << ','
                         << format_double(h.quantities(i, mu)) << '\n';
        finish(hout, dir / *b.holdings);
    }

    write_manifest(b, dir / "manifest.json");
    return b;
}

// ---------------------------------------------------------------------------
// Synthetic generator

std::vector<SyntheticLayerSpec> SyntheticConfig::default_layers() {
    return {
        {"ltc", {0.50, 0.12, 0.02}, {std::log(4.0e7), 1.3}},
        {"stc", {0.40, 0.10, 0.02}, {std::log(2.0e7), 1.2}},
        {"cs", {0.45, 0.08, 0.01}, {std::log(1.5e7), 1.4}},
        {"stf", {0.45, 0.12, 0.02}, {std::log(3.0e7), 1.2}},
    };
}

void SyntheticConfig::validate() const {
    auto bad = [](const std::string& field) {
        throw Error(ErrorCode::InvalidConfig, "invalid synthetic config field '" + field + "'");
    };
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (n < 2) bad("n");
    if (m < 1) bad("m");
    if (!(core_fraction > 0.0 && core_fraction < 1.0)) bad("core_fraction");
    if (!prob(holdings_density)) bad("holdings_density");
    if (!(core_holdings_boost >= 0.0)) bad("core_holdings_boost");
    if (!(equity_scale > 0.0 && equity_scale < 1.0)) bad("equity_scale");
    if (!(deposit_share >= 0.0 && deposit_share + equity_scale < 1.0)) bad("deposit_share");
    if (!(cash_ratio_min >= 0.0 && cash_ratio_max >= cash_ratio_min)) bad("cash_ratio");
    if (!(cash_ratio_max * deposit_share < 1.0)) bad("cash_ratio_max");
    if (!(other_assets_mult >= 0.0)) bad("other_assets_mult");
    if (!(quantity.sigma >= 0.0) || !(price.sigma >= 0.0)) bad("lognormal sigma");
    std::set<std::string> names;
    for (const auto& l : layers) {
        if (l.name.empty() || l.name == "ext" || !names.insert(l.name).second) bad("layers.name");
        if (!prob(l.density.core_core)) bad("layers." + l.name + ".core_core");
        if (!prob(l.density.core_periphery)) bad("layers." + l.name + ".core_periphery");
        if (!prob(l.density.periphery_periphery)) bad("layers." + l.name + ".periphery_periphery");
        if (!(l.weights.sigma >= 0.0)) bad("layers." + l.name + ".sigma");
    }
}

MultiLayerNetwork generate_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = cfg.n;
    const std::size_t core = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(cfg.core_fraction * static_cast<double>(n))), 1, n - 1);

    static const char* kCountries[] = {"DE", "FR", "IT", "ES", "NL", "BE", "AT", "FI", "IE", "PT"};
    std::vector<std::string> ids(n), countries(n);
    const int width = static_cast<int>(std::to_string(n).size());
    for (std::size_t i = 0; i < n; ++i) {
        std::string num = std::to_string(i + 1);
        ids[i] = "BG" + std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(num.size()))), '0') + num;
        countries[i] = kCountries[static_cast<std::size_t>(unit(rng) * 10.0) % 10];
    }
    auto nodes = std::make_shared<const NodeSet>(ids, countries);
    MultiLayerNetwork net(nodes);

    // Node activity factors (mean one) add within-block heterogeneity on top
    // of the core/periphery split.
    std::lognormal_distribution<double> activity_dist(-0.125, 0.5);
    std::vector<double> activity(n);
    for (auto& a : activity) a = activity_dist(rng);

    auto whole = [](double x) { return std::max(1.0, std::round(x)); };
    for (const auto& spec : cfg.layers) {
        std::lognormal_distribution<double> weight(spec.weights.mu, spec.weights.sigma);
        Matrix w(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const bool ci = i < core, cj = j < core;
                const double base = ci && cj   ? spec.density.core_core
                                    : ci || cj ? spec.density.core_periphery
                                               : spec.density.periphery_periphery;
                const double p = std::min(1.0, base * activity[i] * activity[j]);
                const double u = unit(rng);
                const double x = weight(rng);
                if (u < p) w(i, j) = whole(x);
            }
        }
        net.add_layer(ExposureMatrix(spec.name, nodes, std::move(w), true));
    }

    const std::size_t m = cfg.m;
    std::vector<std::string> issuers(m);
    std::vector<double> prices(m);
    std::lognormal_distribution<double> price_dist(cfg.price.mu, cfg.price.sigma);
    std::lognormal_distribution<double> qty_dist(cfg.quantity.mu, cfg.quantity.sigma);
    const int mwidth = static_cast<int>(std::to_string(m).size());
    for (std::size_t mu = 0; mu < m; ++mu) {
        std::string num = std::to_string(mu + 1);
        issuers[mu] = "IS" + std::string(static_cast<std::size_t>(std::max(0, mwidth - static_cast<int>(num.size()))), '0') + num;
        prices[mu] = whole(price_dist(rng));
    }
    Matrix s(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::min(1.0, cfg.holdings_density * (i < core ? cfg.core_holdings_boost : 1.0));
        for (std::size_t mu = 0; mu < m; ++mu) {
            const double u = unit(rng);
            const double q = qty_dist(rng);
            if (u < p) s(i, mu) = whole(q);
        }
    }
    net.set_holdings(HoldingsTable::make(std::move(issuers), std::move(s), std::move(prices)));

    auto row_sums = [&](std::string_view name) {
        std::vector<double> r(n, 0.0);
        if (!net.has_layer(name)) return r;
        const auto& l = net.layer(name);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) r[i] += l(i, j);
        return r;
    };
    auto col_sums = [&](std::string_view name) {
        std::vector<double> c(n, 0.0);
        if (!net.has_layer(name)) return c;
        const auto& l = net.layer(name);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) c[j] += l(i, j);
        return c;
    };

    BalanceSheets b = BalanceSheets::zeros(n);
    b.loans_lt = row_sums("ltc");
    b.borrow_lt = col_sums("ltc");
    b.loans_st = row_sums("stc");
    b.borrow_st = col_sums("stc");
    b.cross_holdings_a = row_sums("cs");
    b.cross_issued_l = col_sums("cs");
    b.repo_a = row_sums("stf");
    b.repo_l = col_sums("stf");
    b.ext_securities = net.holdings()->market_values();

    std::uniform_real_distribution<double> cash_ratio(cfg.cash_ratio_min, cfg.cash_ratio_max);
    std::lognormal_distribution<double> other_dist(-0.125, 0.5);
    const double delta = cfg.deposit_share;
    const double free_share = 1.0 - delta - cfg.equity_scale;
    for (std::size_t i = 0; i < n; ++i) {
        const double ib_assets = b.loans_lt[i] + b.loans_st[i] + b.cross_holdings_a[i] + b.repo_a[i];
        const double ib_liab = b.borrow_lt[i] + b.borrow_st[i] + b.cross_issued_l[i] + b.repo_l[i];
        // Other assets keep the liability side feasible: interbank liabilities
        // never exceed the share of the balance sheet left after deposits and equity.
        const double scale = std::max(ib_assets + b.ext_securities[i], 1.0e6);
        b.other_a[i] = std::max(cfg.other_assets_mult * scale * other_dist(rng), ib_liab / free_share);
        const double a0 = ib_assets + b.ext_securities[i] + b.other_a[i];
        const double kappa = cash_ratio(rng);
        b.cash[i] = kappa * (delta * a0 + b.borrow_st[i] + b.repo_l[i]) / (1.0 - kappa * delta);
        b.total_assets[i] = a0 + b.cash[i];
        b.deposits[i] = delta * b.total_assets[i];
        b.eq[i] = cfg.equity_scale * b.total_assets[i];
        b.other_l[i] = std::max(0.0, b.total_assets[i] - b.deposits[i] - b.eq[i] - ib_liab);
    }
    net.set_balance_sheets(std::move(b));
    return net;
}

}  // namespace mlnet
