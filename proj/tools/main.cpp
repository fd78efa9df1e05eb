// Command-line front end. Everything here goes through the C interface.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlnet/mlnet.h"
#include "svg.hpp"

namespace fs = std::filesystem;
using namespace mlnet_cli;

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNoConvergence = 3 };

struct CliError : std::runtime_error {
    CliError(int code, const std::string& msg) : std::runtime_error(msg), exit_code(code) {}
    int exit_code;
};

[[noreturn]] void config_error(const std::string& msg) { throw CliError(kConfigError, msg); }

void check(mlnet_status status) {
    if (status == MLNET_OK) return;
    const std::string msg = std::string(mlnet_status_name(status)) + ": " + mlnet_last_error();
    if (status == MLNET_CONFIG_ERROR || status == MLNET_INVALID_CONFIG) throw CliError(kConfigError, msg);
    if (status == MLNET_NO_CONVERGENCE) throw CliError(kNoConvergence, msg);
    throw CliError(kFailure, msg);
}

struct NetworkDeleter {
    void operator()(mlnet_network* p) const { mlnet_network_free(p); }
};
struct TableDeleter {
    void operator()(mlnet_table* p) const { mlnet_table_free(p); }
};
struct ParamsDeleter {
    void operator()(mlnet_abm_params* p) const { mlnet_abm_params_free(p); }
};
using Network = std::unique_ptr<mlnet_network, NetworkDeleter>;
using Table = std::unique_ptr<mlnet_table, TableDeleter>;
using Params = std::unique_ptr<mlnet_abm_params, ParamsDeleter>;

double cell_number(const Table& t, std::size_t r, std::size_t c) {
    double x = 0.0;
    check(mlnet_table_number(t.get(), r, c, &x));
    return x;
}

std::string cell_text(const Table& t, std::size_t r, std::size_t c) {
    const char* s = nullptr;
    check(mlnet_table_text(t.get(), r, c, &s));
    return s;
}

std::size_t column_index(const Table& t, const std::string& name) {
    for (std::size_t c = 0; c < mlnet_table_cols(t.get()); ++c) {
        const char* s = nullptr;
        check(mlnet_table_column(t.get(), c, &s));
        if (name == s) return c;
    }
    throw CliError(kFailure, "missing column " + name);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) {
        part = trim(part);
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
    if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(x))
        config_error("setting '" + key + "': expected a number, got '" + value + "'");
    return x;
}

unsigned long long parse_count(const std::string& key, const std::string& value) {
    unsigned long long x = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        config_error("setting '" + key + "': expected an unsigned integer, got '" + value + "'");
    return x;
}

std::vector<double> parse_doubles(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& part : split_list(value)) out.push_back(parse_double(key, part));
    if (out.empty()) config_error("setting '" + key + "' must not be empty");
    return out;
}

std::string format_number(double x) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, end);
}

const std::vector<std::string> kAnalyses = {"topology", "debtrank", "superpose", "abm"};

struct Scenario {
    std::optional<std::string> bundle;
    bool synthetic = false;
    std::vector<std::pair<std::string, std::string>> synthetic_settings;
    std::set<std::string> analyses;
    std::vector<double> betas{0.05, 0.1, 0.2};
    std::string out = "out";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    std::string debtrank_mode = "any-distress";
    std::vector<std::string> calibrations{"credit", "liquidity"};
    std::vector<std::pair<std::string, std::string>> pairs{{"ltc", "cs"}, {"stc", "stf"}};
    double superpose_beta = 0.1;
    double damping = 0.85;
    std::string distance = "inverse-weight";
    std::size_t grid_points = 256;
    std::vector<std::pair<std::string, std::string>> abm_settings;
};

void apply_config_line(Scenario& sc, const std::string& key, const std::string& value) {
    if (key.rfind("synthetic.", 0) == 0) {
        sc.synthetic = true;
        sc.synthetic_settings.emplace_back(key.substr(10), value);
    } else if (key == "synthetic") {
        sc.synthetic = value == "true" || value == "1" || value == "yes";
    } else if (key.rfind("abm.", 0) == 0) {
        sc.abm_settings.emplace_back(key.substr(4), value);
    } else if (key == "bundle") {
        sc.bundle = value;
    } else if (key == "out") {
        sc.out = value;
    } else if (key == "threads") {
        sc.threads = static_cast<unsigned>(std::max<unsigned long long>(1, parse_count(key, value)));
    } else if (key == "seed") {
        sc.synthetic = true;
        sc.synthetic_settings.emplace_back("seed", value);
    } else if (key == "beta") {
        sc.betas = parse_doubles(key, value);
    } else if (key == "analyses") {
        sc.analyses.clear();
        for (const auto& a : split_list(value)) {
            if (std::find(kAnalyses.begin(), kAnalyses.end(), a) == kAnalyses.end())
                config_error("unknown analysis '" + a + "'");
            sc.analyses.insert(a);
        }
        if (sc.analyses.empty()) config_error("analyses must not be empty");
    } else if (key == "debtrank.mode") {
        sc.debtrank_mode = value;
    } else if (key == "debtrank.calibrations") {
        sc.calibrations = split_list(value);
        if (sc.calibrations.empty()) config_error("debtrank.calibrations must not be empty");
    } else if (key == "superpose.pairs") {
        sc.pairs.clear();
        for (const auto& p : split_list(value)) {
            const auto plus = p.find('+');
            if (plus == std::string::npos) config_error("superpose.pairs entries look like ltc+cs");
            sc.pairs.emplace_back(trim(p.substr(0, plus)), trim(p.substr(plus + 1)));
        }
        if (sc.pairs.empty()) config_error("superpose.pairs must not be empty");
    } else if (key == "superpose.beta") {
        sc.superpose_beta = parse_double(key, value);
    } else if (key == "topology.damping") {
        sc.damping = parse_double(key, value);
    } else if (key == "topology.distance") {
        sc.distance = value;
    } else if (key == "topology.grid_points") {
        sc.grid_points = parse_count(key, value);
    } else {
        config_error("unknown setting '" + key + "'");
    }
}

void read_config(Scenario& sc, const std::string& path) {
    std::ifstream is(path);
    if (!is) config_error("cannot read config file " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            config_error(path + ":" + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) config_error(path + ":" + std::to_string(line_no) + ": empty key");
        try {
            apply_config_line(sc, key, trim(line.substr(eq + 1)));
        } catch (const CliError& e) {
            throw CliError(e.exit_code, path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

struct Flags {
    std::string config;
    std::string bundle;
    std::string out;
    unsigned threads = 0;
    std::optional<unsigned long long> seed;
    std::string beta;
    std::optional<double> gamma_bar;
    std::string price_mode;
    std::string debtrank_mode;
    bool strict = false;
    std::string manifest;  // positional for validate
};

Scenario build_scenario(const Flags& flags) {
    Scenario sc;
    if (!flags.config.empty()) read_config(sc, flags.config);
    if (!flags.bundle.empty()) sc.bundle = flags.bundle;
    if (!flags.manifest.empty()) sc.bundle = flags.manifest;
    if (!flags.out.empty()) sc.out = flags.out;
    if (flags.threads) sc.threads = flags.threads;
    if (flags.seed) apply_config_line(sc, "seed", std::to_string(*flags.seed));
    if (!flags.beta.empty()) sc.betas = parse_doubles("--beta", flags.beta);
    if (flags.gamma_bar) sc.abm_settings.emplace_back("gamma_bar", format_number(*flags.gamma_bar));
    if (!flags.price_mode.empty()) sc.abm_settings.emplace_back("price_mode", flags.price_mode);
    if (!flags.debtrank_mode.empty()) sc.debtrank_mode = flags.debtrank_mode;
    if (flags.strict) sc.abm_settings.emplace_back("strict_paper_formulas", "true");
    if (sc.debtrank_mode != "any-distress" && sc.debtrank_mode != "full-default")
        config_error("debtrank mode must be any-distress or full-default");
    for (const auto& c : sc.calibrations)
        if (c != "credit" && c != "liquidity") config_error("unknown calibration '" + c + "'");
    if (sc.betas.empty()) config_error("beta grid must not be empty");
    if (sc.grid_points < 2) config_error("topology.grid_points must be at least 2");
    return sc;
}

Network open_network(const Scenario& sc, bool allow_default_synthetic) {
    const bool synthetic = sc.synthetic || (allow_default_synthetic && !sc.bundle);
    if (sc.bundle && synthetic) config_error("specify either a bundle or synthetic settings, not both");
    if (!sc.bundle && !synthetic) config_error("no input: give --bundle/bundle or synthetic settings");
    mlnet_network* raw = nullptr;
    if (sc.bundle) {
        check(mlnet_network_load(sc.bundle->c_str(), &raw));
    } else {
        std::string text;
        for (const auto& [k, v] : sc.synthetic_settings) text += k + " = " + v + "\n";
        check(mlnet_network_generate(text.c_str(), &raw));
    }
    return Network(raw);
}

std::vector<std::string> layer_names(const Network& net) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < mlnet_network_layer_count(net.get()); ++k) {
        const char* s = nullptr;
        check(mlnet_network_layer_name(net.get(), k, &s));
        out.emplace_back(s);
    }
    return out;
}

// Tracks every file written so that the outputs manifest is complete.
class OutputDir {
public:
    explicit OutputDir(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

    fs::path path(const std::string& rel) {
        const fs::path p = root_ / rel;
        fs::create_directories(p.parent_path());
        files_.insert(rel);
        return p;
    }

    void table(const std::string& rel, const Table& t) { check(mlnet_table_write_csv(t.get(), path(rel).c_str())); }

    void text(const std::string& rel, const std::string& content) {
        std::ofstream os(path(rel), std::ios::binary);
        os << content;
        if (!os) throw CliError(kFailure, "cannot write " + rel);
    }

    void note(std::string msg) { notes_.push_back(std::move(msg)); }
    void record_files(const std::vector<std::string>& rels) { files_.insert(rels.begin(), rels.end()); }

    void finish(const std::string& command, const std::vector<std::string>& analyses) {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["analyses"] = analyses;
        j["files"] = std::vector<std::string>(files_.begin(), files_.end());
        j["notes"] = notes_;
        std::ofstream os(root_ / "outputs.json", std::ios::binary);
        os << j.dump(2) << '\n';
        if (!os) throw CliError(kFailure, "cannot write outputs.json");
    }

private:
    fs::path root_;
    std::set<std::string> files_;
    std::vector<std::string> notes_;
};

std::vector<double> column_values(const Table& t, std::size_t col) {
    std::vector<double> out;
    for (std::size_t r = 0; r < mlnet_table_rows(t.get()); ++r) out.push_back(cell_number(t, r, col));
    return out;
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t k = v.size();
    return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

// KDE curve of the samples, or nothing when the sample is degenerate.
std::optional<Series> density_series(const std::vector<double>& samples, std::size_t grid, const std::string& name,
                                     const std::string& color, OutputDir& out, const std::string& what) {
    mlnet_table* raw = nullptr;
    const auto status = mlnet_kde_table(samples.data(), samples.size(), grid, nullptr, &raw);
    if (status == MLNET_DEGENERATE_SAMPLE) {
        out.note(what + ": no density for " + name + " (degenerate sample)");
        return std::nullopt;
    }
    check(status);
    Table t(raw);
    Series s{name, color, column_values(t, 0), column_values(t, 1), median_of(samples)};
    return s;
}

void run_topology(const Scenario& sc, const Network& net, OutputDir& out) {
    out.note("topology: betweenness is divided by (n-1)(n-2), the number of ordered pairs of other nodes");
    auto layers = layer_names(net);
    layers.push_back("flat");

    auto summary = std::ostringstream();
    summary << "layer,directed,edges,total_weight,median_pagerank,median_betweenness,median_closeness\n";
    std::map<std::string, std::vector<Series>> curves;
    for (const auto& layer : layers) {
        int directed = 0;
        std::size_t edges = 0;
        double total = 0.0;
        check(mlnet_network_layer_info(net.get(), layer.c_str(), &directed, &edges, &total));

        mlnet_table* raw = nullptr;
        check(mlnet_degree_table(net.get(), layer.c_str(), &raw));
        Table deg(raw);
        out.table("topology/degree_" + layer + ".csv", deg);
        check(mlnet_centrality_table(net.get(), layer.c_str(), sc.damping, sc.distance.c_str(), &raw));
        Table cen(raw);
        out.table("topology/centrality_" + layer + ".csv", cen);

        const std::map<std::string, std::vector<double>> metrics = {
            {"in_degree", column_values(deg, 2)},     {"out_degree", column_values(deg, 3)},
            {"pagerank", column_values(cen, 2)},      {"betweenness", column_values(cen, 3)},
            {"closeness", column_values(cen, 4)},
        };
        summary << layer << ',' << directed << ',' << edges << ',' << format_number(total) << ','
                << format_number(median_of(metrics.at("pagerank"))) << ','
                << format_number(median_of(metrics.at("betweenness"))) << ','
                << format_number(median_of(metrics.at("closeness"))) << '\n';
        for (const auto& [metric, values] : metrics)
            if (auto s = density_series(values, sc.grid_points, layer, layer_color(layer), out, metric))
                curves[metric].push_back(std::move(*s));
    }
    out.text("topology/summary.csv", summary.str());
    for (const std::string metric : {"in_degree", "out_degree", "pagerank", "betweenness", "closeness"})
        out.text("topology/density_" + metric + ".svg",
                 line_chart({metric + " density by layer", metric, "density"}, curves[metric]));
}

void run_debtrank(const Scenario& sc, const Network& net, OutputDir& out) {
    for (const auto& calibration : sc.calibrations) {
        mlnet_table* raw = nullptr;
        const bool liquidity = calibration == "liquidity";
        check(mlnet_debtrank_table(net.get(), calibration.c_str(), liquidity ? sc.betas.data() : nullptr,
                                   liquidity ? sc.betas.size() : 0, sc.debtrank_mode.c_str(), sc.threads, &raw));
        Table t(raw);
        // One CSV per layer; rows keep the library order (beta, then node).
        std::map<std::string, std::vector<std::size_t>> by_layer;
        std::vector<std::string> order;
        for (std::size_t r = 0; r < mlnet_table_rows(t.get()); ++r) {
            const auto layer = cell_text(t, r, 1);
            if (!by_layer.count(layer)) order.push_back(layer);
            by_layer[layer].push_back(r);
        }
        for (const auto& layer : order) {
            std::ostringstream csv;
            csv << "node_id,layer,beta,mode,dr\n";
            std::map<std::string, std::vector<double>> by_beta;
            std::vector<std::string> beta_order;
            for (std::size_t r : by_layer[layer]) {
                for (std::size_t c = 0; c < 5; ++c) csv << (c ? "," : "") << cell_text(t, r, c);
                csv << '\n';
                const auto beta = cell_text(t, r, 2);
                if (!by_beta.count(beta)) beta_order.push_back(beta);
                by_beta[beta].push_back(cell_number(t, r, 4));
            }
            out.text("debtrank/dr_" + layer + ".csv", csv.str());

            std::vector<Series> curves;
            for (const auto& beta : beta_order) {
                const std::string name = beta.empty() ? layer : layer + " beta=" + beta;
                if (auto s = density_series(by_beta[beta], sc.grid_points, name, layer_color(layer), out,
                                            "debtrank " + layer))
                    curves.push_back(std::move(*s));
            }
            out.text("debtrank/density_" + layer + ".svg",
                     line_chart({"DebtRank density, " + layer + " (" + calibration + ")", "DebtRank", "density"},
                                curves));
        }
    }
}

void run_superpose(const Scenario& sc, const Network& net, OutputDir& out) {
    for (const auto& [a, b] : sc.pairs) {
        const bool liquidity = a == "stc" || a == "stf";
        mlnet_table* raw = nullptr;
        check(mlnet_superposition_table(net.get(), a.c_str(), b.c_str(), liquidity ? "liquidity" : "credit",
                                        sc.superpose_beta, sc.debtrank_mode.c_str(), sc.threads, &raw));
        Table t(raw);
        out.table("superpose/" + a + "+" + b + ".csv", t);
    }
    out.note("superpose: dr_aggregated weights nodes by the economic values of the summed layer, each term of "
             "dr_linear_sum by those of its own layer");
}

void run_abm(const Scenario& sc, const Network& net, OutputDir& out) {
    mlnet_abm_params* raw_params = nullptr;
    check(mlnet_abm_params_new(&raw_params));
    Params params(raw_params);
    for (const auto& [k, v] : sc.abm_settings) check(mlnet_abm_params_set(params.get(), k.c_str(), v.c_str()));

    mlnet_table* raw = nullptr;
    check(mlnet_node_table(net.get(), &raw));
    Table nodes(raw);
    out.table("abm/nodes.csv", nodes);

    mlnet_table* raw_results = nullptr;
    mlnet_table* raw_cycles = nullptr;
    check(mlnet_abm_sweep(net.get(), params.get(), sc.betas.data(), sc.betas.size(), sc.threads, &raw_results,
                          &raw_cycles));
    Table results(raw_results), cycles(raw_cycles);
    out.table("abm/results.csv", results);
    out.table("abm/cycles.csv", cycles);

    const std::size_t n = mlnet_network_size(net.get());
    const std::size_t label_col = column_index(nodes, "label");
    const std::size_t assets_col = column_index(nodes, "total_assets");
    for (std::size_t b = 0; b < sc.betas.size(); ++b) {
        std::vector<Point> defaults, capital;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t r = b * n + i;
            const double extra = cell_number(results, r, 2);
            const double size = cell_number(nodes, i, assets_col);
            const auto label = cell_text(nodes, i, label_col);
            defaults.push_back({label, extra, size, extra > 0});
            capital.push_back({label, cell_number(results, r, 3), size, extra > 0});
        }
        const auto beta = format_number(sc.betas[b]);
        out.text("abm/additional_defaults_beta_" + beta + ".svg",
                 scatter_chart({"Additional defaults per initial default (beta=" + beta + ")", "initially defaulting bank",
                                "additional defaults"},
                               defaults));
        out.text("abm/defaulted_capital_beta_" + beta + ".svg",
                 scatter_chart({"Defaulted capital share (beta=" + beta + ")", "initially defaulting bank",
                                "fraction of system capital"},
                               capital));
    }
}

int run(const std::string& command, const Flags& flags) {
    Scenario sc = build_scenario(flags);

    if (command == "validate") {
        Network net = open_network(sc, false);
        std::cout << "nodes " << mlnet_network_size(net.get()) << '\n';
        for (const auto& layer : layer_names(net)) {
            int directed = 0;
            std::size_t edges = 0;
            double total = 0.0;
            check(mlnet_network_layer_info(net.get(), layer.c_str(), &directed, &edges, &total));
            std::cout << "layer " << layer << (directed ? " directed" : " undirected") << " edges " << edges
                      << " total_weight " << format_number(total) << '\n';
        }
        std::cout << "holdings " << (mlnet_network_has_holdings(net.get()) ? "yes" : "no") << '\n';
        return kOk;
    }

    if (command == "generate") {
        Network net = open_network(sc, true);
        OutputDir out(sc.out);
        check(mlnet_network_write(net.get(), sc.out.c_str()));
        std::vector<std::string> written;
        for (const auto& entry : fs::directory_iterator(sc.out)) {
            const auto name = entry.path().filename().string();
            if (name != "outputs.json") written.push_back(name);
        }
        out.record_files(written);
        out.finish(command, {});
        return kOk;
    }

    std::vector<std::string> analyses;
    if (command == "report") {
        const auto chosen = sc.analyses.empty() ? std::set<std::string>(kAnalyses.begin(), kAnalyses.end()) : sc.analyses;
        for (const auto& a : kAnalyses)
            if (chosen.count(a)) analyses.push_back(a);
    } else {
        analyses.push_back(command);
    }

    Network net = open_network(sc, false);
    OutputDir out(sc.out);
    for (const auto& a : analyses) {
        if (a == "topology") run_topology(sc, net, out);
        else if (a == "debtrank") run_debtrank(sc, net, out);
        else if (a == "superpose") run_superpose(sc, net, out);
        else if (a == "abm") run_abm(sc, net, out);
    }
    out.finish(command, analyses);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilayer interbank network analytics: topology, DebtRank and cascade simulation"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    Flags flags;
    app.add_option("--config", flags.config, "Scenario file (key = value lines)")->check(CLI::ExistingFile);
    app.add_option("--bundle", flags.bundle, "Network bundle manifest.json");
    app.add_option("--out", flags.out, "Output directory");
    app.add_option("--threads", flags.threads, "Maximum worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", flags.seed, "Seed of the synthetic generator");
    app.add_option("--beta", flags.beta, "Comma-separated liquidity buffer scalers");
    app.add_option("--gamma-bar", flags.gamma_bar, "Minimum capital ratio");
    app.add_option("--price-mode", flags.price_mode, "Price impact denominator")
        ->check(CLI::IsMember({"static", "dynamic"}));
    app.add_option("--debtrank-mode", flags.debtrank_mode, "Propagation threshold")
        ->check(CLI::IsMember({"any-distress", "full-default"}));
    app.add_flag("--strict-paper-formulas", flags.strict, "Use each balance-sheet formula as typeset");

    auto* validate = app.add_subcommand("validate", "Load a bundle and print a summary");
    validate->add_option("manifest", flags.manifest, "Bundle manifest.json");
    app.add_subcommand("generate", "Write a synthetic network bundle");
    app.add_subcommand("topology", "Degrees, centralities and their densities per layer");
    app.add_subcommand("debtrank", "DebtRank sweeps (credit and liquidity calibrations)");
    app.add_subcommand("superpose", "Aggregated versus layer-by-layer DebtRank");
    app.add_subcommand("abm", "Cascade simulation for every seed and beta");
    app.add_subcommand("report", "Run every analysis listed in the config");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        return run(app.get_subcommands().front()->get_name(), flags);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
