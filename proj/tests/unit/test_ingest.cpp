#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "../support/check.hpp"
#include "mlnet/ingest.hpp"

using namespace mlnet;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("mlnet_ingest_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void put(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string sheet_header() {
    std::string h = "node_id";
    for (const auto& c : BalanceSheets::column_names()) h += "," + c;
    return h + "\n";
}

std::string sheet_row(const std::string& id, double eq) {
    std::ostringstream os;
    os << id << ',' << eq;
    for (std::size_t k = 1; k < BalanceSheets::column_names().size(); ++k) os << ",1";
    return os.str() + "\n";
}

// Two-node bundle with one ltc edge and a holdings table.
fs::path small_bundle(const std::string& name) {
    const fs::path dir = scratch(name);
    put(dir / "nodes.csv", "node_id,country\nA,DE\nB,FR\n");
    put(dir / "bs.csv", sheet_header() + sheet_row("A", 10) + sheet_row("B", 20));
    put(dir / "ltc.csv", "src,dst,weight_eur\nA,B,5\nA,B,2.5\n");
    put(dir / "holdings.csv", "node_id,issuer_id,quantity\nA,X,5\nB,X,3\n");
    put(dir / "prices.csv", "issuer_id,price_eur\nX,100\n");
    put(dir / "manifest.json", R"({"format_version": "1", "nodes": "nodes.csv",
        "balance_sheets": "bs.csv", "layers": {"ltc": "ltc.csv"},
        "holdings": "holdings.csv", "prices": "prices.csv"})");
    return dir;
}

}  // namespace

TEST_CASE("bundle loads with aggregation and projected ext") {
    const auto dir = small_bundle("load");
    auto net = load_network(dir / "manifest.json");
    CHECK(net.size() == 2);
    CHECK(net.nodes()->label(1) == "FR-1");
    CHECK(net.layer("ltc")(0, 1) == 7.5);
    CHECK(net.layer("ext")(0, 1) == 300.0);
    CHECK(net.balance_sheets().eq == std::vector<double>{10, 20});
}

TEST_CASE("manifest errors") {
    const auto dir = small_bundle("manifest");
    CHECK_CODE(read_manifest(dir / "missing.json"), ErrorCode::IoError);
    put(dir / "bad.json", "{ not json");
    CHECK_CODE(read_manifest(dir / "bad.json"), ErrorCode::ParseError);
    put(dir / "v2.json", R"({"format_version": "2", "nodes": "nodes.csv", "balance_sheets": "bs.csv"})");
    CHECK_CODE(read_manifest(dir / "v2.json"), ErrorCode::ParseError);
    put(dir / "half.json", R"({"format_version": "1", "nodes": "nodes.csv", "balance_sheets": "bs.csv",
        "holdings": "holdings.csv"})");
    CHECK_CODE(read_manifest(dir / "half.json"), ErrorCode::ParseError);
    put(dir / "both.json", R"({"format_version": "1", "nodes": "nodes.csv", "balance_sheets": "bs.csv",
        "layers": {"ext": "ltc.csv"}, "holdings": "holdings.csv", "prices": "prices.csv"})");
    CHECK_CODE(load_network(dir / "both.json"), ErrorCode::BothExtSourcesProvided);
    put(dir / "gone.json", R"({"format_version": "1", "nodes": "nodes.csv", "balance_sheets": "bs.csv",
        "layers": {"ltc": "nope.csv"}})");
    CHECK_CODE(load_network(dir / "gone.json"), ErrorCode::IoError);
}

TEST_CASE("csv content errors") {
    SUBCASE("unknown node in a layer") {
        const auto dir = small_bundle("unknown");
        put(dir / "ltc.csv", "src,dst,weight_eur\nA,Q,5\n");
        CHECK_CODE(load_network(dir / "manifest.json"), ErrorCode::UnknownNode);
    }
    SUBCASE("duplicate node") {
        const auto dir = small_bundle("dup");
        put(dir / "nodes.csv", "node_id,country\nA,DE\nA,FR\n");
        CHECK_CODE(load_network(dir / "manifest.json"), ErrorCode::DuplicateNode);
    }
    SUBCASE("missing balance-sheet row") {
        const auto dir = small_bundle("missing_row");
        put(dir / "bs.csv", sheet_header() + sheet_row("A", 10));
        CHECK_CODE(load_network(dir / "manifest.json"), ErrorCode::ParseError);
    }
    SUBCASE("negative weight") {
        const auto dir = small_bundle("neg");
        put(dir / "ltc.csv", "src,dst,weight_eur\nA,B,-5\n");
        CHECK_CODE(load_network(dir / "manifest.json"), ErrorCode::NegativeWeight);
    }
    SUBCASE("non-positive price") {
        const auto dir = small_bundle("price");
        put(dir / "prices.csv", "issuer_id,price_eur\nX,0\n");
        CHECK_CODE(load_network(dir / "manifest.json"), ErrorCode::NonPositivePrice);
    }
    SUBCASE("malformed number") {
        const auto dir = small_bundle("number");
        put(dir / "ltc.csv", "src,dst,weight_eur\nA,B,five\n");
        CHECK_CODE(load_network(dir / "manifest.json"), ErrorCode::ParseError);
    }
    SUBCASE("wrong header") {
        const auto dir = small_bundle("header");
        put(dir / "ltc.csv", "from,to,w\nA,B,5\n");
        CHECK_CODE(load_network(dir / "manifest.json"), ErrorCode::ParseError);
    }
}

TEST_CASE("write then load is bit-identical") {
    SyntheticConfig cfg;
    cfg.n = 25;
    cfg.m = 60;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        cfg.seed = seed;
        const auto net = generate_synthetic(cfg);
        const auto dir = scratch("roundtrip" + std::to_string(seed));
        write_network(net, dir / "a");
        const auto back = load_network(dir / "a" / "manifest.json");
        CHECK(*back.nodes() == *net.nodes());
        CHECK(back.layer_names() == net.layer_names());
        for (const auto& [name, layer] : net.layers()) {
            CHECK(back.layer(name).weights() == layer.weights());
            CHECK(back.layer(name).directed() == layer.directed());
        }
        CHECK(back.balance_sheets() == net.balance_sheets());
        REQUIRE(back.holdings().has_value());
        CHECK(back.holdings()->quantities == net.holdings()->quantities);
        CHECK(back.holdings()->prices == net.holdings()->prices);
        CHECK(back.holdings()->issuer_ids == net.holdings()->issuer_ids);

        write_network(back, dir / "b");
        for (const auto& entry : fs::directory_iterator(dir / "a"))
            CHECK(slurp(entry.path()) == slurp(dir / "b" / entry.path().filename()));
    }
}

TEST_CASE("non-integer weights survive the round trip") {
    auto ns = std::make_shared<const NodeSet>(std::vector<std::string>{"A", "B", "C"});
    MultiLayerNetwork net(ns);
    Matrix w(3, 3);
    w(0, 1) = 0.1;
    w(1, 2) = 1.0 / 3.0;
    w(2, 0) = 1e-300;
    net.add_layer(ExposureMatrix("ltc", ns, w, true));
    const auto dir = scratch("fractions");
    write_network(net, dir);
    CHECK(load_network(dir / "manifest.json").layer("ltc").weights() == w);
}

TEST_CASE("generator is deterministic and consistent") {
    SyntheticConfig cfg;
    cfg.n = 40;
    cfg.m = 80;
    cfg.seed = 9;
    const auto a = generate_synthetic(cfg);
    const auto b = generate_synthetic(cfg);
    for (const auto& [name, layer] : a.layers()) CHECK(b.layer(name).weights() == layer.weights());
    CHECK(a.balance_sheets() == b.balance_sheets());
    CHECK(a.layer_names() == std::vector<std::string>{"cs", "ext", "ltc", "stc", "stf"});

    const auto& bs = a.balance_sheets();
    const auto& ltc = a.layer("ltc");
    for (std::size_t i = 0; i < a.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) row += ltc(i, j);
        CHECK(bs.loans_lt[i] == row);
        CHECK(bs.eq[i] > 0.0);
    }
    for (double x : a.layer("stc").weights().values()) CHECK(x == std::round(x));

    cfg.seed = 10;
    const auto c = generate_synthetic(cfg);
    CHECK_FALSE(c.layer("ltc").weights() == a.layer("ltc").weights());
}

TEST_CASE("generator config validation") {
    SyntheticConfig cfg;
    cfg.n = 1;
    CHECK_CODE(generate_synthetic(cfg), ErrorCode::InvalidConfig);
    cfg = SyntheticConfig{};
    cfg.core_fraction = 1.0;
    CHECK_CODE(cfg.validate(), ErrorCode::InvalidConfig);
    cfg = SyntheticConfig{};
    cfg.layers[0].density.core_core = 1.5;
    CHECK_CODE(cfg.validate(), ErrorCode::InvalidConfig);
    cfg = SyntheticConfig{};
    cfg.layers[1].name = cfg.layers[0].name;
    CHECK_CODE(cfg.validate(), ErrorCode::InvalidConfig);
    cfg = SyntheticConfig{};
    cfg.cash_ratio_min = 0.5;
    cfg.cash_ratio_max = 0.4;
    CHECK_CODE(cfg.validate(), ErrorCode::InvalidConfig);
}
