#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "mlnet/netcore.hpp"

namespace mlnet {

inline constexpr const char* kBundleFormatVersion = "1";

/// On-disk description of a network bundle (manifest.json). Paths are
/// relative to the manifest's directory unless absolute.
struct LayerFile {
    std::filesystem::path file;
    bool directed = true;
};

struct NetworkBundle {
    std::filesystem::path root;
    std::string format_version = kBundleFormatVersion;
    std::filesystem::path nodes;
    std::filesystem::path balance_sheets;
    std::map<std::string, LayerFile> layers;
    std::optional<std::filesystem::path> holdings;
    std::optional<std::filesystem::path> prices;

    std::filesystem::path resolve(const std::filesystem::path& p) const {
        return p.is_absolute() ? p : root / p;
    }
};

/// Reads manifest.json; throws ParseError or IoError.
NetworkBundle read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const NetworkBundle& bundle, const std::filesystem::path& manifest_path);

MultiLayerNetwork load_network(const NetworkBundle& bundle);
MultiLayerNetwork load_network(const std::filesystem::path& manifest_path);

/// Writes the canonical CSV bundle plus manifest.json into dir. Output is a
/// pure function of the network: rows are in node order (src, then dst) and
/// numbers use the shortest round-trip representation.
NetworkBundle write_network(const MultiLayerNetwork& net, const std::filesystem::path& dir);

struct LayerDensity {
    double core_core = 0.0;
    double core_periphery = 0.0;
    double periphery_periphery = 0.0;
};

struct LognormalWeights {
    double mu = 0.0;
    double sigma = 1.0;
};

struct SyntheticLayerSpec {
    std::string name;
    LayerDensity density;
    LognormalWeights weights;
};

/// Parameters of the two-block core/periphery generator. Defaults are
/// illustrative, not calibrated to any real banking system.
struct SyntheticConfig {
    std::size_t n = 114;
    double core_fraction = 0.2;
    std::vector<SyntheticLayerSpec> layers = default_layers();
    std::size_t m = 500;
    double holdings_density = 0.08;
    /// Holding probability multiplier for core banks.
    double core_holdings_boost = 3.0;
    LognormalWeights quantity{std::log(2.0e4), 1.2};
    LognormalWeights price{std::log(100.0), 0.5};
    /// Equity as a fraction of generated total assets.
    double equity_scale = 0.12;
    double deposit_share = 0.5;
    /// Per-bank cash is drawn uniformly in this range, as a multiple of
    /// short-term liabilities plus deposits.
    double cash_ratio_min = 0.22;
    double cash_ratio_max = 0.40;
    double other_assets_mult = 1.5;
    std::uint64_t seed = 1;

    static std::vector<SyntheticLayerSpec> default_layers();
    /// Throws InvalidConfig naming the offending field.
    void validate() const;
};

/// Generated networks carry ltc, stc, cs and stf layers, a holdings table
/// (hence the projected ext layer) and consistent balance sheets. Weights,
/// quantities and prices are whole euros/units so that every aggregate is
/// exact in double precision.
MultiLayerNetwork generate_synthetic(const SyntheticConfig& cfg);

}  // namespace mlnet
