/* C interface to the multilayer interbank network library.
 *
 * Every function returning mlnet_status reports failures through the status
 * code; mlnet_last_error() then holds a message for the calling thread.
 * Handles are opaque and owned by the caller, who releases them with the
 * matching *_free function. Strings returned through const char** stay valid
 * until the owning handle is freed. */
#ifndef MLNET_H
#define MLNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(MLNET_BUILDING)
#define MLNET_API __attribute__((visibility("default")))
#else
#define MLNET_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mlnet_status {
    MLNET_OK = 0,
    MLNET_INVALID_ARGUMENT = 1,
    MLNET_UNKNOWN_NODE,
    MLNET_DUPLICATE_NODE,
    MLNET_NEGATIVE_WEIGHT,
    MLNET_NON_FINITE_WEIGHT,
    MLNET_NON_POSITIVE_PRICE,
    MLNET_ALREADY_DIRECTED,
    MLNET_NODE_SET_MISMATCH,
    MLNET_MISSING_LAYER,
    MLNET_DUPLICATE_LAYER,
    MLNET_PARSE_ERROR,
    MLNET_BOTH_EXT_SOURCES,
    MLNET_IO_ERROR,
    MLNET_INVALID_CONFIG,
    MLNET_INVALID_DAMPING,
    MLNET_DEGENERATE_SAMPLE,
    MLNET_LENGTH_MISMATCH,
    MLNET_BETA_OUT_OF_RANGE,
    MLNET_EMPTY_LAYER,
    MLNET_UNKNOWN_SEED,
    MLNET_NO_CONVERGENCE,
    MLNET_CONFIG_ERROR,
    MLNET_INTERNAL_ERROR = 100
} mlnet_status;

typedef struct mlnet_network mlnet_network;
typedef struct mlnet_table mlnet_table;
typedef struct mlnet_abm_params mlnet_abm_params;

MLNET_API const char* mlnet_last_error(void);
MLNET_API const char* mlnet_status_name(mlnet_status status);

/* Networks */

/* Loads a bundle from its manifest.json. */
MLNET_API mlnet_status mlnet_network_load(const char* manifest_path, mlnet_network** out);
/* Synthetic core/periphery network; settings is "key = value" text or NULL
 * for the defaults. */
MLNET_API mlnet_status mlnet_network_generate(const char* settings, mlnet_network** out);
/* Writes the canonical CSV bundle and manifest.json into dir. */
MLNET_API mlnet_status mlnet_network_write(const mlnet_network* net, const char* dir);
MLNET_API void mlnet_network_free(mlnet_network* net);

MLNET_API size_t mlnet_network_size(const mlnet_network* net);
MLNET_API mlnet_status mlnet_network_node_id(const mlnet_network* net, size_t i, const char** out);
MLNET_API size_t mlnet_network_layer_count(const mlnet_network* net);
MLNET_API mlnet_status mlnet_network_layer_name(const mlnet_network* net, size_t k, const char** out);
/* Layer "flat" is the flattening of all layers and is always available. */
MLNET_API mlnet_status mlnet_network_layer_info(const mlnet_network* net, const char* layer,
                                                int* directed, size_t* edges, double* total_weight);
MLNET_API int mlnet_network_has_holdings(const mlnet_network* net);

/* Tables: rows of text/number cells with named columns. */

MLNET_API size_t mlnet_table_rows(const mlnet_table* t);
MLNET_API size_t mlnet_table_cols(const mlnet_table* t);
MLNET_API mlnet_status mlnet_table_column(const mlnet_table* t, size_t c, const char** out);
/* Cell as written to CSV. */
MLNET_API mlnet_status mlnet_table_text(const mlnet_table* t, size_t r, size_t c, const char** out);
/* Numeric cell value; NaN for text and empty cells. */
MLNET_API mlnet_status mlnet_table_number(const mlnet_table* t, size_t r, size_t c, double* out);
MLNET_API mlnet_status mlnet_table_write_csv(const mlnet_table* t, const char* path);
MLNET_API void mlnet_table_free(mlnet_table* t);

/* node_id,label,country,total_assets,equity */
MLNET_API mlnet_status mlnet_node_table(const mlnet_network* net, mlnet_table** out);

/* Topology */

/* node_id,layer,in_degree,out_degree */
MLNET_API mlnet_status mlnet_degree_table(const mlnet_network* net, const char* layer, mlnet_table** out);
/* node_id,layer,pagerank,betweenness,closeness. distance is "inverse-weight"
 * or "unweighted". */
MLNET_API mlnet_status mlnet_centrality_table(const mlnet_network* net, const char* layer,
                                              double damping, const char* distance,
                                              mlnet_table** out);
/* x,density for a Gaussian KDE with Scott's bandwidth. */
MLNET_API mlnet_status mlnet_kde_table(const double* samples, size_t count, size_t grid_points,
                                       double* bandwidth, mlnet_table** out);

/* DebtRank. calibration is "credit" or "liquidity"; mode is "any-distress"
 * or "full-default". */

/* node_id,layer,beta,mode,dr (beta empty for credit) */
MLNET_API mlnet_status mlnet_debtrank_table(const mlnet_network* net, const char* calibration,
                                            const double* betas, size_t beta_count,
                                            const char* mode, unsigned threads,
                                            mlnet_table** out);
/* node_id,dr_aggregated,dr_linear_sum,avg_rank. beta is ignored for credit. */
MLNET_API mlnet_status mlnet_superposition_table(const mlnet_network* net, const char* layer_a,
                                                 const char* layer_b, const char* calibration,
                                                 double beta, const char* mode, unsigned threads,
                                                 mlnet_table** out);

/* Agent-based cascade */

MLNET_API mlnet_status mlnet_abm_params_new(mlnet_abm_params** out);
/* Keys: w_b, beta, gamma_bar, c_te, price_mode, fp_tol, fp_max_iter,
 * strict_paper_formulas, alpha, w_s. */
MLNET_API mlnet_status mlnet_abm_params_set(mlnet_abm_params* p, const char* key, const char* value);
MLNET_API void mlnet_abm_params_free(mlnet_abm_params* p);

/* results: seed_node,beta,additional_defaults,defaulted_capital_fraction,cycles
 * cycles:  seed_node,beta,cycle,new_defaults,total_defaults,distressed,
 *          price_index,sold_eur,defaulted_capital_fraction
 * Either output pointer may be NULL. */
MLNET_API mlnet_status mlnet_abm_sweep(const mlnet_network* net, const mlnet_abm_params* params,
                                       const double* betas, size_t beta_count, unsigned threads,
                                       mlnet_table** results, mlnet_table** cycles);

#ifdef __cplusplus
}
#endif

#endif
