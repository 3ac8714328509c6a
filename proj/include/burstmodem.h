/* burstmodem — burst-mode turbo-coded offset-QPSK modem simulator.
 *
 * C API of the shared library. All functions return BM_OK (0) on success or
 * one of the BM_ERR_* codes; bm_last_error() describes the most recent
 * failure on the calling thread. Handles are opaque and must be released
 * with their matching free function.
 */
#ifndef BURSTMODEM_H
#define BURSTMODEM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#define BM_OK 0
#define BM_ERR_CONFIG 2
#define BM_ERR_NUMERIC 3
#define BM_ERR_IO 4
#define BM_ERR_INVALID 5

/* run_frame flags */
#define BM_FRAME_GENIE 1u     /* perfect-sync baseline receiver */
#define BM_FRAME_ACQ_ONLY 2u  /* stop after acquisition */
#define BM_FRAME_IDEAL_TIMING 4u /* force delta = 0, alpha = 0 */

typedef struct bm_config bm_config;

typedef struct bm_frame_report {
    /* ground truth (transmit side) */
    double t0_true;      /* first-symbol instant at the MF output, Ts1' units */
    double omega3_true;
    double theta0_true;
    double alpha_true;
    /* acquisition */
    long long n1, n2, n3;
    double omega3_hat;   /* coarse estimate */
    double omega_pass2;  /* second differential estimate */
    double omegaf_hat;   /* ML fine estimate (residual) */
    double theta0_hat;
    double a_hat;
    double sigma2_hat;
    double ratio;        /* detection ratio R_i */
    int detected;
    int acq_failed;
    /* tracking / decoding */
    int truncated;
    int timing_shifts;
    long long payload_bits;
    long long bit_errors;
    long long predecoder_symbol_errors;
    long long predecoder_symbols;
    int frame_error;
} bm_frame_report;

/* Configuration ---------------------------------------------------------- */
bm_config* bm_config_create(void);
void bm_config_free(bm_config* cfg);
int bm_config_load_file(bm_config* cfg, const char* path);
int bm_config_set(bm_config* cfg, const char* key, const char* value);
int bm_config_get(const bm_config* cfg, const char* key, char* out, size_t out_size);
int bm_config_validate(const bm_config* cfg);
/* Writes the known keys, one per call slot; returns the number of keys.
 * Pass NULL to query the count. */
int bm_config_keys(const char** out, int capacity);

/* Execution -------------------------------------------------------------- */
int bm_run_frame(const bm_config* cfg, unsigned long long frame_index, unsigned flags,
                 bm_frame_report* out);

/* kind: "ber_sweep" | "estimator_stats" | "frame_detect" | "codec_test".
 * snr_db: Eb/N0 points in dB. CSV is written to out_csv_path ("-" = stdout).
 * dump_dir: when non-NULL, passband frames land there as frame_<idx>.f32. */
int bm_run_experiment(const bm_config* cfg, const char* kind, const double* snr_db, int n_snr,
                      unsigned long long frames, int threads, const char* out_csv_path,
                      const char* dump_dir);

/* Per-symbol tracking trace CSV for one frame. */
int bm_write_frame_trace(const bm_config* cfg, unsigned long long frame_index,
                         const char* csv_path);

const char* bm_last_error(void);
unsigned bm_abi_version(void);

#ifdef __cplusplus
}
#endif

#endif /* BURSTMODEM_H */
