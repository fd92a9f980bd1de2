#ifndef TEMPOPFN_H
#define TEMPOPFN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    TEMPO_OK = 0,
    TEMPO_ERR_INVALID_ARGUMENT = 1,
    TEMPO_ERR_IO = 2,
    TEMPO_ERR_RUNTIME = 3,
} tempo_status;

/* Message for the most recent failure on this thread. */
const char* tempo_last_error(void);

typedef struct tempo_dataset tempo_dataset;
typedef struct tempo_model tempo_model;

/* ---- datasets ------------------------------------------------------ */

/* config_json: the "generation" section of the run config (may be "{}").
 * count is the number of generator draws; multichannel generators append
 * one series per channel. Output is independent of workers. */
tempo_status tempo_generate(const char* config_json, uint64_t seed,
                            uint64_t count, int workers, tempo_dataset** out);

tempo_status tempo_dataset_read(const char* path, tempo_dataset** out);
/* format: "jsonl" or "bin" */
tempo_status tempo_dataset_write(const tempo_dataset* ds, const char* path,
                                 const char* format);
tempo_status tempo_dataset_size(const tempo_dataset* ds, uint64_t* out);
/* Summary statistics as a JSON string; free with tempo_string_free. */
tempo_status tempo_dataset_summary(const tempo_dataset* ds, char** json_out);

/* config_json: the "augmentation" section of the run config. One augmented
 * series is emitted per input series, drawing mixup partners from the whole
 * input. */
tempo_status tempo_augment(const tempo_dataset* in, const char* config_json,
                           uint64_t seed, tempo_dataset** out);

void tempo_dataset_free(tempo_dataset* ds);
void tempo_string_free(char* s);

/* ---- model --------------------------------------------------------- */

/* config_json: the "model" section of the run config (may be "{}"). */
tempo_status tempo_model_create(const char* config_json, uint64_t seed,
                                tempo_model** out);
tempo_status tempo_model_load(const char* path, tempo_model** out);
tempo_status tempo_model_save(const tempo_model* m, const char* path);
tempo_status tempo_model_param_count(const tempo_model* m, uint64_t* out);
void tempo_model_free(tempo_model* m);

/* ---- training ------------------------------------------------------ */

/* config_json: full run config; the "training" and "generation" (source
 * pool) and "augmentation" sections are consulted. Writes the loss CSV and
 * checkpoints when the paths are non-NULL. */
tempo_status tempo_train(tempo_model* m, const char* config_json,
                         const char* loss_csv_path,
                         const char* checkpoint_path,
                         const char* optimizer_path);

/* ---- forecasting and evaluation ------------------------------------ */

/* Splits the last `horizon` values of every series off as the target and
 * forecasts them; predictions written as JSON lines. */
tempo_status tempo_forecast(const tempo_model* m, const tempo_dataset* ds,
                            uint64_t horizon, const char* out_jsonl);

/* Evaluates the model (or, with m == NULL, the seasonal-naive baseline)
 * on tasks split from the dataset. Either CSV path may be NULL. */
tempo_status tempo_evaluate(const tempo_model* m, const tempo_dataset* ds,
                            uint64_t horizon, const char* report_csv,
                            const char* normalized_csv);

tempo_status tempo_nan_sweep(const tempo_model* m, const tempo_dataset* ds,
                             uint64_t horizon, const double* fractions,
                             uint64_t n_fractions, uint64_t seed,
                             const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* TEMPOPFN_H */
