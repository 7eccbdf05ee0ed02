#ifndef RECFACT_H
#define RECFACT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define RF_API __declspec(dllexport)
#else
#define RF_API __attribute__((visibility("default")))
#endif

typedef enum rf_status {
    RF_OK = 0,
    RF_ERR_ARGUMENT = 1,   /* bad flag, config key or value */
    RF_ERR_DATA = 2,       /* malformed input, unknown id, shape or format mismatch */
    RF_ERR_DIVERGENCE = 3, /* training produced non-finite values */
    RF_ERR_IO = 4,
    RF_ERR_INTERNAL = 5
} rf_status;

typedef struct rf_config rf_config;
typedef struct rf_dataset rf_dataset;
typedef struct rf_model rf_model;
typedef struct rf_ranking rf_ranking;
typedef struct rf_report rf_report;

typedef void (*rf_epoch_fn)(size_t epoch, double loss, void* userdata);

/* Message for the last failing call on this thread; "" after success. */
RF_API const char* rf_last_error(void);

RF_API rf_status rf_config_new(rf_config** out);
RF_API rf_status rf_config_set(rf_config* cfg, const char* key, const char* value);
RF_API rf_status rf_config_load(rf_config* cfg, const char* path);
RF_API void rf_config_free(rf_config* cfg);

/* Parsed with the config's kind, scale, header and duplicates settings. */
RF_API rf_status rf_dataset_load_csv(const char* path, const rf_config* cfg, rf_dataset** out);
RF_API rf_status rf_dataset_split(const rf_dataset* ds, double holdout_fraction, uint64_t seed, rf_dataset** train,
                                  rf_dataset** test, size_t* warnings);
RF_API rf_status rf_dataset_write_csv(const rf_dataset* ds, const char* path);
RF_API size_t rf_dataset_size(const rf_dataset* ds);
RF_API size_t rf_dataset_num_users(const rf_dataset* ds);
RF_API size_t rf_dataset_num_items(const rf_dataset* ds);
RF_API void rf_dataset_free(rf_dataset* ds);

RF_API rf_status rf_train(const rf_dataset* ds, const rf_config* cfg, rf_epoch_fn on_epoch, void* userdata,
                          rf_model** out);

RF_API rf_status rf_model_load(const char* path, rf_model** out);
RF_API rf_status rf_model_save(const rf_model* model, const char* path);
RF_API void rf_model_free(rf_model* model);
RF_API const char* rf_model_algorithm(const rf_model* model);

/* Ids are the tokens from the training CSV. */
RF_API rf_status rf_model_predict(const rf_model* model, const char* user, const char* item, double* out);
/* Nearest integer (half away from zero) clamped to the model's rating scale. */
RF_API rf_status rf_model_round(const rf_model* model, double value, int* out);
RF_API rf_status rf_model_recommend(const rf_model* model, const char* user, size_t k, rf_ranking** out);

RF_API size_t rf_ranking_size(const rf_ranking* r);
RF_API const char* rf_ranking_item(const rf_ranking* r, size_t index);
RF_API double rf_ranking_score(const rf_ranking* r, size_t index);
RF_API void rf_ranking_free(rf_ranking* r);

/* Test pairs naming ids unknown to the model are skipped and counted. */
RF_API rf_status rf_model_evaluate(const rf_model* model, const rf_dataset* test, const size_t* ks, size_t num_ks,
                                   rf_report** out);
RF_API double rf_report_rmse(const rf_report* r);
RF_API double rf_report_mae(const rf_report* r);
RF_API size_t rf_report_pairs(const rf_report* r);
RF_API size_t rf_report_skipped(const rf_report* r);
RF_API size_t rf_report_num_topn(const rf_report* r);
RF_API rf_status rf_report_topn(const rf_report* r, size_t index, size_t* k, double* precision, double* recall);
RF_API const char* rf_report_table(const rf_report* r);
RF_API const char* rf_report_json(const rf_report* r);
RF_API void rf_report_free(rf_report* r);

/* Members must share user and item id maps (RF_ERR_DATA otherwise). */
RF_API rf_status rf_ensemble_blend(const rf_model* const* members, const double* weights, size_t count,
                                   rf_model** out);
RF_API rf_status rf_ensemble_vote(const rf_model* const* members, size_t count, rf_model** out);
RF_API rf_status rf_ensemble_bag(const rf_dataset* ds, const rf_config* cfg, size_t members, uint64_t seed,
                                 rf_epoch_fn on_epoch, void* userdata, rf_model** out);
RF_API rf_status rf_ensemble_stack(const rf_model* const* members, size_t count, const rf_dataset* holdout,
                                   rf_model** out);

#ifdef __cplusplus
}
#endif

#endif
