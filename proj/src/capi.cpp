#include "recfact/recfact.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "recfact/ensemble.hpp"
#include "recfact/error.hpp"
#include "recfact/eval.hpp"
#include "recfact/model_file.hpp"
#include "recfact/run_config.hpp"

using namespace recfact;

struct rf_config {
    RunConfig cfg;
};
struct rf_dataset {
    RatingDataset ds;
};
struct rf_model {
    PredictorPtr model;
};
struct rf_ranking {
    std::vector<std::string> items;
    std::vector<double> scores;
};
struct rf_report {
    MetricReport report;
    std::string table;
    std::string json;
};

namespace {

thread_local std::string last_error;

rf_status status_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::kArgument:
        return RF_ERR_ARGUMENT;
    case ErrorCode::kDivergence:
    case ErrorCode::kGradient:
        return RF_ERR_DIVERGENCE;
    case ErrorCode::kIo:
        return RF_ERR_IO;
    default:
        return RF_ERR_DATA;
    }
}

template <class F>
rf_status guarded(F&& f)
{
    try {
        f();
        last_error.clear();
        return RF_OK;
    } catch (const Error& e) {
        last_error = e.what();
        return status_for(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
        return RF_ERR_INTERNAL;
    } catch (const std::exception& e) {
        last_error = e.what();
        return RF_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what)
{
    require(p != nullptr, ErrorCode::kArgument, std::string(what) + " must not be null");
}

std::size_t user_index(const Predictor& m, const char* user)
{
    need(user, "user");
    const auto u = m.catalog().users.find(user);
    require(u.has_value(), ErrorCode::kUnknownId, std::string("unknown user id '") + user + "'");
    return *u;
}

std::size_t item_index(const Predictor& m, const char* item)
{
    need(item, "item");
    const auto i = m.catalog().items.find(item);
    require(i.has_value(), ErrorCode::kUnknownId, std::string("unknown item id '") + item + "'");
    return *i;
}

std::vector<PredictorPtr> member_list(const rf_model* const* members, std::size_t count)
{
    need(members, "members");
    std::vector<PredictorPtr> out;
    for (std::size_t m = 0; m < count; ++m) {
        need(members[m], "member model");
        out.push_back(members[m]->model);
    }
    return out;
}

EpochCallback epoch_adapter(rf_epoch_fn fn, void* userdata)
{
    if (!fn)
        return {};
    return [fn, userdata](std::size_t epoch, double loss) { fn(epoch, loss, userdata); };
}

std::string fixed(double x, int digits = 6)
{
    if (!std::isfinite(x))
        return "n/a";
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << x;
    return s.str();
}

void render(rf_report& r)
{
    const MetricReport& m = r.report;
    std::vector<std::pair<std::string, std::string>> rows = {
        {"rmse", fixed(m.rmse)},
        {"mae", fixed(m.mae)},
        {"pairs", std::to_string(m.pairs)},
        {"skipped", std::to_string(m.skipped)},
    };
    nlohmann::json topn = nlohmann::json::array();
    for (const TopNResult& t : m.topn) {
        const std::string k = std::to_string(t.k);
        rows.emplace_back("precision@" + k, t.users ? fixed(t.precision) : "n/a");
        rows.emplace_back("recall@" + k, t.users ? fixed(t.recall) : "n/a");
        nlohmann::json row = {{"k", t.k}, {"users", t.users}};
        row["precision"] = t.users ? nlohmann::json(t.precision) : nlohmann::json(nullptr);
        row["recall"] = t.users ? nlohmann::json(t.recall) : nlohmann::json(nullptr);
        topn.push_back(row);
    }
    std::size_t width = 6;
    for (const auto& [name, value] : rows)
        width = std::max(width, name.size());
    std::ostringstream table;
    table << std::left << std::setw(static_cast<int>(width)) << "metric" << "  value\n";
    for (const auto& [name, value] : rows)
        table << std::left << std::setw(static_cast<int>(width)) << name << "  " << value << "\n";
    r.table = table.str();
    r.json = nlohmann::json{{"rmse", m.rmse}, {"mae", m.mae}, {"pairs", m.pairs}, {"skipped", m.skipped}, {"topn", topn}}
                 .dump();
}

bool is_positive(const Catalog& c, double value)
{
    if (c.kind == FeedbackKind::kImplicit)
        return value > 0.0;
    return value >= c.scale.lo + 0.75 * (c.scale.hi - c.scale.lo);
}

} // namespace

extern "C" {

const char* rf_last_error(void) { return last_error.c_str(); }

rf_status rf_config_new(rf_config** out)
{
    return guarded([&] {
        need(out, "out");
        *out = new rf_config{};
    });
}

rf_status rf_config_set(rf_config* cfg, const char* key, const char* value)
{
    return guarded([&] {
        need(cfg, "config");
        need(key, "key");
        need(value, "value");
        cfg->cfg.set(key, value);
    });
}

rf_status rf_config_load(rf_config* cfg, const char* path)
{
    return guarded([&] {
        need(cfg, "config");
        need(path, "path");
        cfg->cfg.load_file(path);
    });
}

void rf_config_free(rf_config* cfg) { delete cfg; }

rf_status rf_dataset_load_csv(const char* path, const rf_config* cfg, rf_dataset** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        std::ifstream in(path, std::ios::binary);
        require(in.good(), ErrorCode::kIo, std::string("cannot open '") + path + "'");
        const CsvSchema schema = cfg ? cfg->cfg.schema() : CsvSchema{};
        try {
            *out = new rf_dataset{parse_csv(in, schema)};
        } catch (const Error& e) {
            fail(e.code(), std::string(path) + ": " + e.what());
        }
    });
}

rf_status rf_dataset_split(const rf_dataset* ds, double holdout_fraction, uint64_t seed, rf_dataset** train,
                           rf_dataset** test, size_t* warnings)
{
    return guarded([&] {
        need(ds, "dataset");
        need(train, "train");
        need(test, "test");
        SplitResult s = split(ds->ds, holdout_fraction, seed);
        auto a = std::make_unique<rf_dataset>(rf_dataset{std::move(s.train)});
        auto b = std::make_unique<rf_dataset>(rf_dataset{std::move(s.test)});
        if (warnings)
            *warnings = s.stratification_warnings;
        *train = a.release();
        *test = b.release();
    });
}

rf_status rf_dataset_write_csv(const rf_dataset* ds, const char* path)
{
    return guarded([&] {
        need(ds, "dataset");
        need(path, "path");
        std::ofstream out(path, std::ios::binary);
        require(out.good(), ErrorCode::kIo, std::string("cannot write '") + path + "'");
        write_csv(out, ds->ds);
        require(out.good(), ErrorCode::kIo, std::string("failed writing '") + path + "'");
    });
}

size_t rf_dataset_size(const rf_dataset* ds) { return ds ? ds->ds.size() : 0; }
size_t rf_dataset_num_users(const rf_dataset* ds) { return ds ? ds->ds.num_users() : 0; }
size_t rf_dataset_num_items(const rf_dataset* ds) { return ds ? ds->ds.num_items() : 0; }
void rf_dataset_free(rf_dataset* ds) { delete ds; }

rf_status rf_train(const rf_dataset* ds, const rf_config* cfg, rf_epoch_fn on_epoch, void* userdata, rf_model** out)
{
    return guarded([&] {
        need(ds, "dataset");
        need(out, "out");
        const RunConfig config = cfg ? cfg->cfg : RunConfig{};
        *out = new rf_model{train_predictor(ds->ds, config, epoch_adapter(on_epoch, userdata))};
    });
}

rf_status rf_model_load(const char* path, rf_model** out)
{
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new rf_model{load_model_file(path)};
    });
}

rf_status rf_model_save(const rf_model* model, const char* path)
{
    return guarded([&] {
        need(model, "model");
        need(path, "path");
        save_model_file(*model->model, path);
    });
}

void rf_model_free(rf_model* model) { delete model; }

const char* rf_model_algorithm(const rf_model* model) { return model ? model->model->algorithm() : ""; }

rf_status rf_model_predict(const rf_model* model, const char* user, const char* item, double* out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        const Predictor& m = *model->model;
        *out = m.predict(user_index(m, user), item_index(m, item));
    });
}

rf_status rf_model_round(const rf_model* model, double value, int* out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        require(std::isfinite(value), ErrorCode::kInput, "cannot round a non-finite prediction");
        *out = round_to_scale(value, model->model->catalog().scale);
    });
}

rf_status rf_model_recommend(const rf_model* model, const char* user, size_t k, rf_ranking** out)
{
    return guarded([&] {
        need(model, "model");
        need(out, "out");
        require(k >= 1, ErrorCode::kArgument, "k must be >= 1");
        const Predictor& m = *model->model;
        auto r = std::make_unique<rf_ranking>();
        for (const ScoredItem& s : m.recommend(user_index(m, user), k)) {
            r->items.push_back(m.catalog().items.token(s.item));
            r->scores.push_back(s.score);
        }
        *out = r.release();
    });
}

size_t rf_ranking_size(const rf_ranking* r) { return r ? r->items.size() : 0; }
const char* rf_ranking_item(const rf_ranking* r, size_t index)
{
    return r && index < r->items.size() ? r->items[index].c_str() : nullptr;
}
double rf_ranking_score(const rf_ranking* r, size_t index)
{
    return r && index < r->scores.size() ? r->scores[index] : std::nan("");
}
void rf_ranking_free(rf_ranking* r) { delete r; }

rf_status rf_model_evaluate(const rf_model* model, const rf_dataset* test, const size_t* ks, size_t num_ks,
                            rf_report** out)
{
    return guarded([&] {
        need(model, "model");
        need(test, "test dataset");
        need(out, "out");
        require(num_ks == 0 || ks != nullptr, ErrorCode::kArgument, "k list must not be null");
        const Predictor& m = *model->model;
        const Catalog& c = m.catalog();
        const RatingDataset& t = test->ds;
        require(!t.empty(), ErrorCode::kEmptyData, "test set is empty");

        auto rep = std::make_unique<rf_report>();
        std::vector<double> pred;
        std::vector<double> truth;
        std::vector<std::vector<std::size_t>> positives(c.users.size());
        for (const Rating& r : t.ratings()) {
            const auto u = c.users.find(t.users().token(r.user));
            const auto i = c.items.find(t.items().token(r.item));
            if (!u || !i) {
                ++rep->report.skipped;
                continue;
            }
            pred.push_back(m.predict(*u, *i));
            truth.push_back(r.value);
            if (is_positive(c, r.value))
                positives[*u].push_back(*i);
        }
        require(!truth.empty(), ErrorCode::kEmptyData,
                "no test pair names a user and item known to the model (" + std::to_string(rep->report.skipped) +
                    " skipped)");
        rep->report.rmse = rmse(pred, truth);
        rep->report.mae = mae(pred, truth);
        rep->report.pairs = truth.size();

        if (num_ks > 0) {
            std::size_t kmax = 0;
            for (std::size_t a = 0; a < num_ks; ++a) {
                require(ks[a] >= 1, ErrorCode::kArgument, "every k must be >= 1");
                kmax = std::max(kmax, ks[a]);
            }
            std::vector<std::vector<std::size_t>> recs(c.users.size());
            bool any = false;
            for (std::size_t u = 0; u < positives.size(); ++u)
                if (!positives[u].empty()) {
                    any = true;
                    for (const ScoredItem& s : m.recommend(u, kmax))
                        recs[u].push_back(s.item);
                }
            for (std::size_t a = 0; a < num_ks; ++a)
                rep->report.topn.push_back(any ? topn_metrics(recs, positives, ks[a]) : TopNResult{ks[a], 0.0, 0.0, 0});
        }
        render(*rep);
        *out = rep.release();
    });
}

double rf_report_rmse(const rf_report* r) { return r ? r->report.rmse : std::nan(""); }
double rf_report_mae(const rf_report* r) { return r ? r->report.mae : std::nan(""); }
size_t rf_report_pairs(const rf_report* r) { return r ? r->report.pairs : 0; }
size_t rf_report_skipped(const rf_report* r) { return r ? r->report.skipped : 0; }
size_t rf_report_num_topn(const rf_report* r) { return r ? r->report.topn.size() : 0; }

rf_status rf_report_topn(const rf_report* r, size_t index, size_t* k, double* precision, double* recall)
{
    return guarded([&] {
        need(r, "report");
        require(index < r->report.topn.size(), ErrorCode::kArgument, "top-N row index out of range");
        const TopNResult& t = r->report.topn[index];
        if (k)
            *k = t.k;
        if (precision)
            *precision = t.users ? t.precision : std::nan("");
        if (recall)
            *recall = t.users ? t.recall : std::nan("");
    });
}

const char* rf_report_table(const rf_report* r) { return r ? r->table.c_str() : ""; }
const char* rf_report_json(const rf_report* r) { return r ? r->json.c_str() : ""; }
void rf_report_free(rf_report* r) { delete r; }

rf_status rf_ensemble_blend(const rf_model* const* members, const double* weights, size_t count, rf_model** out)
{
    return guarded([&] {
        need(out, "out");
        auto list = member_list(members, count);
        std::vector<double> w(count, 1.0);
        if (weights)
            w.assign(weights, weights + count);
        *out = new rf_model{std::make_shared<EnsemblePredictor>(make_blend(std::move(list), std::move(w)))};
    });
}

rf_status rf_ensemble_vote(const rf_model* const* members, size_t count, rf_model** out)
{
    return guarded([&] {
        need(out, "out");
        auto list = member_list(members, count);
        std::vector<double> w(count, count ? 1.0 / static_cast<double>(count) : 0.0);
        *out = new rf_model{std::make_shared<EnsemblePredictor>(EnsembleKind::kVote, std::move(list), std::move(w))};
    });
}

rf_status rf_ensemble_bag(const rf_dataset* ds, const rf_config* cfg, size_t members, uint64_t seed,
                          rf_epoch_fn on_epoch, void* userdata, rf_model** out)
{
    return guarded([&] {
        need(ds, "dataset");
        need(out, "out");
        const RunConfig config = cfg ? cfg->cfg : RunConfig{};
        const EpochCallback cb = epoch_adapter(on_epoch, userdata);
        MemberTrainer trainer = [&](const RatingDataset& sample, std::size_t) {
            return train_predictor(sample, config, cb);
        };
        *out = new rf_model{std::make_shared<EnsemblePredictor>(bag_train(trainer, ds->ds, members, seed))};
    });
}

rf_status rf_ensemble_stack(const rf_model* const* members, size_t count, const rf_dataset* holdout, rf_model** out)
{
    return guarded([&] {
        need(holdout, "holdout");
        need(out, "out");
        auto list = member_list(members, count);
        require(!list.empty(), ErrorCode::kArgument, "stack needs at least one member");
        const Catalog& c = list.front()->catalog();
        const RatingDataset& h = holdout->ds;
        std::vector<Rating> mapped;
        for (const Rating& r : h.ratings()) {
            const auto u = c.users.find(h.users().token(r.user));
            const auto i = c.items.find(h.items().token(r.item));
            if (u && i)
                mapped.push_back({*u, *i, r.value, {}});
        }
        *out = new rf_model{std::make_shared<EnsemblePredictor>(stack_fit(std::move(list), mapped))};
    });
}

} // extern "C"
