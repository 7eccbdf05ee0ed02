// recfact command-line tool. Talks to the library only through recfact.h.

#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "recfact/recfact.h"

namespace {

constexpr int kExitArgument = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

int exit_code(rf_status s)
{
    switch (s) {
    case RF_OK: return 0;
    case RF_ERR_ARGUMENT: return kExitArgument;
    case RF_ERR_DATA:
    case RF_ERR_IO: return kExitData;
    case RF_ERR_DIVERGENCE: return kExitDivergence;
    default: return 1;
    }
}

struct Failure {
    int code;
};

void check(rf_status s)
{
    if (s != RF_OK) {
        std::cerr << "error: " << rf_last_error() << "\n";
        throw Failure{exit_code(s)};
    }
}

[[noreturn]] void usage_error(const std::string& msg)
{
    std::cerr << "error: " << msg << "\n";
    throw Failure{kExitArgument};
}

template <class T, void (*Free)(T*)>
struct Deleter {
    void operator()(T* p) const { Free(p); }
};
using Config = std::unique_ptr<rf_config, Deleter<rf_config, rf_config_free>>;
using Dataset = std::unique_ptr<rf_dataset, Deleter<rf_dataset, rf_dataset_free>>;
using Model = std::unique_ptr<rf_model, Deleter<rf_model, rf_model_free>>;
using Ranking = std::unique_ptr<rf_ranking, Deleter<rf_ranking, rf_ranking_free>>;
using Report = std::unique_ptr<rf_report, Deleter<rf_report, rf_report_free>>;

// Flags that mirror config keys. Values given on the command line override
// the --config file.
const std::vector<std::string> kTrainKeys = {
    "algo",   "factors",         "alpha",     "lambda",    "epochs", "seed",       "optimizer", "beta1",
    "beta2",  "epsilon",         "update",    "strategy",  "freeze-implicit", "impute", "rank-rule",
    "similarity-mode", "neighbors", "neg-ratio", "loss",
};
const std::vector<std::string> kDataKeys = {"kind", "scale", "header", "duplicates"};

struct KeyFlags {
    std::string config_path;
    std::map<std::string, std::string> values;

    void add(CLI::App* cmd, const std::vector<std::string>& keys)
    {
        for (const auto& k : keys)
            cmd->add_option("--" + k, values[k], "config key '" + k + "'");
    }

    Config build() const
    {
        rf_config* raw = nullptr;
        check(rf_config_new(&raw));
        Config cfg(raw);
        if (!config_path.empty())
            check(rf_config_load(cfg.get(), config_path.c_str()));
        for (const auto& [k, v] : values)
            if (!v.empty())
                check(rf_config_set(cfg.get(), k.c_str(), v.c_str()));
        return cfg;
    }
};

void print_epoch(std::size_t epoch, double loss, void*)
{
    std::fprintf(stderr, "epoch %zu loss %.6f\n", epoch, loss);
}

Dataset load_csv(const std::string& path, const rf_config* cfg)
{
    rf_dataset* raw = nullptr;
    check(rf_dataset_load_csv(path.c_str(), cfg, &raw));
    return Dataset(raw);
}

Model load_model(const std::string& path)
{
    rf_model* raw = nullptr;
    check(rf_model_load(path.c_str(), &raw));
    return Model(raw);
}

std::vector<Model> load_models(const std::vector<std::string>& paths)
{
    std::vector<Model> out;
    for (const auto& p : paths)
        out.push_back(load_model(p));
    return out;
}

std::vector<const rf_model*> raw_list(const std::vector<Model>& models)
{
    std::vector<const rf_model*> out;
    for (const auto& m : models)
        out.push_back(m.get());
    return out;
}

void save(const rf_model* model, const std::string& path)
{
    check(rf_model_save(model, path.c_str()));
    std::cout << "wrote " << rf_model_algorithm(model) << " model to " << path << "\n";
}

std::string format(double x, int precision)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << x;
    return s.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"recfact: matrix-factorization recommenders"};
    app.require_subcommand(1);

    // train
    KeyFlags train_flags;
    std::string train_input;
    std::string train_output = "model.json";
    auto* train = app.add_subcommand("train", "train a model from a ratings CSV");
    train->add_option("--input", train_input, "ratings CSV (user,item,rating[,timestamp])")->required();
    train->add_option("--output,-o", train_output, "model file to write")->capture_default_str();
    train->add_option("--config", train_flags.config_path, "key=value config file");
    train_flags.add(train, kTrainKeys);
    train_flags.add(train, kDataKeys);

    // predict
    std::string predict_model;
    std::string predict_user;
    std::string predict_item;
    int predict_precision = 2;
    auto* predict = app.add_subcommand("predict", "predict one rating");
    predict->add_option("--model,-m", predict_model, "model file")->required();
    predict->add_option("user", predict_user, "user id")->required();
    predict->add_option("item", predict_item, "item id")->required();
    predict->add_option("--precision", predict_precision, "decimals for the raw prediction")
        ->capture_default_str()
        ->check(CLI::Range(0, 17));

    // recommend
    std::string rec_model;
    std::string rec_user;
    long long rec_k = 10;
    auto* recommend = app.add_subcommand("recommend", "top-k unobserved items for a user");
    recommend->add_option("--model,-m", rec_model, "model file")->required();
    recommend->add_option("user", rec_user, "user id")->required();
    recommend->add_option("--k,-k", rec_k, "list length")->capture_default_str();

    // evaluate
    KeyFlags eval_flags;
    std::string eval_model;
    std::string eval_test;
    std::vector<std::size_t> eval_ks;
    bool eval_json = false;
    auto* evaluate = app.add_subcommand("evaluate", "score a model on a held-out CSV");
    evaluate->add_option("--model,-m", eval_model, "model file")->required();
    evaluate->add_option("--test", eval_test, "held-out ratings CSV")->required();
    evaluate->add_option("--k", eval_ks, "top-N cutoffs, e.g. 5,10")->delimiter(',');
    evaluate->add_flag("--json", eval_json, "print the report as JSON");
    evaluate->add_option("--config", eval_flags.config_path, "key=value config file (data keys)");
    eval_flags.add(evaluate, kDataKeys);

    // split
    KeyFlags split_flags;
    std::string split_input;
    std::string split_train = "train.csv";
    std::string split_test = "test.csv";
    double split_fraction = 0.2;
    std::uint64_t split_seed = 42;
    auto* split = app.add_subcommand("split", "hold out a fraction of the ratings");
    split->add_option("--input", split_input, "ratings CSV")->required();
    split->add_option("--holdout", split_fraction, "held-out fraction")->capture_default_str();
    split->add_option("--seed", split_seed, "shuffle seed")->capture_default_str();
    split->add_option("--train-out", split_train, "training CSV to write")->capture_default_str();
    split->add_option("--test-out", split_test, "held-out CSV to write")->capture_default_str();
    split->add_option("--config", split_flags.config_path, "key=value config file (data keys)");
    split_flags.add(split, kDataKeys);

    // ensemble
    auto* ensemble = app.add_subcommand("ensemble", "combine models");
    ensemble->require_subcommand(1);
    std::vector<std::string> ens_models;
    std::vector<double> ens_weights;
    std::string ens_output = "ensemble.json";
    auto* blend = ensemble->add_subcommand("blend", "weighted average of member predictions");
    blend->add_option("--models", ens_models, "member model files")->required()->delimiter(',');
    blend->add_option("--weights", ens_weights, "member weights (default uniform)")->delimiter(',');
    blend->add_option("--output,-o", ens_output, "ensemble file to write")->capture_default_str();
    auto* vote = ensemble->add_subcommand("vote", "rank items by member top-k votes");
    vote->add_option("--models", ens_models, "member model files")->required()->delimiter(',');
    vote->add_option("--output,-o", ens_output, "ensemble file to write")->capture_default_str();
    std::string stack_holdout;
    auto* stack = ensemble->add_subcommand("stack", "fit linear stacking weights on a holdout CSV");
    stack->add_option("--models", ens_models, "member model files")->required()->delimiter(',');
    stack->add_option("--holdout", stack_holdout, "holdout ratings CSV")->required();
    stack->add_option("--output,-o", ens_output, "ensemble file to write")->capture_default_str();
    KeyFlags bag_flags;
    std::string bag_input;
    std::size_t bag_members = 5;
    std::uint64_t bag_seed = 42;
    auto* bag = ensemble->add_subcommand("bag", "train members on bootstrap resamples");
    bag->add_option("--input", bag_input, "ratings CSV")->required();
    bag->add_option("--members,-B", bag_members, "number of bootstrap members")->capture_default_str();
    bag->add_option("--bag-seed", bag_seed, "resampling seed")->capture_default_str();
    bag->add_option("--output,-o", ens_output, "ensemble file to write")->capture_default_str();
    bag->add_option("--config", bag_flags.config_path, "key=value config file");
    bag_flags.add(bag, kTrainKeys);
    bag_flags.add(bag, kDataKeys);
    KeyFlags stack_flags;
    stack->add_option("--config", stack_flags.config_path, "key=value config file (data keys)");
    stack_flags.add(stack, kDataKeys);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kExitArgument;
    }

    try {
        if (*train) {
            if (train_flags.values["algo"].empty() && train_flags.config_path.empty())
                usage_error("--algo is required (svd, funk, svdpp, itemcf, fm or ffm)");
            Config cfg = train_flags.build();
            Dataset ds = load_csv(train_input, cfg.get());
            rf_model* raw = nullptr;
            check(rf_train(ds.get(), cfg.get(), print_epoch, nullptr, &raw));
            Model model(raw);
            std::cout << "trained " << rf_model_algorithm(model.get()) << " on " << rf_dataset_size(ds.get())
                      << " ratings (" << rf_dataset_num_users(ds.get()) << " users, "
                      << rf_dataset_num_items(ds.get()) << " items)\n";
            save(model.get(), train_output);
        } else if (*predict) {
            Model model = load_model(predict_model);
            double value = 0.0;
            int rounded = 0;
            check(rf_model_predict(model.get(), predict_user.c_str(), predict_item.c_str(), &value));
            check(rf_model_round(model.get(), value, &rounded));
            std::cout << format(value, predict_precision) << " (rounded: " << rounded << ")\n";
        } else if (*recommend) {
            if (rec_k < 1)
                usage_error("--k must be >= 1");
            Model model = load_model(rec_model);
            rf_ranking* raw = nullptr;
            check(rf_model_recommend(model.get(), rec_user.c_str(), static_cast<std::size_t>(rec_k), &raw));
            Ranking ranking(raw);
            for (std::size_t r = 0; r < rf_ranking_size(ranking.get()); ++r)
                std::cout << r + 1 << "\t" << rf_ranking_item(ranking.get(), r) << "\t"
                          << format(rf_ranking_score(ranking.get(), r), 4) << "\n";
        } else if (*evaluate) {
            for (std::size_t k : eval_ks)
                if (k < 1)
                    usage_error("--k values must be >= 1");
            Config cfg = eval_flags.build();
            Model model = load_model(eval_model);
            Dataset test = load_csv(eval_test, cfg.get());
            rf_report* raw = nullptr;
            check(rf_model_evaluate(model.get(), test.get(), eval_ks.data(), eval_ks.size(), &raw));
            Report report(raw);
            std::cout << (eval_json ? rf_report_json(report.get()) : rf_report_table(report.get()));
            if (eval_json)
                std::cout << "\n";
        } else if (*split) {
            Config cfg = split_flags.build();
            Dataset ds = load_csv(split_input, cfg.get());
            rf_dataset* a = nullptr;
            rf_dataset* b = nullptr;
            std::size_t warnings = 0;
            check(rf_dataset_split(ds.get(), split_fraction, split_seed, &a, &b, &warnings));
            Dataset tr(a);
            Dataset te(b);
            check(rf_dataset_write_csv(tr.get(), split_train.c_str()));
            check(rf_dataset_write_csv(te.get(), split_test.c_str()));
            std::cout << "train " << rf_dataset_size(tr.get()) << " -> " << split_train << "\ntest "
                      << rf_dataset_size(te.get()) << " -> " << split_test << "\n";
            if (warnings)
                std::cerr << "warning: " << warnings << " users have no training rating\n";
        } else if (*blend) {
            auto models = load_models(ens_models);
            auto list = raw_list(models);
            if (!ens_weights.empty() && ens_weights.size() != list.size())
                usage_error("--weights needs one value per model");
            rf_model* raw = nullptr;
            check(rf_ensemble_blend(list.data(), ens_weights.empty() ? nullptr : ens_weights.data(), list.size(),
                                    &raw));
            save(Model(raw).get(), ens_output);
        } else if (*vote) {
            auto models = load_models(ens_models);
            auto list = raw_list(models);
            rf_model* raw = nullptr;
            check(rf_ensemble_vote(list.data(), list.size(), &raw));
            save(Model(raw).get(), ens_output);
        } else if (*stack) {
            Config cfg = stack_flags.build();
            auto models = load_models(ens_models);
            auto list = raw_list(models);
            Dataset holdout = load_csv(stack_holdout, cfg.get());
            rf_model* raw = nullptr;
            check(rf_ensemble_stack(list.data(), list.size(), holdout.get(), &raw));
            save(Model(raw).get(), ens_output);
        } else if (*bag) {
            if (bag_flags.values["algo"].empty() && bag_flags.config_path.empty())
                usage_error("--algo is required (svd, funk, svdpp, itemcf, fm or ffm)");
            Config cfg = bag_flags.build();
            Dataset ds = load_csv(bag_input, cfg.get());
            rf_model* raw = nullptr;
            check(rf_ensemble_bag(ds.get(), cfg.get(), bag_members, bag_seed, print_epoch, nullptr, &raw));
            save(Model(raw).get(), ens_output);
        }
    } catch (const Failure& f) {
        return f.code;
    }
    return 0;
}
