#include "recfact/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "recfact/error.hpp"

namespace recfact {

const std::vector<std::string>& RunConfig::keys()
{
    static const std::vector<std::string> k = {
        "algo",     "factors",  "alpha",   "lambda",         "epochs",          "seed",      "optimizer",
        "beta1",    "beta2",    "epsilon", "update",         "strategy",        "freeze-implicit",
        "impute",   "rank-rule", "similarity-mode", "neighbors", "neg-ratio", "loss",
        "kind",     "scale",    "header",  "duplicates",
    };
    return k;
}

std::size_t edit_distance(std::string_view a, std::string_view b)
{
    std::vector<std::size_t> row(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j)
        row[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t up = row[j];
            row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
            diag = up;
        }
    }
    return row[b.size()];
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected)
{
    fail(ErrorCode::kArgument,
         "bad value '" + std::string(value) + "' for " + std::string(key) + " (expected " + std::string(expected) + ")");
}

double to_double(std::string_view key, std::string_view v)
{
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
        bad_value(key, v, "a finite number");
    return out;
}

std::uint64_t to_uint(std::string_view key, std::string_view v)
{
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
        bad_value(key, v, "a nonnegative integer");
    return out;
}

bool to_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    bad_value(key, v, "true or false");
}

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

void RunConfig::set(std::string_view key, std::string_view value)
{
    const auto& known = keys();
    if (std::find(known.begin(), known.end(), key) == known.end()) {
        std::string best = known.front();
        std::size_t best_d = edit_distance(key, best);
        for (const auto& k : known)
            if (const std::size_t d = edit_distance(key, k); d < best_d) {
                best = k;
                best_d = d;
            }
        fail(ErrorCode::kArgument, "unknown config key '" + std::string(key) + "' (did you mean '" + best + "'?)");
    }

    if (key == "algo") {
        static const char* algos[] = {"svd", "funk", "svdpp", "itemcf", "fm", "ffm"};
        if (std::find(std::begin(algos), std::end(algos), value) == std::end(algos))
            bad_value(key, value, "svd, funk, svdpp, itemcf, fm or ffm");
        algo = std::string(value);
    } else if (key == "factors") {
        factors = to_uint(key, value);
        if (factors < 1)
            bad_value(key, value, "an integer >= 1");
    } else if (key == "alpha") {
        alpha = to_double(key, value);
        if (alpha <= 0.0)
            bad_value(key, value, "a number > 0");
    } else if (key == "lambda") {
        lambda = to_double(key, value);
        if (lambda < 0.0)
            bad_value(key, value, "a number >= 0");
    } else if (key == "epochs") {
        epochs = to_uint(key, value);
    } else if (key == "seed") {
        seed = to_uint(key, value);
    } else if (key == "optimizer") {
        try {
            optimizer = parse_optimizer_kind(value);
        } catch (const Error&) {
            bad_value(key, value, "sgd, momentum or adaptive");
        }
    } else if (key == "beta1") {
        beta1 = to_double(key, value);
    } else if (key == "beta2") {
        beta2 = to_double(key, value);
    } else if (key == "epsilon") {
        epsilon = to_double(key, value);
    } else if (key == "update") {
        if (value == "sequential")
            update = UpdateOrder::kSequential;
        else if (value == "simultaneous")
            update = UpdateOrder::kSimultaneous;
        else
            bad_value(key, value, "sequential or simultaneous");
    } else if (key == "strategy") {
        if (value == "all")
            strategy = FunkStrategy::kAllFactors;
        else if (value == "feature-wise")
            strategy = FunkStrategy::kFeatureWise;
        else
            bad_value(key, value, "all or feature-wise");
    } else if (key == "freeze-implicit") {
        freeze_implicit = to_bool(key, value);
    } else if (key == "impute") {
        if (value == "global")
            impute = ImputeStrategy::kGlobal;
        else if (value == "user")
            impute = ImputeStrategy::kUser;
        else if (value == "item")
            impute = ImputeStrategy::kItem;
        else
            bad_value(key, value, "global, user or item");
    } else if (key == "rank-rule") {
        const auto colon = value.find(':');
        const std::string_view name = value.substr(0, colon);
        const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : value.substr(colon + 1);
        if (name == "energy") {
            const double t = arg.empty() ? 0.95 : to_double(key, arg);
            if (!(t > 0.0 && t <= 1.0))
                bad_value(key, value, "energy:t with 0 < t <= 1");
            rank_rule = EnergyRule{t};
        } else if (name == "ratio") {
            const double c = arg.empty() ? 10.0 : to_double(key, arg);
            if (!(c > 0.0))
                bad_value(key, value, "ratio:c with c > 0");
            rank_rule = RatioRule{c};
        } else if (name == "fixed") {
            const std::uint64_t f = arg.empty() ? 0 : to_uint(key, arg);
            if (f < 1)
                bad_value(key, value, "fixed:f with f >= 1");
            rank_rule = FixedRank{f};
        } else {
            bad_value(key, value, "energy:<t>, ratio:<c> or fixed:<f>");
        }
    } else if (key == "similarity-mode") {
        if (value == "paper-dot")
            similarity = SimilarityMode::kPaperDot;
        else if (value == "cosine")
            similarity = SimilarityMode::kCosine;
        else
            bad_value(key, value, "paper-dot or cosine");
    } else if (key == "neighbors") {
        neighbors = to_uint(key, value);
    } else if (key == "neg-ratio") {
        const double r = to_double(key, value);
        if (r < 0.0)
            bad_value(key, value, "a number >= 0");
        neg_ratio = r;
    } else if (key == "loss") {
        try {
            loss = parse_fm_loss(value);
        } catch (const Error&) {
            bad_value(key, value, "squared or logistic");
        }
    } else if (key == "kind") {
        if (value == "explicit")
            kind = FeedbackKind::kExplicit;
        else if (value == "implicit")
            kind = FeedbackKind::kImplicit;
        else
            bad_value(key, value, "explicit or implicit");
    } else if (key == "scale") {
        const auto colon = value.find(':');
        if (colon == std::string_view::npos)
            bad_value(key, value, "lo:hi");
        const double lo = to_double(key, value.substr(0, colon));
        const double hi = to_double(key, value.substr(colon + 1));
        if (!(lo < hi))
            bad_value(key, value, "lo:hi with lo < hi");
        scale = {lo, hi};
    } else if (key == "header") {
        header = to_bool(key, value);
    } else if (key == "duplicates") {
        if (value == "keep-last")
            duplicates = DuplicatePolicy::kKeepLast;
        else if (value == "keep-first")
            duplicates = DuplicatePolicy::kKeepFirst;
        else if (value == "error")
            duplicates = DuplicatePolicy::kError;
        else
            bad_value(key, value, "keep-last, keep-first or error");
    }
}

void RunConfig::load(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view s = trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorCode::kArgument, "config line " + std::to_string(line_no) + ": expected key=value");
        try {
            set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
        } catch (const Error& e) {
            fail(e.code(), "config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void RunConfig::load_file(const std::string& path)
{
    std::ifstream in(path);
    require(in.good(), ErrorCode::kIo, "cannot open config file '" + path + "'");
    load(in);
}

TrainConfig RunConfig::train_config() const
{
    TrainConfig c;
    c.factors = factors;
    c.alpha = alpha;
    c.lambda = lambda;
    c.epochs = epochs;
    c.seed = seed;
    c.optimizer = optimizer;
    c.beta1 = beta1;
    c.beta2 = beta2;
    c.epsilon = epsilon;
    c.update_order = update;
    c.strategy = strategy;
    c.freeze_implicit = freeze_implicit;
    return c;
}

namespace {

std::vector<FmSample> rating_samples(const RatingDataset& ds, const FeatureEncoder& enc)
{
    std::vector<FmSample> out;
    out.reserve(ds.size());
    for (const Rating& r : ds.ratings()) {
        const std::size_t pos[2] = {r.user, r.item};
        out.push_back({enc.encode_positions(pos), r.value});
    }
    return out;
}

} // namespace

PredictorPtr train_predictor(const RatingDataset& ds, const RunConfig& config, const EpochCallback& on_epoch)
{
    require(!ds.empty(), ErrorCode::kEmptyData, "training dataset is empty");
    auto catalog = std::make_shared<const Catalog>(Catalog::from(ds));

    std::optional<RatingDataset> sampled;
    if (ds.kind() == FeedbackKind::kImplicit) {
        const double ratio = config.neg_ratio.value_or(3.0);
        if (ratio > 0.0)
            sampled = negative_sample(ds, ratio, config.seed).dataset;
    }
    const RatingDataset& train = sampled ? *sampled : ds;

    if (config.algo == "svd") {
        SvdCfOptions opt;
        opt.impute = config.impute;
        opt.rank_rule = config.rank_rule;
        opt.similarity = config.similarity;
        opt.neighbors = config.neighbors;
        return std::make_shared<SvdPredictor>(catalog, SvdCfModel::fit(train, opt));
    }
    // The *_train entry points accept explicit data only; implicit data with
    // sampled negatives goes through the *_train_from path.
    const TrainConfig tc = config.train_config();
    if (config.algo == "funk") {
        tc.validate();
        FactorModel init = init_funk_model(train.num_users(), train.num_items(), tc.factors, tc.seed);
        return std::make_shared<FactorPredictor>(catalog,
                                                 funk_train_from(std::move(init), train.ratings(), tc, on_epoch).model);
    }
    if (config.algo == "svdpp") {
        tc.validate();
        FactorModel init = init_svdpp_model(train, tc.factors, tc.seed, tc.freeze_implicit);
        return std::make_shared<FactorPredictor>(
            catalog, svdpp_train_from(std::move(init), train.ratings(), tc, on_epoch).model);
    }
    if (config.algo == "itemcf") {
        const std::size_t k = config.neighbors == 0 ? std::max<std::size_t>(train.num_items(), 2) - 1 : config.neighbors;
        return std::make_shared<ItemCfPredictor>(catalog, ItemCfModel::fit(train, k));
    }
    if (config.algo == "fm" || config.algo == "ffm") {
        const FmLoss loss = config.loss.value_or(ds.kind() == FeedbackKind::kImplicit ? FmLoss::kLogistic
                                                                                       : FmLoss::kSquared);
        const FeatureEncoder enc = rating_encoder(*catalog);
        const auto samples = rating_samples(train, enc);
        const OptimizerConfig opt = config.train_config().optimizer_config();
        if (config.algo == "fm") {
            FmTrainConfig c{config.factors, config.lambda, config.epochs, config.seed, loss, opt};
            FmModel init = init_fm_model(enc.dimension(), config.factors, config.seed);
            return std::make_shared<FmPredictor>(catalog, fm_train_from(std::move(init), samples, c, on_epoch).model,
                                                 loss);
        }
        FfmTrainConfig c{enc.num_fields(), config.factors, config.lambda, config.epochs, config.seed, loss, opt};
        return std::make_shared<FfmPredictor>(catalog, ffm_train(samples, enc.dimension(), c, on_epoch).model, loss);
    }
    fail(ErrorCode::kArgument, "unknown algorithm '" + config.algo + "'");
}

} // namespace recfact
