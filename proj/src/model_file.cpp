#include "recfact/model_file.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "recfact/ensemble.hpp"
#include "recfact/error.hpp"

namespace recfact {

using nlohmann::json;

namespace {

json matrix_json(const DenseMatrix& m)
{
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r)
        rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    return rows;
}

DenseMatrix matrix_from(const json& j, const char* what)
{
    if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty())
        fail(ErrorCode::kFormat, std::string("model file: '") + what + "' must be a nonempty matrix");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    std::vector<double> data;
    data.reserve(rows * cols);
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != cols)
            fail(ErrorCode::kFormat, std::string("model file: '") + what + "' has ragged rows");
        for (const auto& x : row)
            data.push_back(x.get<double>());
    }
    return DenseMatrix::from_rows(rows, cols, std::move(data));
}

const json& field(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
        fail(ErrorCode::kFormat, std::string("model file: missing field '") + key + "'");
    return j.at(key);
}

json encoder_json(const FeatureEncoder& enc)
{
    json cols = json::array();
    for (const auto& c : enc.columns())
        cols.push_back({{"name", c.name},
                        {"kind", c.kind == ColumnKind::kCategorical ? "categorical" : "numeric"},
                        {"categories", c.categories}});
    return {{"columns", cols}, {"unknown", "last-slot-per-column"}};
}

json params_json(const Predictor& model)
{
    if (const auto* p = dynamic_cast<const SvdPredictor*>(&model)) {
        const SvdCfModel& m = p->model();
        return {{"r_star", matrix_json(m.r_star())},
                {"mask", matrix_json(m.mask())},
                {"rank", m.rank()},
                {"similarity_mode", m.similarity_mode() == SimilarityMode::kPaperDot ? "paper-dot" : "cosine"},
                {"neighbors", m.neighbors()},
                {"singular_values", m.singular_values()}};
    }
    if (const auto* p = dynamic_cast<const FactorPredictor*>(&model)) {
        const FactorModel& m = p->model();
        json out = {{"p", matrix_json(m.p)}, {"q", matrix_json(m.q)}};
        if (m.kind == FactorKind::kSvdPlusPlus) {
            out["mu"] = m.mu;
            out["user_bias"] = m.user_bias;
            out["item_bias"] = m.item_bias;
            out["y"] = matrix_json(*m.y);
            out["implicit_sets"] = m.implicit_sets;
        }
        return out;
    }
    if (const auto* p = dynamic_cast<const ItemCfPredictor*>(&model)) {
        const ItemCfModel& m = p->model();
        json ratings = json::array();
        for (const auto& row : m.user_ratings()) {
            json r = json::array();
            for (const auto& [item, value] : row)
                r.push_back({item, value});
            ratings.push_back(r);
        }
        return {{"weights", matrix_json(m.weights())}, {"neighbors", m.neighbors()}, {"user_ratings", ratings}};
    }
    if (const auto* p = dynamic_cast<const FmPredictor*>(&model)) {
        const FmModel& m = p->model();
        return {{"loss", to_string(p->loss())}, {"w0", m.w0}, {"w", m.w}, {"v", matrix_json(m.v)}};
    }
    if (const auto* p = dynamic_cast<const FfmPredictor*>(&model)) {
        const FfmModel& m = p->model();
        return {{"loss", to_string(p->loss())}, {"w0", m.w0},           {"w", m.w},
                {"fields", m.fields},           {"factors", m.factors}, {"latent", m.latent}};
    }
    return json::object();
}

json document(const Predictor& model)
{
    const Catalog& c = model.catalog();
    json doc = {
        {"format_version", kModelFormatVersion},
        {"algorithm", model.algorithm()},
        {"scale", {{"lo", c.scale.lo}, {"hi", c.scale.hi}}},
        {"kind", c.kind == FeedbackKind::kExplicit ? "explicit" : "implicit"},
        {"users", c.users.tokens()},
        {"items", c.items.tokens()},
        {"observed", c.observed},
        {"params", params_json(model)},
    };
    if (const auto* p = dynamic_cast<const FmPredictor*>(&model))
        doc["encoder"] = encoder_json(p->encoder());
    if (const auto* p = dynamic_cast<const FfmPredictor*>(&model))
        doc["encoder"] = encoder_json(p->encoder());
    if (const auto* e = dynamic_cast<const EnsemblePredictor*>(&model)) {
        json members = json::array();
        for (const auto& m : e->members())
            members.push_back(document(*m));
        doc["ensemble"] = {{"kind", to_string(e->kind())},
                           {"weights", e->weights()},
                           {"intercept", e->intercept()},
                           {"members", members}};
    }
    return doc;
}

FmLoss loss_from(const json& params)
{
    try {
        return parse_fm_loss(field(params, "loss").get<std::string>());
    } catch (const Error& e) {
        fail(ErrorCode::kFormat, std::string("model file: ") + e.what());
    }
}

PredictorPtr from_document(const json& doc)
{
    const json& version = field(doc, "format_version");
    if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion)
        fail(ErrorCode::kFormat, "model file: unsupported format_version " + version.dump() + " (this build reads " +
                                     std::to_string(kModelFormatVersion) + ")");

    Catalog c;
    c.users = IndexMap::from_tokens(field(doc, "users").get<std::vector<std::string>>());
    c.items = IndexMap::from_tokens(field(doc, "items").get<std::vector<std::string>>());
    c.scale = {field(doc, "scale").at("lo").get<double>(), field(doc, "scale").at("hi").get<double>()};
    const std::string kind = field(doc, "kind").get<std::string>();
    if (kind != "explicit" && kind != "implicit")
        fail(ErrorCode::kFormat, "model file: unknown kind '" + kind + "'");
    c.kind = kind == "explicit" ? FeedbackKind::kExplicit : FeedbackKind::kImplicit;
    c.observed = field(doc, "observed").get<std::vector<std::vector<std::size_t>>>();
    for (const auto& row : c.observed)
        for (std::size_t i : row)
            require(i < c.items.size(), ErrorCode::kFormat, "model file: observed item out of range");
    auto catalog = std::make_shared<const Catalog>(std::move(c));

    const std::string algo = field(doc, "algorithm").get<std::string>();
    const json& params = field(doc, "params");
    if (algo == "svd") {
        const std::string mode = field(params, "similarity_mode").get<std::string>();
        if (mode != "paper-dot" && mode != "cosine")
            fail(ErrorCode::kFormat, "model file: unknown similarity_mode '" + mode + "'");
        SvdCfModel m(matrix_from(field(params, "r_star"), "r_star"), matrix_from(field(params, "mask"), "mask"),
                     field(params, "rank").get<std::size_t>(),
                     mode == "paper-dot" ? SimilarityMode::kPaperDot : SimilarityMode::kCosine,
                     field(params, "neighbors").get<std::size_t>(),
                     field(params, "singular_values").get<std::vector<double>>());
        return std::make_shared<SvdPredictor>(catalog, std::move(m));
    }
    if (algo == "funk" || algo == "svdpp") {
        FactorModel m{algo == "funk" ? FactorKind::kFunk : FactorKind::kSvdPlusPlus,
                      matrix_from(field(params, "p"), "p"),
                      matrix_from(field(params, "q"), "q"),
                      0.0,
                      {},
                      {},
                      std::nullopt,
                      {}};
        if (m.kind == FactorKind::kSvdPlusPlus) {
            m.mu = field(params, "mu").get<double>();
            m.user_bias = field(params, "user_bias").get<std::vector<double>>();
            m.item_bias = field(params, "item_bias").get<std::vector<double>>();
            m.y = matrix_from(field(params, "y"), "y");
            m.implicit_sets = field(params, "implicit_sets").get<std::vector<std::vector<std::size_t>>>();
        }
        return std::make_shared<FactorPredictor>(catalog, std::move(m));
    }
    if (algo == "itemcf") {
        ItemCfModel::UserRatings ratings;
        for (const auto& row : field(params, "user_ratings")) {
            auto& out = ratings.emplace_back();
            for (const auto& pair : row)
                out.emplace_back(pair.at(0).get<std::size_t>(), pair.at(1).get<double>());
        }
        ItemCfModel m(matrix_from(field(params, "weights"), "weights"), field(params, "neighbors").get<std::size_t>(),
                      std::move(ratings));
        return std::make_shared<ItemCfPredictor>(catalog, std::move(m));
    }
    if (algo == "fm") {
        FmModel m{field(params, "w0").get<double>(), field(params, "w").get<std::vector<double>>(),
                  matrix_from(field(params, "v"), "v")};
        return std::make_shared<FmPredictor>(catalog, std::move(m), loss_from(params));
    }
    if (algo == "ffm") {
        FfmModel m{field(params, "w0").get<double>(), field(params, "w").get<std::vector<double>>(),
                   field(params, "fields").get<std::size_t>(), field(params, "factors").get<std::size_t>(),
                   field(params, "latent").get<std::vector<double>>()};
        return std::make_shared<FfmPredictor>(catalog, std::move(m), loss_from(params));
    }
    if (algo == "ensemble") {
        const json& e = field(doc, "ensemble");
        std::vector<PredictorPtr> members;
        for (const auto& m : field(e, "members"))
            members.push_back(from_document(m));
        auto out = std::make_shared<EnsemblePredictor>(parse_ensemble_kind(field(e, "kind").get<std::string>()),
                                                       std::move(members),
                                                       field(e, "weights").get<std::vector<double>>(),
                                                       field(e, "intercept").get<double>(), catalog);
        return out;
    }
    fail(ErrorCode::kFormat, "model file: unknown algorithm '" + algo + "'");
}

} // namespace

std::string save_model(const Predictor& model, const std::string& created)
{
    json doc = document(model);
    if (!created.empty())
        doc["created"] = created;
    return doc.dump(1) + "\n";
}

PredictorPtr load_model(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        fail(ErrorCode::kFormat, std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        return from_document(doc);
    } catch (const json::exception& e) {
        fail(ErrorCode::kFormat, std::string("model file: ") + e.what());
    }
}

void save_model_file(const Predictor& model, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    require(out.good(), ErrorCode::kIo, "cannot write model file '" + path + "'");
    out << save_model(model, utc_timestamp());
    require(out.good(), ErrorCode::kIo, "failed writing model file '" + path + "'");
}

PredictorPtr load_model_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::kIo, "cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_model(ss.str());
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace recfact
