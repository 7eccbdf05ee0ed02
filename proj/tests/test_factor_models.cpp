#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "recfact/error.hpp"
#include "recfact/factor_models.hpp"

using namespace recfact;

namespace {

FactorModel funk_model(std::size_t users, std::size_t items, std::size_t f, std::vector<double> p,
                       std::vector<double> q)
{
    return {FactorKind::kFunk, DenseMatrix::from_rows(users, f, p), DenseMatrix::from_rows(items, f, q),
            0.0, {}, {}, std::nullopt, {}};
}

FactorModel svdpp_model(std::size_t users, std::size_t items, std::size_t f)
{
    FactorModel m{FactorKind::kSvdPlusPlus, DenseMatrix(users, f, 0.0), DenseMatrix(items, f, 0.0), 0.0,
                  std::vector<double>(users, 0.0), std::vector<double>(items, 0.0),
                  DenseMatrix(items, f, 0.0), std::vector<std::vector<std::size_t>>(users)};
    return m;
}

double rmse_on(const FactorModel& m, std::span<const Rating> triples) { return training_rmse(m, triples); }

// Random small problem: m, n <= 6, f <= 3, each cell observed with prob 0.6.
struct SmallProblem {
    std::size_t users, items, f;
    std::vector<Rating> triples;
};

SmallProblem random_problem(Rng& rng)
{
    SmallProblem s{1 + rng.below(6), 1 + rng.below(6), 1 + rng.below(3), {}};
    for (std::size_t u = 0; u < s.users; ++u)
        for (std::size_t i = 0; i < s.items; ++i)
            if (rng.uniform() < 0.6)
                s.triples.push_back({u, i, rng.uniform(1.0, 5.0), {}});
    if (s.triples.empty())
        s.triples.push_back({0, 0, 3.0, {}});
    return s;
}

void fill_uniform(Rng& rng, std::span<double> xs)
{
    for (double& x : xs)
        x = rng.uniform(-1.0, 1.0);
}

// Central differences with h = 1e-5, relative error per coordinate.
void expect_gradient(const std::function<double()>& loss, std::span<double> params, std::span<const double> analytic,
                     double tol, const char* what)
{
    const double h = 1e-5;
    for (std::size_t c = 0; c < params.size(); ++c) {
        const double saved = params[c];
        params[c] = saved + h;
        const double up = loss();
        params[c] = saved - h;
        const double down = loss();
        params[c] = saved;
        const double numeric = (up - down) / (2 * h);
        const double diff = std::abs(numeric - analytic[c]);
        const double scale = std::max(std::abs(numeric), std::abs(analytic[c]));
        EXPECT_TRUE(diff <= 1e-8 || diff <= tol * scale)
            << what << "[" << c << "] analytic " << analytic[c] << " numeric " << numeric;
    }
}

} // namespace

// ------------------------------------------------------------- Funk-SVD

TEST(FunkPredict, TwoItemExample)
{
    // Rows: user A; items Y, Z.
    const auto m = funk_model(1, 2, 2, {1.2, 0.8}, {1.0, 1.1, 0.8, 0.4});
    EXPECT_NEAR(funk_predict(m, 0, 0), 2.08, 1e-12);
    EXPECT_NEAR(funk_predict(m, 0, 1), 1.28, 1e-12);
    EXPECT_THROW(funk_predict(m, 1, 0), Error);
    EXPECT_THROW(funk_predict(m, 0, 2), Error);
}

TEST(FunkPredict, ZeroFactorsGiveZero)
{
    const auto m = funk_model(2, 3, 2, std::vector<double>(4, 0.0), {1, 2, 3, 4, 5, 6});
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t i = 0; i < 3; ++i)
            EXPECT_EQ(funk_predict(m, u, i), 0.0);
}

TEST(FunkLoss, Examples)
{
    const auto m = funk_model(1, 1, 1, {1.0}, {1.0});
    const std::vector<Rating> one{{0, 0, 2.0, {}}};
    EXPECT_DOUBLE_EQ(funk_loss(m, one, 0.0), 1.0);
    EXPECT_DOUBLE_EQ(funk_loss(m, one, 0.5), 2.0);

    const auto exact = funk_model(2, 2, 1, {1.0, 2.0}, {3.0, 0.5});
    const std::vector<Rating> all{{0, 0, 3.0, {}}, {0, 1, 0.5, {}}, {1, 0, 6.0, {}}, {1, 1, 1.0, {}}};
    EXPECT_EQ(funk_loss(exact, all, 0.0), 0.0);
}

TEST(FunkLoss, GradientMatchesFiniteDifferences)
{
    Rng rng(101);
    for (int trial = 0; trial < 60; ++trial) {
        const auto prob = random_problem(rng);
        const double lambda = rng.uniform(0.0, 0.5);
        FactorModel m = init_funk_model(prob.users, prob.items, prob.f, 1000 + trial);
        fill_uniform(rng, m.p.data());
        fill_uniform(rng, m.q.data());
        const auto g = funk_loss_gradient(m, prob.triples, lambda);
        auto loss = [&] { return funk_loss(m, prob.triples, lambda); };
        expect_gradient(loss, m.p.data(), g.p.data(), 1e-4, "P");
        expect_gradient(loss, m.q.data(), g.q.data(), 1e-4, "Q");
    }
}

TEST(FunkTrain, SingleSequentialStepTrace)
{
    TrainConfig cfg;
    cfg.factors = 1;
    cfg.alpha = 1.0;
    cfg.lambda = 0.0;
    cfg.epochs = 1;
    const std::vector<Rating> one{{0, 0, 2.0, {}}};
    const auto seq = funk_train_from(funk_model(1, 1, 1, {1.0}, {1.0}), one, cfg).model;
    EXPECT_EQ(seq.p(0, 0), 2.0);
    EXPECT_EQ(seq.q(0, 0), 3.0);

    cfg.update_order = UpdateOrder::kSimultaneous;
    const auto sim = funk_train_from(funk_model(1, 1, 1, {1.0}, {1.0}), one, cfg).model;
    EXPECT_EQ(sim.p(0, 0), 2.0);
    EXPECT_EQ(sim.q(0, 0), 2.0);
}

TEST(FunkTrain, LargeRegularizationShrinksTowardZero)
{
    TrainConfig cfg;
    cfg.factors = 1;
    cfg.alpha = 1.0;
    cfg.lambda = 1.0;
    cfg.epochs = 1;
    // p.q = 0 = r, so err = 0 and alpha*lambda = 1 zeroes the parameters.
    const std::vector<Rating> zero{{0, 0, 0.0, {}}};
    const auto m = funk_train_from(funk_model(1, 1, 1, {0.0}, {0.7}), zero, cfg).model;
    EXPECT_EQ(m.q(0, 0), 0.0);
}

TEST(FunkTrain, MatchesHandCodedLoopBitwise)
{
    const auto ds = fixtures::rank2(12, 9, 0.7, 5);
    TrainConfig cfg;
    cfg.factors = 3;
    cfg.alpha = 0.02;
    cfg.lambda = 0.05;
    cfg.epochs = 15;
    cfg.seed = 77;
    const auto trained = funk_train(ds, cfg).model;

    auto oracle = oracles::funk_init(ds.num_users(), ds.num_items(), 3, 77);
    oracles::funk_sgd(oracle, ds.ratings(), 0.02, 0.05, 15);
    ASSERT_EQ(trained.p.data().size(), oracle.p.size());
    for (std::size_t k = 0; k < oracle.p.size(); ++k)
        ASSERT_EQ(trained.p.data()[k], oracle.p[k]) << "P[" << k << "]";
    for (std::size_t k = 0; k < oracle.q.size(); ++k)
        ASSERT_EQ(trained.q.data()[k], oracle.q[k]) << "Q[" << k << "]";
}

TEST(FunkTrain, DeterministicAndTraceLength)
{
    const auto ds = fixtures::rank2(10, 8, 0.6, 3);
    TrainConfig cfg;
    cfg.factors = 2;
    cfg.epochs = 7;
    std::vector<double> seen;
    const auto a = funk_train(ds, cfg, [&](std::size_t, double loss) { seen.push_back(loss); });
    const auto b = funk_train(ds, cfg);
    EXPECT_EQ(a.rmse_trace.size(), 7u);
    EXPECT_EQ(seen, a.rmse_trace);
    EXPECT_EQ(a.model.p.data()[0], b.model.p.data()[0]);
    EXPECT_EQ(a.rmse_trace, b.rmse_trace);
}

TEST(FunkTrain, RmseNonincreasingForSmallStep)
{
    DatasetBuilder b;
    const double cells[5][5] = {{5, 3, 0, 1, 4}, {4, 0, 0, 1, 3}, {1, 1, 0, 5, 2}, {1, 0, 0, 4, 1}, {0, 1, 5, 4, 3}};
    for (int u = 0; u < 5; ++u)
        for (int i = 0; i < 5; ++i)
            if (cells[u][i] > 0)
                b.add("u" + std::to_string(u), "i" + std::to_string(i), cells[u][i]);
    const auto ds = std::move(b).build();
    TrainConfig cfg;
    cfg.factors = 2;
    cfg.alpha = 1e-3;
    cfg.lambda = 0.02;
    cfg.epochs = 50;
    const auto trace = funk_train(ds, cfg).rmse_trace;
    for (std::size_t e = 1; e < trace.size(); ++e)
        EXPECT_LE(trace[e], trace[e - 1]) << "epoch " << e + 1;
}

TEST(FunkTrain, LearnsRankTwoSynthetic)
{
    const auto ds = fixtures::rank2();
    const auto parts = split(ds, 0.2, 42);
    TrainConfig cfg;
    cfg.factors = 2;
    cfg.alpha = 0.01;
    cfg.lambda = 0.02;
    cfg.epochs = 200;
    const auto m = funk_train(parts.train, cfg).model;
    EXPECT_LT(rmse_on(m, parts.test.ratings()), 0.1);
}

TEST(FunkTrain, FeatureWiseStrategyLearns)
{
    const auto ds = fixtures::rank2(20, 15, 0.8, 9);
    TrainConfig cfg;
    cfg.factors = 2;
    cfg.alpha = 0.01;
    cfg.lambda = 0.0;
    cfg.epochs = 100;
    cfg.strategy = FunkStrategy::kFeatureWise;
    const auto r = funk_train(ds, cfg);
    EXPECT_EQ(r.rmse_trace.size(), 200u);
    EXPECT_LT(r.rmse_trace.back(), r.rmse_trace.front());
    EXPECT_LT(training_rmse(r.model, ds.ratings()), 0.5);
}

TEST(FunkTrain, DivergenceNamesEpoch)
{
    const auto ds = fixtures::rank2(10, 8, 0.8, 1);
    TrainConfig cfg;
    cfg.factors = 2;
    cfg.alpha = 50.0;
    cfg.epochs = 50;
    try {
        funk_train(ds, cfg);
        FAIL() << "expected divergence";
    } catch (const Error& e) {
        EXPECT_TRUE(e.code() == ErrorCode::kDivergence || e.code() == ErrorCode::kGradient);
        EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
    }
}

TEST(FunkTrain, RejectsBadConfig)
{
    const auto ds = fixtures::rank2(5, 5, 0.8, 1);
    TrainConfig cfg;
    cfg.factors = 0;
    EXPECT_THROW(funk_train(ds, cfg), Error);
    cfg = {};
    cfg.alpha = 0.0;
    EXPECT_THROW(funk_train(ds, cfg), Error);
    cfg = {};
    cfg.lambda = -1.0;
    EXPECT_THROW(funk_train(ds, cfg), Error);
    cfg = {};
    cfg.epochs = 0;
    EXPECT_THROW(funk_train(ds, cfg), Error);
}

// ---------------------------------------------------------------- ItemCF

TEST(ItemCf, SimilarityFromSetArithmetic)
{
    DatasetBuilder b;
    b.add("u1", "i", 1);
    b.add("u2", "i", 1);
    b.add("u2", "j", 1);
    b.add("u3", "j", 1);
    b.add("u4", "j", 1);
    b.add("u9", "k", 1);
    const auto w = itemcf_similarity(std::move(b).build());
    EXPECT_DOUBLE_EQ(w(0, 1), 0.5);
    EXPECT_DOUBLE_EQ(w(1, 0), 1.0 / 3.0);
    EXPECT_EQ(w(0, 2), 0.0);
    EXPECT_EQ(w(0, 0), 0.0);
}

TEST(ItemCf, IdenticalRaterSetsGiveOne)
{
    DatasetBuilder b;
    for (const char* u : {"a", "b", "c"}) {
        b.add(u, "x", 3);
        b.add(u, "y", 4);
    }
    const auto w = itemcf_similarity(std::move(b).build());
    EXPECT_EQ(w(0, 1), 1.0);
    EXPECT_EQ(w(1, 0), 1.0);
}

TEST(ItemCf, SimilarityInvariants)
{
    const auto ds = fixtures::rank2(25, 15, 0.4, 13);
    const auto w = itemcf_similarity(ds);
    const auto raters = ds.users_by_item();
    for (std::size_t i = 0; i < ds.num_items(); ++i) {
        EXPECT_EQ(w(i, i), 0.0);
        for (std::size_t j = 0; j < ds.num_items(); ++j) {
            EXPECT_GE(w(i, j), 0.0);
            EXPECT_LE(w(i, j), 1.0);
            if (i != j)
                EXPECT_NEAR(w(i, j) * raters[i].size(), w(j, i) * raters[j].size(), 1e-12);
        }
    }
}

TEST(ItemCf, PredictionExamples)
{
    DenseMatrix w(2, 2, 0.0);
    w(1, 0) = 0.5;
    w(0, 1) = 0.5;
    ItemCfModel m(w, 1, {{{0, 4.0}}, {}});
    const auto p = m.predict(0, 1);
    EXPECT_DOUBLE_EQ(p.value, 2.0);
    EXPECT_EQ(p.flags, kPredictionOk);
    const auto empty = m.predict(1, 1);
    EXPECT_EQ(empty.value, 0.0);
    EXPECT_EQ(empty.flags, kPredictionEmptyNeighborhood);
}

TEST(ItemCf, UnitWeightsSumRatings)
{
    const std::size_t n = 4;
    DenseMatrix w(n, n, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        w(i, i) = 0.0;
    ItemCfModel m(w, n - 1, {{{0, 2.0}, {1, 3.0}, {2, 5.0}}});
    EXPECT_DOUBLE_EQ(m.predict(0, 3).value, 10.0);
}

TEST(ItemCf, NeighborhoodTopK)
{
    DenseMatrix w(4, 4, 0.0);
    w(0, 1) = 0.2;
    w(0, 2) = 0.9;
    w(0, 3) = 0.2;
    ItemCfModel m(w, 2, {{{1, 1.0}, {2, 1.0}, {3, 1.0}}});
    const auto s = m.neighborhood(0);
    ASSERT_EQ(s.size(), 2u);
    EXPECT_EQ(s[0], 1u);
    EXPECT_EQ(s[1], 2u);
    EXPECT_DOUBLE_EQ(m.predict(0, 0).value, 1.1);
}

TEST(ItemCf, RejectsBadModels)
{
    DenseMatrix w(2, 2, 0.0);
    EXPECT_THROW(ItemCfModel(w, 0, {}), Error);
    w(0, 0) = 0.5;
    EXPECT_THROW(ItemCfModel(w, 1, {}), Error);
    DenseMatrix big(2, 2, 0.0);
    big(0, 1) = 1.5;
    EXPECT_THROW(ItemCfModel(big, 1, {}), Error);
}

// ----------------------------------------------------------------- SVD++

TEST(SvdPlusPlus, ImplicitTermExamples)
{
    auto m = svdpp_model(2, 2, 2);
    m.q(0, 0) = 1.0;
    (*m.y)(1, 0) = 2.0;
    (*m.y)(1, 1) = 5.0;
    m.implicit_sets[0] = {1};
    EXPECT_DOUBLE_EQ(svdpp_implicit_predict(m, 0, 0), 2.0);
    EXPECT_EQ(svdpp_implicit_predict(m, 1, 0), 0.0);
    for (double& x : m.y->data())
        x *= 2;
    EXPECT_DOUBLE_EQ(svdpp_implicit_predict(m, 0, 0), 4.0);
}

TEST(SvdPlusPlus, PredictExample)
{
    auto m = svdpp_model(1, 2, 2);
    m.mu = 3.0;
    m.user_bias[0] = 0.1;
    m.item_bias[0] = -0.2;
    m.q(0, 0) = 1.0;
    m.p(0, 0) = 0.5;
    m.implicit_sets[0] = {1};
    (*m.y)(1, 0) = 0.3;
    EXPECT_NEAR(svdpp_predict(m, 0, 0), 3.7, 1e-12);
}

TEST(SvdPlusPlus, ZeroModelPredictsMean)
{
    auto m = svdpp_model(3, 3, 2);
    m.mu = 3.4;
    for (std::size_t u = 0; u < 3; ++u)
        for (std::size_t i = 0; i < 3; ++i)
            EXPECT_EQ(svdpp_predict(m, u, i), 3.4);
}

TEST(SvdPlusPlus, ZeroImplicitFactorsReduceToBiasedFunk)
{
    Rng rng(5);
    auto m = svdpp_model(3, 4, 2);
    m.mu = 3.1;
    fill_uniform(rng, m.p.data());
    fill_uniform(rng, m.q.data());
    fill_uniform(rng, m.user_bias);
    fill_uniform(rng, m.item_bias);
    m.implicit_sets = {{0, 2}, {1}, {}};
    for (std::size_t u = 0; u < 3; ++u)
        for (std::size_t i = 0; i < 4; ++i)
            EXPECT_NEAR(svdpp_predict(m, u, i),
                        m.mu + m.user_bias[u] + m.item_bias[i] + dot(m.p.row(u), m.q.row(i)), 1e-14);
}

TEST(SvdPlusPlus, ColdStartPath)
{
    auto m = svdpp_model(2, 2, 1);
    m.mu = 3.0;
    m.user_bias = {0.5, 0.0};
    m.item_bias = {-0.25, 0.0};
    const auto both = svdpp_predict(m, std::nullopt, std::nullopt);
    EXPECT_EQ(both.value, 3.0);
    EXPECT_EQ(both.flags, kPredictionColdStart);
    EXPECT_EQ(svdpp_predict(m, 0, std::nullopt).value, 3.5);
    EXPECT_EQ(svdpp_predict(m, std::nullopt, std::optional<std::size_t>(0)).value, 2.75);
}

TEST(SvdPlusPlus, InvariantToImplicitSetOrder)
{
    Rng rng(8);
    auto m = svdpp_model(1, 6, 3);
    fill_uniform(rng, m.p.data());
    fill_uniform(rng, m.q.data());
    fill_uniform(rng, m.y->data());
    m.implicit_sets[0] = {0, 1, 2, 3, 4, 5};
    const double base = svdpp_predict(m, 0, 2);
    m.implicit_sets[0] = {4, 1, 5, 0, 3, 2};
    EXPECT_NEAR(svdpp_predict(m, 0, 2), base, 1e-14);
}

TEST(SvdPlusPlus, GradientMatchesFiniteDifferences)
{
    Rng rng(202);
    for (int trial = 0; trial < 60; ++trial) {
        const auto prob = random_problem(rng);
        const double lambda = rng.uniform(0.0, 0.5);
        auto m = svdpp_model(prob.users, prob.items, prob.f);
        m.mu = rng.uniform(2.0, 4.0);
        fill_uniform(rng, m.p.data());
        fill_uniform(rng, m.q.data());
        fill_uniform(rng, m.y->data());
        fill_uniform(rng, m.user_bias);
        fill_uniform(rng, m.item_bias);
        for (const auto& r : prob.triples)
            m.implicit_sets[r.user].push_back(r.item);
        const auto g = svdpp_loss_gradient(m, prob.triples, lambda);
        auto loss = [&] { return svdpp_loss(m, prob.triples, lambda); };
        expect_gradient(loss, m.p.data(), g.p.data(), 1e-4, "P");
        expect_gradient(loss, m.q.data(), g.q.data(), 1e-4, "Q");
        expect_gradient(loss, m.y->data(), g.y->data(), 1e-4, "Y");
        expect_gradient(loss, m.user_bias, g.user_bias, 1e-4, "b_u");
        expect_gradient(loss, m.item_bias, g.item_bias, 1e-4, "b_i");
    }
}

TEST(SvdPlusPlus, SingleStepMovesAgainstGradient)
{
    auto m = svdpp_model(1, 2, 2);
    m.mu = 3.0;
    m.p(0, 0) = 0.3;
    m.q(0, 1) = 0.4;
    (*m.y)(1, 1) = 0.2;
    m.implicit_sets[0] = {0, 1};
    const std::vector<Rating> one{{0, 0, 4.0, {}}};
    TrainConfig cfg;
    cfg.factors = 2;
    cfg.alpha = 0.01;
    cfg.lambda = 0.0;
    cfg.epochs = 1;
    const auto g = svdpp_loss_gradient(m, one, 0.0);
    const auto after = svdpp_train_from(m, one, cfg).model;
    // The trainer steps along half the squared-error gradient.
    EXPECT_NEAR(after.user_bias[0], m.user_bias[0] - 0.01 * 0.5 * g.user_bias[0], 1e-15);
    EXPECT_NEAR(after.item_bias[0], m.item_bias[0] - 0.01 * 0.5 * g.item_bias[0], 1e-15);
    for (std::size_t k = 0; k < 2; ++k) {
        EXPECT_NEAR(after.p(0, k), m.p(0, k) - 0.01 * 0.5 * g.p(0, k), 1e-15);
        EXPECT_NEAR(after.q(0, k), m.q(0, k) - 0.01 * 0.5 * g.q(0, k), 1e-15);
        EXPECT_NEAR((*after.y)(1, k), (*m.y)(1, k) - 0.01 * 0.5 * (*g.y)(1, k), 1e-15);
    }
}

TEST(SvdPlusPlus, FrozenImplicitMatchesBiasedFunkLoop)
{
    const auto ds = fixtures::rank2(10, 8, 0.6, 4);
    TrainConfig cfg;
    cfg.factors = 2;
    cfg.alpha = 0.01;
    cfg.lambda = 0.03;
    cfg.epochs = 10;
    cfg.seed = 11;
    cfg.freeze_implicit = true;
    const auto trained = svdpp_train(ds, cfg).model;
    for (double y : trained.y->data())
        EXPECT_EQ(y, 0.0);

    // Hand-coded biased Funk-SVD.
    auto st = oracles::funk_init(ds.num_users(), ds.num_items(), 2, 11);
    std::vector<double> bu(ds.num_users(), 0.0), bi(ds.num_items(), 0.0);
    const double mu = ds.mean_rating();
    const double a = cfg.alpha;
    const double l = cfg.lambda;
    for (std::size_t e = 0; e < cfg.epochs; ++e)
        for (const auto& r : ds.ratings()) {
            double* p = &st.p[r.user * 2];
            double* q = &st.q[r.item * 2];
            double inter = 0.0;
            for (std::size_t k = 0; k < 2; ++k)
                inter += q[k] * p[k];
            const double err = r.value - (mu + bu[r.user] + bi[r.item] + inter);
            double step_q[2];
            for (std::size_t k = 0; k < 2; ++k)
                step_q[k] = p[k] * err - l * q[k];
            bu[r.user] += a * (err - l * bu[r.user]);
            bi[r.item] += a * (err - l * bi[r.item]);
            for (std::size_t k = 0; k < 2; ++k) {
                p[k] += a * (err * q[k] - l * p[k]);
                q[k] += a * step_q[k];
            }
        }
    for (std::size_t k = 0; k < st.p.size(); ++k)
        ASSERT_EQ(trained.p.data()[k], st.p[k]);
    for (std::size_t k = 0; k < st.q.size(); ++k)
        ASSERT_EQ(trained.q.data()[k], st.q[k]);
    for (std::size_t u = 0; u < bu.size(); ++u)
        ASSERT_EQ(trained.user_bias[u], bu[u]);
    for (std::size_t i = 0; i < bi.size(); ++i)
        ASSERT_EQ(trained.item_bias[i], bi[i]);
}

TEST(SvdPlusPlus, LearnsOwnSynthetic)
{
    const auto ds = fixtures::svdpp_synthetic();
    const auto parts = split(ds, 0.2, 42);
    TrainConfig cfg;
    cfg.factors = 2;
    cfg.alpha = 0.01;
    cfg.lambda = 0.02;
    cfg.epochs = 300;
    const auto m = svdpp_train(parts.train, cfg).model;
    EXPECT_LT(rmse_on(m, parts.test.ratings()), 0.15);
}

TEST(SvdPlusPlus, InitFollowsFunkStream)
{
    const auto ds = fixtures::rank2(6, 5, 0.8, 2);
    const auto funk = init_funk_model(ds.num_users(), ds.num_items(), 3, 9);
    const auto pp = init_svdpp_model(ds, 3, 9);
    EXPECT_EQ(pp.p.data()[0], funk.p.data()[0]);
    EXPECT_EQ(pp.q.data().back(), funk.q.data().back());
    EXPECT_DOUBLE_EQ(pp.mu, ds.mean_rating());
    for (double b : pp.user_bias)
        EXPECT_EQ(b, 0.0);
    for (double y : pp.y->data()) {
        EXPECT_GE(y, 0.0);
        EXPECT_LT(y, 1.0 / std::sqrt(3.0));
    }
    EXPECT_NO_THROW(pp.validate());
}
