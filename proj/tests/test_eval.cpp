#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "recfact/error.hpp"
#include "recfact/eval.hpp"
#include "recfact/random.hpp"

using namespace recfact;

TEST(Metrics, Examples)
{
    const std::vector<double> truth{2, 5};
    EXPECT_EQ(rmse(truth, truth), 0.0);
    EXPECT_EQ(mae(truth, truth), 0.0);
    const std::vector<double> off{3, 6};
    EXPECT_DOUBLE_EQ(rmse(off, truth), 1.0);
    EXPECT_DOUBLE_EQ(mae(off, truth), 1.0);
    const std::vector<double> pred{1, 3};
    EXPECT_DOUBLE_EQ(rmse(pred, truth), std::sqrt(2.5));
    EXPECT_NEAR(rmse(pred, truth), 1.581, 1e-3);
    EXPECT_DOUBLE_EQ(mae(pred, truth), 1.5);
}

TEST(Metrics, Errors)
{
    const std::vector<double> none;
    const std::vector<double> one{1.0};
    const std::vector<double> two{1.0, 2.0};
    try {
        rmse(none, none);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kEmptyData);
    }
    EXPECT_THROW(mae(none, none), Error);
    EXPECT_THROW(rmse(one, two), Error);
    EXPECT_THROW(mae(two, one), Error);
}

TEST(Metrics, RmseDominatesMaeAndIgnoresOrder)
{
    Rng rng(3);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng.below(30);
        std::vector<double> p(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = rng.uniform(1, 5);
            y[i] = rng.uniform(1, 5);
        }
        const double r = rmse(p, y);
        const double a = mae(p, y);
        EXPECT_GE(r + 1e-12, a);
        EXPECT_GE(a, 0.0);
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i)
            order[i] = i;
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[rng.below(i)]);
        std::vector<double> ps(n), ys(n);
        for (std::size_t i = 0; i < n; ++i) {
            ps[i] = p[order[i]];
            ys[i] = y[order[i]];
        }
        EXPECT_NEAR(rmse(ps, ys), r, 1e-12);
        EXPECT_NEAR(mae(ps, ys), a, 1e-12);
    }
}

TEST(TopN, Examples)
{
    const auto exact = topn_metrics({{3, 1}}, {{1, 3}}, 2);
    EXPECT_EQ(exact.precision, 1.0);
    EXPECT_EQ(exact.recall, 1.0);
    EXPECT_EQ(exact.users, 1u);

    const auto miss = topn_metrics({{4, 5}}, {{1, 3}}, 2);
    EXPECT_EQ(miss.precision, 0.0);
    EXPECT_EQ(miss.recall, 0.0);

    const auto one_hit = topn_metrics({{9, 1, 7, 8, 6}}, {{1, 2}}, 5);
    EXPECT_DOUBLE_EQ(one_hit.precision, 0.2);
    EXPECT_DOUBLE_EQ(one_hit.recall, 0.5);
}

TEST(TopN, MacroAverageSkipsUsersWithoutPositives)
{
    // User 1 has no positives and does not count.
    const auto r = topn_metrics({{0, 1}, {2, 3}, {4, 5}}, {{0}, {}, {9}}, 2);
    EXPECT_EQ(r.users, 2u);
    EXPECT_DOUBLE_EQ(r.precision, (0.5 + 0.0) / 2);
    EXPECT_DOUBLE_EQ(r.recall, (1.0 + 0.0) / 2);
}

TEST(TopN, OnlyFirstKCountAndBounds)
{
    const auto r = topn_metrics({{7, 8, 1}}, {{1}}, 2);
    EXPECT_EQ(r.precision, 0.0);
    const auto shortlist = topn_metrics({{1}}, {{1, 2}}, 3);
    EXPECT_DOUBLE_EQ(shortlist.precision, 1.0 / 3.0);
    EXPECT_LE(shortlist.recall, 1.0);
}

TEST(TopN, Errors)
{
    EXPECT_THROW(topn_metrics({{1}}, {{}}, 1), Error);
    EXPECT_THROW(topn_metrics({{1}}, {{1}}, 0), Error);
}
