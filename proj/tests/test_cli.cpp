#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fixtures.hpp"

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp(const std::string& name) { return ::testing::TempDir() + "/recfact_cli_" + name; }

Result run(const std::string& args)
{
    const std::string out = tmp("stdout.txt");
    const std::string err = tmp("stderr.txt");
    const std::string cmd = std::string(RECFACT_CLI) + " " + args + " >" + out + " 2>" + err;
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string worked_model()
{
    const std::string model = tmp("worked.json");
    const auto r = run("train --algo svd --similarity-mode paper-dot --input " + fixtures::path("worked_ratings.csv") +
                       " -o " + model);
    EXPECT_EQ(r.code, 0) << r.err;
    return model;
}

void write_dataset(const recfact::RatingDataset& ds, const std::string& path)
{
    std::ofstream out(path);
    recfact::write_csv(out, ds);
}

} // namespace

TEST(Cli, PredictWorkedExampleCell)
{
    const auto model = worked_model();
    const auto r = run("predict -m " + model + " 3 2");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "1.40 (rounded: 1)\n");
}

TEST(Cli, PredictKnownPairReproducesFit)
{
    const auto model = worked_model();
    const auto r = run("predict -m " + model + " 1 1 --precision 6");
    EXPECT_EQ(r.code, 0);
    EXPECT_FALSE(r.out.empty());
}

TEST(Cli, ArgumentErrorsExitTwo)
{
    const auto missing = run("train --algo funk");
    EXPECT_EQ(missing.code, 2);
    EXPECT_NE(missing.err.find("--input"), std::string::npos);
    EXPECT_NE(missing.err.find("Usage"), std::string::npos);

    EXPECT_EQ(run("train --input " + fixtures::path("worked_ratings.csv")).code, 2);
    EXPECT_EQ(run("").code, 2);
    const auto typo = run("train --algo funk --factorz 3 --input " + fixtures::path("worked_ratings.csv"));
    EXPECT_EQ(typo.code, 2);

    const auto bad_value = run("train --algo funk --alpha -1 --input " + fixtures::path("worked_ratings.csv") + " -o " +
                               tmp("unused.json"));
    EXPECT_EQ(bad_value.code, 2);
}

TEST(Cli, UnknownUserExitsThree)
{
    const auto model = worked_model();
    const auto r = run("predict -m " + model + " 99 2");
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("99"), std::string::npos);
}

TEST(Cli, BadDataExitsThree)
{
    const auto r = run("train --algo funk --input " + fixtures::path("bad_ratings.csv") + " -o " + tmp("bad.json"));
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
    EXPECT_EQ(run("train --algo funk --input " + tmp("does_not_exist.csv")).code, 3);
}

TEST(Cli, DivergenceExitsFour)
{
    const auto r = run("train --algo funk --alpha 100 --epochs 50 --input " + fixtures::path("worked_ratings.csv") +
                       " -o " + tmp("div.json"));
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("alpha"), std::string::npos);
}

TEST(Cli, Recommend)
{
    const auto model = worked_model();
    EXPECT_EQ(run("recommend -m " + model + " 4 --k 0").code, 2);
    const auto r = run("recommend -m " + model + " 4 --k 2");
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string a, b, extra;
    ASSERT_TRUE(std::getline(lines, a));
    ASSERT_TRUE(std::getline(lines, b));
    EXPECT_FALSE(std::getline(lines, extra));
    EXPECT_EQ(a.rfind("1\t", 0), 0u);
    EXPECT_EQ(b.rfind("2\t", 0), 0u);

    // A fully rated user gets an empty list.
    const std::string full = tmp("full.csv");
    {
        std::ofstream out(full);
        out << "a,x,3\na,y,4\nb,x,5\n";
    }
    const std::string m2 = tmp("full.json");
    ASSERT_EQ(run("train --algo itemcf --input " + full + " -o " + m2).code, 0);
    const auto none = run("recommend -m " + m2 + " a --k 3");
    EXPECT_EQ(none.code, 0);
    EXPECT_EQ(none.out, "");
}

TEST(Cli, FunkOnSyntheticEvaluates)
{
    const auto ds = fixtures::rank2();
    const std::string all = tmp("rank2.csv");
    write_dataset(ds, all);
    const std::string tr = tmp("rank2_train.csv");
    const std::string te = tmp("rank2_test.csv");
    ASSERT_EQ(run("split --input " + all + " --holdout 0.2 --seed 42 --train-out " + tr + " --test-out " + te).code, 0);
    const std::string model = tmp("funk.json");
    const auto t = run("train --algo funk --factors 2 --epochs 200 --input " + tr + " -o " + model);
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_NE(t.err.find("epoch 200"), std::string::npos);

    const auto e = run("evaluate -m " + model + " --test " + te + " --k 5,10 --json");
    ASSERT_EQ(e.code, 0) << e.err;
    const auto doc = nlohmann::json::parse(e.out);
    EXPECT_LT(doc["rmse"].get<double>(), 0.1);
    ASSERT_EQ(doc["topn"].size(), 2u);
    EXPECT_EQ(doc["topn"][0]["k"], 5);
    EXPECT_EQ(doc["topn"][1]["k"], 10);

    const auto table = run("evaluate -m " + model + " --test " + te + " --k 5,10");
    EXPECT_NE(table.out.find("precision@5"), std::string::npos);
    EXPECT_NE(table.out.find("recall@10"), std::string::npos);

    // Evaluating on training data lands near the training fit.
    const auto self = run("evaluate -m " + model + " --test " + tr + " --json");
    EXPECT_LT(nlohmann::json::parse(self.out)["rmse"].get<double>(), 0.1);
}

TEST(Cli, EmptyTestExitsThree)
{
    const auto model = worked_model();
    EXPECT_EQ(run("evaluate -m " + model + " --test " + fixtures::path("empty.csv")).code, 3);
}

TEST(Cli, DeterministicModelFiles)
{
    const std::string a = tmp("det_a.json");
    const std::string b = tmp("det_b.json");
    const std::string in = fixtures::path("worked_ratings.csv");
    ASSERT_EQ(run("train --algo svdpp --factors 2 --epochs 10 --input " + in + " -o " + a).code, 0);
    ASSERT_EQ(run("train --algo svdpp --factors 2 --epochs 10 --input " + in + " -o " + b).code, 0);
    auto da = nlohmann::json::parse(slurp(a));
    auto db = nlohmann::json::parse(slurp(b));
    da.erase("created");
    db.erase("created");
    EXPECT_EQ(da.dump(), db.dump());
}

TEST(Cli, ConfigFileAndOverride)
{
    const std::string cfg = tmp("run.cfg");
    {
        std::ofstream out(cfg);
        out << "# funk settings\nalgo = funk\nfactors = 2\nepochs = 3\n";
    }
    const auto r = run("train --config " + cfg + " --epochs 5 --input " + fixtures::path("worked_ratings.csv") + " -o " +
                       tmp("cfg.json"));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("epoch 5"), std::string::npos);
    EXPECT_EQ(r.err.find("epoch 6"), std::string::npos);
}

TEST(Cli, Ensembles)
{
    const auto svd = worked_model();
    const std::string in = fixtures::path("worked_ratings.csv");
    const std::string funk = tmp("ens_funk.json");
    ASSERT_EQ(run("train --algo funk --factors 2 --input " + in + " -o " + funk).code, 0);

    const std::string blend1 = tmp("blend1.json");
    ASSERT_EQ(run("ensemble blend --models " + svd + " --weights 1 -o " + blend1).code, 0);
    EXPECT_EQ(run("predict -m " + blend1 + " 3 2").out, run("predict -m " + svd + " 3 2").out);

    const std::string vote = tmp("vote.json");
    EXPECT_EQ(run("ensemble vote --models " + svd + "," + funk + " -o " + vote).code, 0);
    EXPECT_EQ(run("recommend -m " + vote + " 4 --k 2").code, 0);

    const std::string stack = tmp("stack.json");
    const auto s = run("ensemble stack --models " + svd + "," + funk + " --holdout " + in + " -o " + stack);
    ASSERT_EQ(s.code, 0) << s.err;
    const auto doc = nlohmann::json::parse(slurp(stack));
    EXPECT_EQ(doc["ensemble"]["kind"], "stack");
    EXPECT_EQ(doc["ensemble"]["weights"].size(), 2u);
    EXPECT_TRUE(doc["ensemble"].contains("intercept"));

    const std::string bag = tmp("bag.json");
    EXPECT_EQ(run("ensemble bag --algo funk --factors 2 --epochs 5 -B 3 --input " + in + " -o " + bag).code, 0);

    // Members over different id maps.
    const std::string other_csv = tmp("other.csv");
    {
        std::ofstream out(other_csv);
        out << "a,x,3\nb,y,4\na,y,5\n";
    }
    const std::string other = tmp("other.json");
    ASSERT_EQ(run("train --algo itemcf --input " + other_csv + " -o " + other).code, 0);
    EXPECT_EQ(run("ensemble blend --models " + svd + "," + other + " -o " + tmp("bad_blend.json")).code, 3);
}

TEST(Cli, ImplicitTraining)
{
    const std::string csv = tmp("implicit.csv");
    {
        std::ofstream out(csv);
        for (int u = 0; u < 8; ++u)
            for (int i = 0; i < 10; ++i)
                if ((u * 7 + i * 3) % 4 == 0)
                    out << "u" << u << ",i" << i << ",1\n";
    }
    for (const char* algo : {"funk", "svdpp", "itemcf", "fm", "ffm"}) {
        const std::string model = tmp(std::string("implicit_") + algo + ".json");
        const auto r = run(std::string("train --kind implicit --factors 2 --epochs 5 --algo ") + algo + " --input " +
                           csv + " -o " + model);
        EXPECT_EQ(r.code, 0) << algo << ": " << r.err;
        EXPECT_EQ(run("recommend -m " + model + " u0 --k 3").code, 0) << algo;
    }
}
