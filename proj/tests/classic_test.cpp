#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "shortclass/classic.hpp"
#include "shortclass/common.hpp"

using namespace shortclass;
using namespace shortclass::classic;

namespace {

FeatureMatrix dense_to_matrix(const std::vector<std::vector<double>>& rows,
                              Representation rep = Representation::counts) {
    FeatureMatrix m;
    m.rep = rep;
    m.n_cols = rows.empty() ? 0 : rows[0].size();
    for (const auto& r : rows) {
        kernels::SparseRow sparse;
        for (std::size_t j = 0; j < r.size(); ++j)
            if (r[j] != 0.0) sparse.emplace_back(static_cast<std::uint32_t>(j), r[j]);
        m.rows.push_back(std::move(sparse));
    }
    return m;
}

}  // namespace

TEST_CASE("lexicon classifier") {
    Lexicon lex = published_lexicon();
    CHECK(lexicon_classify({"globalwarming", "is", "real"}, lex) == 1);
    CHECK(lexicon_classify({"vaccines", "save", "lives"}, lex) == 0);

    Lexicon two = lex;
    two.min_matches = 2;
    CHECK(lexicon_classify({"climate", "talks", "today"}, two) == 0);
    CHECK(lexicon_classify({"climate", "climatechange", "now"}, two) == 1);

    LexiconModel model(lex);
    auto pred = model.classify_tokens({{"climate"}, {"nothing", "here"}});
    CHECK(pred.labels == std::vector<int>{1, 0});
    CHECK(pred.scores == std::vector<double>{1.0, 0.0});
}

TEST_CASE("logreg: separable data reaches perfect training accuracy") {
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
        rows.push_back({-1.0});
        y.push_back(0);
        rows.push_back({+1.0});
        y.push_back(1);
    }
    FeatureMatrix x = dense_to_matrix(rows);
    LogRegConfig cfg;
    cfg.l2_strength = 1e-6;
    cfg.max_iter = 500;
    auto model = train_logreg(x, y, cfg);
    auto pred = model->classify(x);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(pred.labels[i] == y[i]);
}

TEST_CASE("logreg: zero weights score sigmoid(bias)") {
    LogRegModel model({0.0, 0.0}, 0.0, FeatureKind::counts);
    FeatureMatrix x = dense_to_matrix({{3.0, 1.0}, {0.0, 0.0}});
    auto scores = model.decision_scores(x);
    CHECK(scores[0] == doctest::Approx(0.5));
    CHECK(scores[1] == doctest::Approx(0.5));
    // boundary convention: score exactly at threshold goes positive
    auto pred = model.classify(x);
    CHECK(pred.labels == std::vector<int>{1, 1});
}

TEST_CASE("logreg loss matches a dense grid-search oracle within 1e-2") {
    // symmetric two-feature toy set so the optimal bias is zero
    std::vector<std::vector<double>> rows = {{1.0, 0.2},  {0.8, -0.1}, {1.2, 0.4},
                                             {-1.0, -0.2}, {-0.8, 0.1}, {-1.2, -0.4}};
    std::vector<int> y = {1, 1, 1, 0, 0, 0};
    FeatureMatrix x = dense_to_matrix(rows);
    const double l2 = 0.1;

    double grid_best = 1e300;
    for (int i = -50; i <= 50; ++i) {
        for (int j = -50; j <= 50; ++j) {
            double w1 = 0.1 * i, w2 = 0.1 * j;
            grid_best = std::min(grid_best, logreg_loss(x, y, {w1, w2}, 0.0, l2));
        }
    }

    LogRegConfig cfg;
    cfg.l2_strength = l2;
    cfg.learning_rate = 1.0;
    cfg.max_iter = 2000;
    cfg.tol = 1e-12;
    auto model = train_logreg(x, y, cfg);
    double trained = logreg_loss(x, y, model->weights(), model->bias(), l2);
    CHECK(trained <= grid_best + 1e-2);
}

TEST_CASE("logreg stationarity: gradient inf-norm below 10*tol at the solution") {
    std::vector<std::vector<double>> rows = {{0.5, 1.0}, {1.0, 0.0},  {-0.5, -1.0},
                                             {-1.0, 0.2}, {0.3, -0.4}, {0.9, 0.9}};
    std::vector<int> y = {1, 1, 0, 0, 0, 1};
    FeatureMatrix x = dense_to_matrix(rows);
    LogRegConfig cfg;
    cfg.l2_strength = 0.05;
    cfg.learning_rate = 1.0;
    cfg.max_iter = 20000;
    cfg.tol = 1e-12;
    auto model = train_logreg(x, y, cfg);

    // analytic gradient at the returned weights
    const auto& w = model->weights();
    double b = model->bias();
    std::vector<double> grad(w.size(), 0.0);
    double gb = 0.0;
    for (std::size_t i = 0; i < x.n_rows(); ++i) {
        double z = b;
        for (const auto& [j, v] : x.rows[i]) z += w[j] * v;
        double err = 1.0 / (1.0 + std::exp(-z)) - y[i];
        for (const auto& [j, v] : x.rows[i]) grad[j] += err * v;
        gb += err;
    }
    double n = static_cast<double>(x.n_rows());
    double inf_norm = std::abs(gb) / n;
    for (std::size_t j = 0; j < w.size(); ++j)
        inf_norm = std::max(inf_norm, std::abs(grad[j] / n + cfg.l2_strength * w[j]));
    CHECK(inf_norm < 1e-5);
}

TEST_CASE("logreg rejects shape mismatch") {
    FeatureMatrix x = dense_to_matrix({{1.0}});
    CHECK_THROWS_AS(train_logreg(x, {1, 0}, LogRegConfig{}), DataError);
}

TEST_CASE("svm: separable blobs reach 100% accuracy with positive margins") {
    Rng rng(41);
    std::normal_distribution<double> noise(0.0, 0.3);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
        rows.push_back({2.0 + noise(rng), 2.0 + noise(rng)});
        y.push_back(1);
        rows.push_back({-2.0 + noise(rng), -2.0 + noise(rng)});
        y.push_back(0);
    }
    FeatureMatrix x = dense_to_matrix(rows);
    SvmConfig cfg;
    cfg.c = 10.0;
    cfg.epochs = 60;
    cfg.seed = 1;
    auto model = train_linear_svm(x, y, cfg);
    auto pred = model->classify(x);
    for (std::size_t i = 0; i < y.size(); ++i) {
        CHECK(pred.labels[i] == y[i]);
        double yy = y[i] == 1 ? 1.0 : -1.0;
        CHECK(yy * pred.scores[i] > 0.0);
    }
}

TEST_CASE("svm: weights shrink monotonically as C decreases") {
    Rng rng(42);
    std::normal_distribution<double> noise(0.0, 0.5);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        rows.push_back({1.0 + noise(rng)});
        y.push_back(1);
        rows.push_back({-1.0 + noise(rng)});
        y.push_back(0);
    }
    FeatureMatrix x = dense_to_matrix(rows);
    double prev_norm = 1e300;
    for (double c : {10.0, 1.0, 0.1, 0.01, 0.001}) {
        SvmConfig cfg;
        cfg.c = c;
        cfg.epochs = 40;
        cfg.seed = 7;
        auto model = train_linear_svm(x, y, cfg);
        double norm = 0.0;
        for (double w : model->weights()) norm += w * w;
        norm = std::sqrt(norm);
        CHECK(norm < prev_norm);
        prev_norm = norm;
    }
}

TEST_CASE("svm objective lands within 1% of a dense grid minimum") {
    // 20-point one-dimensional instance with overlap
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    Rng rng(43);
    std::normal_distribution<double> noise(0.0, 0.6);
    for (int i = 0; i < 10; ++i) {
        rows.push_back({1.0 + noise(rng)});
        y.push_back(1);
        rows.push_back({-1.0 + noise(rng)});
        y.push_back(0);
    }
    FeatureMatrix x = dense_to_matrix(rows);
    const double c = 1.0;

    double grid_best = 1e300;
    for (int wi = -400; wi <= 400; ++wi) {
        for (int bi = -150; bi <= 150; ++bi) {
            double w = 0.01 * wi, b = 0.01 * bi;
            grid_best = std::min(grid_best, svm_objective(x, y, {w}, b, c));
        }
    }

    SvmConfig cfg;
    cfg.c = c;
    cfg.epochs = 400;
    cfg.seed = 3;
    auto model = train_linear_svm(x, y, cfg);
    double trained = svm_objective(x, y, model->weights(), model->bias(), c);
    CHECK(trained <= grid_best * 1.01 + 1e-9);
}

TEST_CASE("multinomial nb: laplace-smoothed likelihoods by hand") {
    // corpus {("a a", 1), ("b", 0)}, alpha = 1, V = 2
    FeatureMatrix x = dense_to_matrix({{2.0, 0.0}, {0.0, 1.0}});
    std::vector<int> y = {1, 0};
    auto model = train_multinomial_nb(x, y, 1.0);
    // p(a|1) = (2+1)/(2+2) = 0.75
    CHECK(std::exp(model->log_lik_pos()[0]) == doctest::Approx(0.75));
    CHECK(std::exp(model->log_lik_pos()[1]) == doctest::Approx(0.25));
    CHECK(std::exp(model->log_prior_pos()) == doctest::Approx(0.5));
}

TEST_CASE("multinomial nb: symmetric classes give posterior one half") {
    FeatureMatrix x = dense_to_matrix({{1.0, 1.0}, {1.0, 1.0}});
    std::vector<int> y = {1, 0};
    auto model = train_multinomial_nb(x, y, 1.0);
    FeatureMatrix q = dense_to_matrix({{3.0, 1.0}});
    CHECK(model->decision_scores(q)[0] == doctest::Approx(0.5));
}

TEST_CASE("multinomial nb: unseen tokens keep nonzero probability") {
    FeatureMatrix x = dense_to_matrix({{2.0, 0.0, 0.0}, {0.0, 1.0, 0.0}});
    std::vector<int> y = {1, 0};
    auto model = train_multinomial_nb(x, y, 1.0);
    // feature 2 never appears in training; the smoothed floor applies
    CHECK(std::exp(model->log_lik_pos()[2]) > 0.0);
    FeatureMatrix q = dense_to_matrix({{0.0, 0.0, 5.0}});
    double p = model->decision_scores(q)[0];
    CHECK(p > 0.0);
    CHECK(p < 1.0);
}

TEST_CASE("multinomial nb: posteriors sum to one") {
    Rng rng(44);
    std::uniform_real_distribution<double> unit(0.0, 3.0);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 30; ++i) {
        rows.push_back({std::floor(unit(rng)), std::floor(unit(rng)), std::floor(unit(rng))});
        y.push_back(i % 2);
    }
    FeatureMatrix x = dense_to_matrix(rows);
    auto model = train_multinomial_nb(x, y, 0.7);
    for (const auto& row : x.rows) {
        double s_pos = model->log_prior_pos(), s_neg = model->log_prior_neg();
        for (const auto& [j, v] : row) {
            s_pos += v * model->log_lik_pos()[j];
            s_neg += v * model->log_lik_neg()[j];
        }
        double hi = std::max(s_pos, s_neg);
        double lse = hi + std::log(std::exp(s_pos - hi) + std::exp(s_neg - hi));
        double p1 = std::exp(s_pos - lse), p0 = std::exp(s_neg - lse);
        CHECK(std::abs(p1 + p0 - 1.0) <= 1e-12);
    }
}

TEST_CASE("multinomial nb input validation") {
    FeatureMatrix tfidf = dense_to_matrix({{0.5}, {1.0}}, Representation::tfidf);
    CHECK_THROWS_AS(train_multinomial_nb(tfidf, {1, 0}, 1.0), DataError);

    FeatureMatrix x = dense_to_matrix({{1.0}, {2.0}});
    CHECK_THROWS_AS(train_multinomial_nb(x, {1, 1}, 1.0), DataError);  // class absent
    CHECK_THROWS_AS(train_multinomial_nb(x, {1, 0}, 0.0), DataError);  // alpha
}

TEST_CASE("knn: nearest self and majority vote") {
    FeatureMatrix x = dense_to_matrix({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {5.0, 5.0}});
    std::vector<int> y = {1, 1, 0, 0};
    CHECK(knn_predict(x, y, x.rows[0], 1) == 1);
    CHECK(knn_predict(x, y, x.rows[3], 1) == 0);
    // neighbors of (0,0) at k=3: itself(1), (1,0)->1, (0,1)->0, majority 1
    CHECK(knn_predict(x, y, x.rows[0], 3) == 1);

    CHECK_THROWS_AS(knn_predict(x, y, x.rows[0], 2), DataError);  // even k
    FeatureMatrix empty;
    CHECK_THROWS_AS(knn_predict(empty, {}, x.rows[0], 1), DataError);
}

TEST_CASE("knn agrees with an exhaustive-sort oracle on fuzzed queries") {
    Rng rng(45);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
        rows.push_back({unit(rng), unit(rng), unit(rng)});
        y.push_back(i % 2);
    }
    FeatureMatrix x = dense_to_matrix(rows);
    KnnModel model(x, y, 5);

    for (int q = 0; q < 500; ++q) {
        std::vector<double> query = {unit(rng), unit(rng), unit(rng)};
        FeatureMatrix qm = dense_to_matrix({query});

        // oracle: full sort by (distance, index)
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            double d = 0.0;
            for (std::size_t j = 0; j < 3; ++j)
                d += (rows[i][j] - query[j]) * (rows[i][j] - query[j]);
            dist.emplace_back(d, i);
        }
        std::sort(dist.begin(), dist.end());
        int votes = 0;
        for (int i = 0; i < 5; ++i) votes += y[dist[i].second];
        int oracle_label = votes > 2 ? 1 : 0;

        auto pred = model.classify(qm);
        CHECK(pred.labels[0] == oracle_label);
        CHECK(pred.scores[0] == doctest::Approx(votes / 5.0));
        CHECK(knn_predict(x, y, qm.rows[0], 5) == oracle_label);
    }
}

TEST_CASE("rf: one unbagged deep tree memorizes consistent data") {
    Rng rng(46);
    std::uniform_real_distribution<double> unit(0.0, 4.0);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 60; ++i) {
        rows.push_back({std::floor(unit(rng)), std::floor(unit(rng))});
        y.push_back((rows.back()[0] + rows.back()[1] > 3.0) ? 1 : 0);
    }
    FeatureMatrix x = dense_to_matrix(rows);
    RandomForestConfig cfg;
    cfg.n_trees = 1;
    cfg.max_depth = 0;  // unlimited
    cfg.bootstrap = false;
    cfg.max_features = 2;
    auto model = train_random_forest(x, y, cfg);
    auto pred = model->classify(x);
    CHECK(pred.labels == y);
}

TEST_CASE("rf: replicated xor needs depth-2 interactions") {
    std::vector<std::vector<double>> base = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    std::vector<int> base_y = {0, 1, 1, 0};
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int rep = 0; rep < 25; ++rep)
        for (std::size_t i = 0; i < base.size(); ++i) {
            rows.push_back(base[i]);
            y.push_back(base_y[i]);
        }
    FeatureMatrix x = dense_to_matrix(rows);
    RandomForestConfig cfg;
    cfg.n_trees = 50;
    cfg.max_depth = 6;
    cfg.seed = 2;
    auto model = train_random_forest(x, y, cfg);
    auto pred = model->classify(x);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < y.size(); ++i) correct += (pred.labels[i] == y[i]);
    CHECK(static_cast<double>(correct) / static_cast<double>(y.size()) >= 0.95);
}

TEST_CASE("rf: single-class data always predicts that class") {
    FeatureMatrix x = dense_to_matrix({{1.0}, {2.0}, {3.0}});
    std::vector<int> y = {1, 1, 1};
    RandomForestConfig cfg;
    cfg.n_trees = 5;
    auto model = train_random_forest(x, y, cfg);
    auto pred = model->classify(x);
    CHECK(pred.labels == std::vector<int>{1, 1, 1});
}

TEST_CASE("rf: same seed gives identical forests") {
    Rng rng(47);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 50; ++i) {
        rows.push_back({unit(rng), unit(rng), unit(rng)});
        y.push_back(unit(rng) < 0.5 ? 0 : 1);
    }
    FeatureMatrix x = dense_to_matrix(rows);
    RandomForestConfig cfg;
    cfg.n_trees = 11;
    cfg.seed = 5;
    auto a = train_random_forest(x, y, cfg);
    auto b = train_random_forest(x, y, cfg);
    REQUIRE(a->trees().size() == b->trees().size());
    for (std::size_t t = 0; t < a->trees().size(); ++t) {
        const auto& ta = a->trees()[t].nodes;
        const auto& tb = b->trees()[t].nodes;
        REQUIRE(ta.size() == tb.size());
        for (std::size_t n = 0; n < ta.size(); ++n) {
            CHECK(ta[n].feature == tb[n].feature);
            CHECK(ta[n].threshold == tb[n].threshold);
            CHECK(ta[n].leaf_label == tb[n].leaf_label);
        }
    }
    CHECK(a->classify(x).scores == b->classify(x).scores);
}

TEST_CASE("rf: an exact vote tie goes to the negative class") {
    DecisionTree yes, no;
    yes.nodes.push_back({-1, 0.0, -1, -1, 1});
    no.nodes.push_back({-1, 0.0, -1, -1, 0});
    RandomForestModel model({yes, no}, 1, FeatureKind::counts);
    FeatureMatrix q = dense_to_matrix({{1.0}});
    auto pred = model.classify(q);
    CHECK(pred.scores[0] == doctest::Approx(0.5));
    CHECK(pred.labels[0] == 0);
}

TEST_CASE("classify: permutation and dimension contracts") {
    LogRegModel model({1.0, -1.0}, 0.1, FeatureKind::counts);
    FeatureMatrix x = dense_to_matrix({{1.0, 0.0}, {0.0, 2.0}, {3.0, 3.0}});
    auto p1 = classify(model, x);
    FeatureMatrix perm = dense_to_matrix({{3.0, 3.0}, {1.0, 0.0}, {0.0, 2.0}});
    auto p2 = classify(model, perm);
    CHECK(p1.scores[0] == p2.scores[1]);
    CHECK(p1.scores[2] == p2.scores[0]);
    CHECK(p1.labels[0] == p2.labels[1]);

    FeatureMatrix wrong = dense_to_matrix({{1.0}});
    CHECK_THROWS_AS(classify(model, wrong), DataError);

    FeatureMatrix tfidf = dense_to_matrix({{1.0, 0.0}}, Representation::tfidf);
    CHECK_THROWS_AS(classify(model, tfidf), DataError);  // representation mismatch
}

TEST_CASE("svm margin threshold sits at zero") {
    LinearSvmModel model({1.0}, 0.0, FeatureKind::counts);
    FeatureMatrix x = dense_to_matrix({{0.0}, {0.5}, {-0.5}});
    auto pred = model.classify(x);
    CHECK(pred.labels == std::vector<int>{1, 1, 0});  // score >= 0 is positive
}

TEST_CASE("rf: forests are identical regardless of the worker count") {
    Rng rng(48);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::vector<double>> rows;
    std::vector<int> y;
    for (int i = 0; i < 80; ++i) {
        rows.push_back({unit(rng), unit(rng), unit(rng), unit(rng)});
        y.push_back(unit(rng) < 0.4 ? 1 : 0);
    }
    FeatureMatrix x = dense_to_matrix(rows);
    RandomForestConfig cfg;
    cfg.n_trees = 9;
    cfg.seed = 3;
    set_workers(1);
    auto a = train_random_forest(x, y, cfg);
    set_workers(4);
    auto b = train_random_forest(x, y, cfg);
    set_workers(1);
    REQUIRE(a->trees().size() == b->trees().size());
    for (std::size_t t = 0; t < a->trees().size(); ++t) {
        REQUIRE(a->trees()[t].nodes.size() == b->trees()[t].nodes.size());
        for (std::size_t n = 0; n < a->trees()[t].nodes.size(); ++n) {
            CHECK(a->trees()[t].nodes[n].feature == b->trees()[t].nodes[n].feature);
            CHECK(a->trees()[t].nodes[n].threshold == b->trees()[t].nodes[n].threshold);
        }
    }
}
