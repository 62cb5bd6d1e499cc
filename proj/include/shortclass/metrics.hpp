#pragma once

#include <cstddef>
#include <vector>

namespace shortclass::metrics {

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fp + fn + tn; }
};

struct EvaluationReport {
    double accuracy = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    double roc_auc = 0.0;
    double pr_auc = 0.0;
    double mcc = 0.0;
    double training_time_s = 0.0;
    double execution_time_s = 0.0;
    // Set when a denominator was zero and the metric was reported as 0.
    bool precision_degenerate = false;
    bool recall_degenerate = false;
    bool f1_degenerate = false;
};

struct ContingencyTable {
    // n00: misclassified by both; n01: by model 1 only; n10: by model 2 only;
    // n11: correct by both.
    std::size_t n00 = 0;
    std::size_t n01 = 0;
    std::size_t n10 = 0;
    std::size_t n11 = 0;
};

struct McNemarResult {
    double statistic = 0.0;
    double p_value = 1.0;
    bool reject_at_0_05 = false;  // strict: statistic > 3.841
};

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true,
                                 const std::vector<int>& y_pred);

// scores must be monotone with confidence in class 1. ROC AUC uses the
// rank (Mann-Whitney) form with mid-rank tie correction; PR AUC is average
// precision.
EvaluationReport compute_report(const std::vector<int>& y_true,
                                const std::vector<int>& y_pred,
                                const std::vector<double>& scores);

double cohen_kappa(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

ContingencyTable contingency_table(const std::vector<int>& y_true,
                                   const std::vector<int>& pred_model1,
                                   const std::vector<int>& pred_model2);

McNemarResult mcnemar_test(const ContingencyTable& table);

// chi^2(1) survival function, via erfc.
double chi2_1df_survival(double x);

}  // namespace shortclass::metrics
