#include "shortclass/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "shortclass/common.hpp"

namespace shortclass::metrics {

namespace {

void check_binary(const std::vector<int>& v, const char* name) {
    for (int x : v)
        if (x != 0 && x != 1)
            throw DataError(std::string(name) + " contains a non-binary value");
}

}  // namespace

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true,
                                 const std::vector<int>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw DataError("confusion_matrix: length mismatch");
    check_binary(y_true, "y_true");
    check_binary(y_pred, "y_pred");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] == 1) {
            if (y_pred[i] == 1)
                ++cm.tp;
            else
                ++cm.fn;
        } else {
            if (y_pred[i] == 1)
                ++cm.fp;
            else
                ++cm.tn;
        }
    }
    return cm;
}

namespace {

double roc_auc_rank(const std::vector<int>& y_true, const std::vector<double>& scores) {
    const std::size_t n = y_true.size();
    std::size_t n_pos = 0;
    for (int y : y_true) n_pos += (y == 1);
    std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return 0.5;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // mid-ranks over tied score groups
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        double mid_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t t = i; t < j; ++t)
            if (y_true[order[t]] == 1) pos_rank_sum += mid_rank;
        i = j;
    }
    double np = static_cast<double>(n_pos);
    double nn = static_cast<double>(n_neg);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * nn);
}

// Average precision: sum of precision at each distinct-score threshold,
// weighted by the recall increment it contributes.
double average_precision(const std::vector<int>& y_true, const std::vector<double>& scores) {
    const std::size_t n = y_true.size();
    std::size_t n_pos = 0;
    for (int y : y_true) n_pos += (y == 1);
    if (n_pos == 0) return 0.0;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    double prev_recall = 0.0;
    std::size_t tp = 0, taken = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        for (std::size_t t = i; t < j; ++t) {
            ++taken;
            if (y_true[order[t]] == 1) ++tp;
        }
        double precision = static_cast<double>(tp) / static_cast<double>(taken);
        double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

}  // namespace

EvaluationReport compute_report(const std::vector<int>& y_true,
                                const std::vector<int>& y_pred,
                                const std::vector<double>& scores) {
    if (y_true.size() != scores.size())
        throw DataError("compute_report: scores length mismatch");
    ConfusionMatrix cm = confusion_matrix(y_true, y_pred);

    EvaluationReport r;
    const double tp = static_cast<double>(cm.tp);
    const double fp = static_cast<double>(cm.fp);
    const double fn = static_cast<double>(cm.fn);
    const double tn = static_cast<double>(cm.tn);
    const double total = tp + fp + fn + tn;
    if (total == 0.0) throw DataError("compute_report: empty input");

    r.accuracy = (tp + tn) / total;
    if (tp + fp > 0.0)
        r.precision = tp / (tp + fp);
    else
        r.precision_degenerate = true;
    if (tp + fn > 0.0)
        r.recall = tp / (tp + fn);
    else
        r.recall_degenerate = true;
    if (r.precision + r.recall > 0.0)
        r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
    else
        r.f1_degenerate = true;

    double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    r.mcc = denom > 0.0 ? (tp * tn - fp * fn) / std::sqrt(denom) : 0.0;

    r.roc_auc = roc_auc_rank(y_true, scores);
    r.pr_auc = average_precision(y_true, scores);
    return r;
}

double cohen_kappa(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    if (labels_a.size() != labels_b.size())
        throw DataError("cohen_kappa: length mismatch");
    if (labels_a.empty()) throw DataError("cohen_kappa: empty input");
    check_binary(labels_a, "labels_a");
    check_binary(labels_b, "labels_b");

    const double n = static_cast<double>(labels_a.size());
    double agree = 0.0;
    double a1 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        if (labels_a[i] == labels_b[i]) ++agree;
        a1 += labels_a[i];
        b1 += labels_b[i];
    }
    double po = agree / n;
    double pa1 = a1 / n, pb1 = b1 / n;
    double pe = pa1 * pb1 + (1.0 - pa1) * (1.0 - pb1);
    if (pe >= 1.0) {
        if (po >= 1.0) return 1.0;
        throw NumericError("cohen_kappa undefined: chance agreement is 1 with disagreements");
    }
    return (po - pe) / (1.0 - pe);
}

ContingencyTable contingency_table(const std::vector<int>& y_true,
                                   const std::vector<int>& pred_model1,
                                   const std::vector<int>& pred_model2) {
    if (y_true.size() != pred_model1.size() || y_true.size() != pred_model2.size())
        throw DataError("contingency_table: length mismatch");
    ContingencyTable t;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        bool ok1 = pred_model1[i] == y_true[i];
        bool ok2 = pred_model2[i] == y_true[i];
        if (ok1 && ok2)
            ++t.n11;
        else if (!ok1 && !ok2)
            ++t.n00;
        else if (!ok1)
            ++t.n01;
        else
            ++t.n10;
    }
    return t;
}

double chi2_1df_survival(double x) {
    if (x <= 0.0) return 1.0;
    return std::erfc(std::sqrt(x / 2.0));
}

McNemarResult mcnemar_test(const ContingencyTable& table) {
    const double d01 = static_cast<double>(table.n01);
    const double d10 = static_cast<double>(table.n10);
    if (table.n01 + table.n10 == 0)
        throw DataError("mcnemar_test undefined: no discordant pairs");
    McNemarResult res;
    res.statistic = (d01 - d10) * (d01 - d10) / (d01 + d10);
    res.p_value = chi2_1df_survival(res.statistic);
    res.reject_at_0_05 = res.statistic > 3.841;
    return res;
}

}  // namespace shortclass::metrics
