#include "shortclass/kernels.hpp"

#include <omp.h>

#include <atomic>
#include <cstdio>

#include "shortclass/common.hpp"

namespace shortclass {

namespace {
std::atomic<int> g_workers{1};
}

void set_workers(int n) {
    if (n < 1) n = 1;
    g_workers.store(n);
    omp_set_num_threads(n);
}

int workers() { return g_workers.load(); }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

}  // namespace shortclass

namespace shortclass::kernels {

namespace {
ExecMode g_mode = ExecMode::parallel;
}

void set_mode(ExecMode m) { g_mode = m; }
ExecMode mode() { return g_mode; }

void matmul_serial(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
        const double* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_parallel(const double* a, const double* b, double* c,
                     std::size_t m, std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double* ci = c + i * n;
        for (std::size_t j = 0; j < n; ++j) ci[j] = 0.0;
        const double* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n) {
    if (g_mode == ExecMode::parallel)
        matmul_parallel(a, b, c, m, k, n);
    else
        matmul_serial(a, b, c, m, k, n);
}

void matmul_add_serial(const double* a, const double* b, double* c,
                       std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * n;
        const double* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_add_parallel(const double* a, const double* b, double* c,
                         std::size_t m, std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double* ci = c + i * n;
        const double* ai = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = ai[p];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_add(const double* a, const double* b, double* c,
                std::size_t m, std::size_t k, std::size_t n) {
    if (g_mode == ExecMode::parallel)
        matmul_add_parallel(a, b, c, m, k, n);
    else
        matmul_add_serial(a, b, c, m, k, n);
}

void matmul_tn_add_serial(const double* a, const double* b, double* c,
                          std::size_t m, std::size_t k, std::size_t n) {
    // a stored [k x m]; c[i,j] += sum_p a[p,i] * b[p,j]
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[p * m + i];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_tn_add_parallel(const double* a, const double* b, double* c,
                            std::size_t m, std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double* ci = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[p * m + i];
            const double* bp = b + p * n;
            for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_tn_add(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n) {
    if (g_mode == ExecMode::parallel)
        matmul_tn_add_parallel(a, b, c, m, k, n);
    else
        matmul_tn_add_serial(a, b, c, m, k, n);
}

void matmul_nt_add_serial(const double* a, const double* b, double* c,
                          std::size_t m, std::size_t k, std::size_t n) {
    // b stored [n x k]; c[i,j] += sum_p a[i,p] * b[j,p]
    for (std::size_t i = 0; i < m; ++i) {
        double* ci = c + i * n;
        const double* ai = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] += acc;
        }
    }
}

void matmul_nt_add_parallel(const double* a, const double* b, double* c,
                            std::size_t m, std::size_t k, std::size_t n) {
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < static_cast<long long>(m); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double* ci = c + i * n;
        const double* ai = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bj = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += ai[p] * bj[p];
            ci[j] += acc;
        }
    }
}

void matmul_nt_add(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n) {
    if (g_mode == ExecMode::parallel)
        matmul_nt_add_parallel(a, b, c, m, k, n);
    else
        matmul_nt_add_serial(a, b, c, m, k, n);
}

double sparse_dot(const SparseRow& a, const SparseRow& b) {
    double acc = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first == b[j].first) {
            acc += a[i].second * b[j].second;
            ++i;
            ++j;
        } else if (a[i].first < b[j].first) {
            ++i;
        } else {
            ++j;
        }
    }
    return acc;
}

void sq_distances_serial(const SparseRow& query, double query_sq_norm,
                         const std::vector<SparseRow>& rows,
                         const std::vector<double>& row_sq_norms,
                         std::vector<double>& out) {
    out.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        double d = query_sq_norm + row_sq_norms[r] - 2.0 * sparse_dot(query, rows[r]);
        out[r] = d < 0.0 ? 0.0 : d;
    }
}

void sq_distances_parallel(const SparseRow& query, double query_sq_norm,
                           const std::vector<SparseRow>& rows,
                           const std::vector<double>& row_sq_norms,
                           std::vector<double>& out) {
    out.resize(rows.size());
#pragma omp parallel for schedule(static)
    for (long long rr = 0; rr < static_cast<long long>(rows.size()); ++rr) {
        const std::size_t r = static_cast<std::size_t>(rr);
        double d = query_sq_norm + row_sq_norms[r] - 2.0 * sparse_dot(query, rows[r]);
        out[r] = d < 0.0 ? 0.0 : d;
    }
}

void sq_distances(const SparseRow& query, double query_sq_norm,
                  const std::vector<SparseRow>& rows,
                  const std::vector<double>& row_sq_norms,
                  std::vector<double>& out) {
    if (g_mode == ExecMode::parallel)
        sq_distances_parallel(query, query_sq_norm, rows, row_sq_norms, out);
    else
        sq_distances_serial(query, query_sq_norm, rows, row_sq_norms, out);
}

}  // namespace shortclass::kernels
