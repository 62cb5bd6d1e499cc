#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

namespace shortclass::kernels {

// Every kernel has a serial reference and an OpenMP version. The parallel
// loops assign disjoint output elements per iteration and keep each
// element's accumulation order fixed, so both variants produce bit-identical
// results at any thread count. Tests assert exact equality; the kernel_bench
// tool compares their throughput.

enum class ExecMode { serial, parallel };

void set_mode(ExecMode m);
ExecMode mode();

// C[m x n] = A[m x k] * B[k x n], row-major.
void matmul_serial(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n);
void matmul_parallel(const double* a, const double* b, double* c,
                     std::size_t m, std::size_t k, std::size_t n);
void matmul(const double* a, const double* b, double* c,
            std::size_t m, std::size_t k, std::size_t n);

// C[m x n] += A[m x k] * B[k x n].
void matmul_add_serial(const double* a, const double* b, double* c,
                       std::size_t m, std::size_t k, std::size_t n);
void matmul_add_parallel(const double* a, const double* b, double* c,
                         std::size_t m, std::size_t k, std::size_t n);
void matmul_add(const double* a, const double* b, double* c,
                std::size_t m, std::size_t k, std::size_t n);

// C[m x n] += A^T[m x k] * B[k x n] where A is stored [k x m].
void matmul_tn_add_serial(const double* a, const double* b, double* c,
                          std::size_t m, std::size_t k, std::size_t n);
void matmul_tn_add_parallel(const double* a, const double* b, double* c,
                            std::size_t m, std::size_t k, std::size_t n);
void matmul_tn_add(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n);

// C[m x n] += A[m x k] * B^T[k x n] where B is stored [n x k].
void matmul_nt_add_serial(const double* a, const double* b, double* c,
                          std::size_t m, std::size_t k, std::size_t n);
void matmul_nt_add_parallel(const double* a, const double* b, double* c,
                            std::size_t m, std::size_t k, std::size_t n);
void matmul_nt_add(const double* a, const double* b, double* c,
                   std::size_t m, std::size_t k, std::size_t n);

using SparseRow = std::vector<std::pair<std::uint32_t, double>>;

// Squared Euclidean distances from one sparse query to every sparse row,
// via ||q||^2 + ||r||^2 - 2 q.r with precomputed row norms.
void sq_distances_serial(const SparseRow& query, double query_sq_norm,
                         const std::vector<SparseRow>& rows,
                         const std::vector<double>& row_sq_norms,
                         std::vector<double>& out);
void sq_distances_parallel(const SparseRow& query, double query_sq_norm,
                           const std::vector<SparseRow>& rows,
                           const std::vector<double>& row_sq_norms,
                           std::vector<double>& out);
void sq_distances(const SparseRow& query, double query_sq_norm,
                  const std::vector<SparseRow>& rows,
                  const std::vector<double>& row_sq_norms,
                  std::vector<double>& out);

double sparse_dot(const SparseRow& a, const SparseRow& b);

}  // namespace shortclass::kernels
