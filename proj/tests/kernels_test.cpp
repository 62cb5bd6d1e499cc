#include <doctest.h>

#include <algorithm>
#include <random>

#include "shortclass/common.hpp"
#include "shortclass/kernels.hpp"

using namespace shortclass;
namespace k = shortclass::kernels;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> unit(-2.0, 2.0);
    std::vector<double> v(n);
    for (auto& x : v) x = unit(rng);
    return v;
}

}  // namespace

TEST_CASE("matmul parallel is bit-identical to the serial reference") {
    Rng rng(11);
    std::uniform_int_distribution<std::size_t> dim(1, 40);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t m = dim(rng), kk = dim(rng), n = dim(rng);
        auto a = random_vec(m * kk, rng);
        auto b = random_vec(kk * n, rng);
        std::vector<double> c1(m * n), c2(m * n);
        k::matmul_serial(a.data(), b.data(), c1.data(), m, kk, n);
        k::matmul_parallel(a.data(), b.data(), c2.data(), m, kk, n);
        REQUIRE(c1 == c2);

        std::vector<double> d1(m * n, 0.5), d2(m * n, 0.5);
        k::matmul_add_serial(a.data(), b.data(), d1.data(), m, kk, n);
        k::matmul_add_parallel(a.data(), b.data(), d2.data(), m, kk, n);
        REQUIRE(d1 == d2);
    }
}

TEST_CASE("transposed matmul variants match a naive oracle") {
    Rng rng(12);
    const std::size_t m = 7, kk = 5, n = 6;
    auto a_t = random_vec(kk * m, rng);  // stored [k x m]
    auto b = random_vec(kk * n, rng);
    std::vector<double> got(m * n, 0.0), want(m * n, 0.0);
    k::matmul_tn_add_serial(a_t.data(), b.data(), got.data(), m, kk, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t p = 0; p < kk; ++p)
                want[i * n + j] += a_t[p * m + i] * b[p * n + j];
    for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(got[i] == doctest::Approx(want[i]));

    auto a = random_vec(m * kk, rng);
    auto b_t = random_vec(n * kk, rng);  // stored [n x k]
    std::fill(got.begin(), got.end(), 0.0);
    std::fill(want.begin(), want.end(), 0.0);
    k::matmul_nt_add_serial(a.data(), b_t.data(), got.data(), m, kk, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t p = 0; p < kk; ++p)
                want[i * n + j] += a[i * kk + p] * b_t[j * kk + p];
    for (std::size_t i = 0; i < want.size(); ++i) REQUIRE(got[i] == doctest::Approx(want[i]));

    std::vector<double> par(m * n, 0.0);
    k::matmul_nt_add_parallel(a.data(), b_t.data(), par.data(), m, kk, n);
    REQUIRE(par == got);

    std::vector<double> tn_par(m * n, 0.0), tn_ser(m * n, 0.0);
    k::matmul_tn_add_serial(a_t.data(), b.data(), tn_ser.data(), m, kk, n);
    k::matmul_tn_add_parallel(a_t.data(), b.data(), tn_par.data(), m, kk, n);
    REQUIRE(tn_par == tn_ser);
}

TEST_CASE("sparse distances match a dense oracle, serial == parallel") {
    Rng rng(13);
    std::uniform_int_distribution<std::uint32_t> col(0, 19);
    std::uniform_int_distribution<int> nnz(0, 8);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    auto make_row = [&]() {
        k::SparseRow row;
        int count = nnz(rng);
        for (int i = 0; i < count; ++i) row.emplace_back(col(rng), unit(rng));
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end(),
                              [](auto& a, auto& b) { return a.first == b.first; }),
                  row.end());
        return row;
    };
    auto densify = [](const k::SparseRow& row) {
        std::vector<double> d(20, 0.0);
        for (auto& [j, v] : row) d[j] = v;
        return d;
    };

    std::vector<k::SparseRow> rows;
    std::vector<double> norms;
    for (int i = 0; i < 60; ++i) {
        rows.push_back(make_row());
        double s = 0.0;
        for (auto& [_, v] : rows.back()) s += v * v;
        norms.push_back(s);
    }
    for (int q = 0; q < 20; ++q) {
        auto query = make_row();
        double qn = 0.0;
        for (auto& [_, v] : query) qn += v * v;
        std::vector<double> serial, parallel;
        k::sq_distances_serial(query, qn, rows, norms, serial);
        k::sq_distances_parallel(query, qn, rows, norms, parallel);
        REQUIRE(serial == parallel);

        auto dq = densify(query);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            auto dr = densify(rows[r]);
            double want = 0.0;
            for (std::size_t j = 0; j < 20; ++j) want += (dq[j] - dr[j]) * (dq[j] - dr[j]);
            REQUIRE(serial[r] == doctest::Approx(want).epsilon(1e-9));
        }
    }
}
