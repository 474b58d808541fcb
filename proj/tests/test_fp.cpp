#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "cpb/fp.hpp"
#include "test_util.hpp"

using cpb::FpMatrix;
using cpb::kernel_basis;
using cpb::rank;
using cpb::rref;
using cpb::solve;

namespace {

FpMatrix make(int p, int rows, int cols, const std::vector<int>& entries) {
    FpMatrix m(p, rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            m.set(r, c, entries[static_cast<std::size_t>(r * cols + c)]);
    return m;
}

FpMatrix random_matrix(int p, int rows, int cols) {
    FpMatrix m(p, rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m.set(r, c, rand_int(0, p - 1));
    return m;
}

// Independent rank oracle: recursive minor-expansion determinant over all
// square submatrices. Exponential, fine for dimensions <= 6.
int det_mod(const FpMatrix& m, const std::vector<int>& rs, const std::vector<int>& cs) {
    const int p = m.prime();
    if (rs.empty()) return 1 % p;
    int d = 0;
    int sign = 1;
    for (std::size_t j = 0; j < cs.size(); ++j) {
        int e = m.at(rs[0], cs[j]);
        if (e != 0) {
            std::vector<int> sub_rs(rs.begin() + 1, rs.end());
            std::vector<int> sub_cs;
            for (std::size_t k = 0; k < cs.size(); ++k)
                if (k != j) sub_cs.push_back(cs[k]);
            d += sign * e * det_mod(m, sub_rs, sub_cs);
        }
        sign = -sign;
    }
    d %= p;
    if (d < 0) d += p;
    return d;
}

void subsets_of_size(int n, int k, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    // Iterative bitmask enumeration keeps this simple for n <= 6.
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
        cur.clear();
        for (int i = 0; i < n; ++i)
            if (mask & (1 << i)) cur.push_back(i);
        out.push_back(cur);
    }
}

int oracle_rank(const FpMatrix& m) {
    int maxk = std::min(m.rows(), m.cols());
    for (int k = maxk; k >= 1; --k) {
        std::vector<std::vector<int>> rsets, csets;
        subsets_of_size(m.rows(), k, rsets);
        subsets_of_size(m.cols(), k, csets);
        for (const auto& rs : rsets)
            for (const auto& cs : csets)
                if (det_mod(m, rs, cs) != 0) return k;
    }
    return 0;
}

std::vector<std::uint8_t> mat_mul(const FpMatrix& m, const std::vector<std::uint8_t>& x) {
    std::vector<std::uint8_t> y(static_cast<std::size_t>(m.rows()), 0);
    for (int r = 0; r < m.rows(); ++r) {
        int acc = 0;
        for (int c = 0; c < m.cols(); ++c)
            acc += m.at(r, c) * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = static_cast<std::uint8_t>(acc % m.prime());
    }
    return y;
}

bool is_zero(const std::vector<std::uint8_t>& v) {
    for (auto e : v)
        if (e != 0) return false;
    return true;
}

}  // namespace

TEST_CASE("rref of a fixed F2 matrix") {
    FpMatrix m = make(2, 2, 3, {1, 1, 0, 1, 0, 1});
    auto r = rref(m);
    CHECK(r.pivots == std::vector<int>{0, 1});
    FpMatrix want = make(2, 2, 3, {1, 0, 1, 0, 1, 1});
    CHECK(r.m == want);
}

TEST_CASE("kernel of the 1x3 zero matrix over F3 is the standard basis") {
    FpMatrix m(3, 1, 3);
    auto k = kernel_basis(m);
    REQUIRE(k.size() == 3);
    CHECK(k[0] == std::vector<std::uint8_t>{1, 0, 0});
    CHECK(k[1] == std::vector<std::uint8_t>{0, 1, 0});
    CHECK(k[2] == std::vector<std::uint8_t>{0, 0, 1});
}

TEST_CASE("solve on a fixed F2 system") {
    FpMatrix m = make(2, 2, 2, {1, 0, 1, 1});
    auto x = solve(m, {1, 0});
    REQUIRE(x.has_value());
    CHECK(*x == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("solve detects inconsistency") {
    FpMatrix m = make(2, 2, 2, {1, 1, 1, 1});
    CHECK_FALSE(solve(m, {1, 0}).has_value());
    CHECK(solve(m, {1, 1}).has_value());
}

TEST_CASE("prime is validated at construction") {
    CHECK_THROWS_AS(FpMatrix(5, 1, 1), cpb::contract_violation);
    CHECK_THROWS_AS(FpMatrix(1, 2, 2), cpb::contract_violation);
}

TEST_CASE("rank agrees with minor-expansion oracle") {
    for (int iter = 0; iter < 1200; ++iter) {
        int p = (iter % 2 == 0) ? 2 : 3;
        FpMatrix m = random_matrix(p, rand_int(1, 6), rand_int(1, 6));
        CHECK(rank(m) == oracle_rank(m));
    }
}

TEST_CASE("rref is idempotent and pivot columns are clean") {
    for (int iter = 0; iter < 1000; ++iter) {
        int p = (iter % 2 == 0) ? 2 : 3;
        FpMatrix m = random_matrix(p, rand_int(1, 8), rand_int(1, 8));
        auto r1 = rref(m);
        auto r2 = rref(r1.m);
        CHECK(r1.m == r2.m);
        CHECK(r1.pivots == r2.pivots);
        for (std::size_t i = 0; i < r1.pivots.size(); ++i) {
            for (int r = 0; r < m.rows(); ++r) {
                std::uint8_t want = (r == static_cast<int>(i)) ? 1 : 0;
                CHECK(r1.m.at(r, r1.pivots[i]) == want);
            }
            if (i > 0) CHECK(r1.pivots[i] > r1.pivots[i - 1]);
        }
    }
}

TEST_CASE("kernel basis spans the kernel: size, membership, independence") {
    for (int iter = 0; iter < 1000; ++iter) {
        int p = (iter % 2 == 0) ? 2 : 3;
        FpMatrix m = random_matrix(p, rand_int(1, 7), rand_int(1, 7));
        auto k = kernel_basis(m);
        CHECK(static_cast<int>(k.size()) == m.cols() - rank(m));
        for (const auto& v : k) CHECK(is_zero(mat_mul(m, v)));
        // Independence: stack kernel vectors as rows; rank must equal count.
        if (!k.empty()) {
            FpMatrix km(p, static_cast<int>(k.size()), m.cols());
            for (int r = 0; r < km.rows(); ++r)
                for (int c = 0; c < km.cols(); ++c)
                    km.set(r, c, k[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
            CHECK(rank(km) == static_cast<int>(k.size()));
        }
    }
}

TEST_CASE("solve returns a valid solution exactly when one exists") {
    for (int iter = 0; iter < 1000; ++iter) {
        int p = (iter % 2 == 0) ? 2 : 3;
        FpMatrix m = random_matrix(p, rand_int(1, 7), rand_int(1, 7));
        // Consistent case: b = m x for random x.
        std::vector<std::uint8_t> x0(static_cast<std::size_t>(m.cols()));
        for (auto& e : x0) e = static_cast<std::uint8_t>(rand_int(0, p - 1));
        auto b = mat_mul(m, x0);
        auto x = solve(m, b);
        REQUIRE(x.has_value());
        CHECK(mat_mul(m, *x) == b);
        // Random rhs: solvable iff augmenting does not raise the rank.
        std::vector<std::uint8_t> br(static_cast<std::size_t>(m.rows()));
        for (auto& e : br) e = static_cast<std::uint8_t>(rand_int(0, p - 1));
        FpMatrix aug(p, m.rows(), m.cols() + 1);
        for (int r = 0; r < m.rows(); ++r) {
            for (int c = 0; c < m.cols(); ++c) aug.set(r, c, m.at(r, c));
            aug.set(r, m.cols(), br[static_cast<std::size_t>(r)]);
        }
        bool solvable = rank(aug) == rank(m);
        auto xr = solve(m, br);
        CHECK(xr.has_value() == solvable);
        if (xr) CHECK(mat_mul(m, *xr) == br);
    }
}
