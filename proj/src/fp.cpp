#include "cpb/fp.hpp"

namespace cpb {

namespace {

std::uint8_t reduce(long long v, int p) {
    long long r = v % p;
    if (r < 0) r += p;
    return static_cast<std::uint8_t>(r);
}

// Multiplicative inverse in F_p for p in {2, 3}: nonzero elements square to 1.
std::uint8_t inv(std::uint8_t v, int p) {
    CPB_CHECK(v % p != 0, "inverse of zero");
    return static_cast<std::uint8_t>((v * v) % p == 1 ? v : (v * v) % p);
}

}  // namespace

FpMatrix::FpMatrix(int prime, int rows, int cols)
    : prime_(prime), rows_(rows), cols_(cols),
      a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {
    CPB_CHECK(prime == 2 || prime == 3, "prime must be 2 or 3");
    CPB_CHECK(rows >= 0 && cols >= 0, "negative dimension");
}

std::size_t FpMatrix::idx(int r, int c) const {
    CPB_CHECK(r >= 0 && r < rows_ && c >= 0 && c < cols_, "index out of range");
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
}

void FpMatrix::set(int r, int c, long long v) { a_[idx(r, c)] = reduce(v, prime_); }

void FpMatrix::add(int r, int c, long long v) {
    std::size_t i = idx(r, c);
    a_[i] = reduce(a_[i] + v, prime_);
}

RrefResult rref(const FpMatrix& m) {
    RrefResult res{m, {}};
    FpMatrix& a = res.m;
    const int p = a.prime();
    int row = 0;
    for (int col = 0; col < a.cols() && row < a.rows(); ++col) {
        int piv = -1;
        for (int r = row; r < a.rows(); ++r) {
            if (a.at(r, col) != 0) { piv = r; break; }
        }
        if (piv < 0) continue;
        if (piv != row) {
            for (int c = 0; c < a.cols(); ++c) {
                std::uint8_t t = a.at(row, c);
                a.set(row, c, a.at(piv, c));
                a.set(piv, c, t);
            }
        }
        std::uint8_t s = inv(a.at(row, col), p);
        if (s != 1) {
            for (int c = 0; c < a.cols(); ++c) a.set(row, c, a.at(row, c) * s);
        }
        for (int r = 0; r < a.rows(); ++r) {
            if (r == row) continue;
            std::uint8_t f = a.at(r, col);
            if (f == 0) continue;
            for (int c = 0; c < a.cols(); ++c)
                a.set(r, c, a.at(r, c) + (p - f) * a.at(row, c));
        }
        res.pivots.push_back(col);
        ++row;
    }
    return res;
}

int rank(const FpMatrix& m) { return static_cast<int>(rref(m).pivots.size()); }

std::vector<std::vector<std::uint8_t>> kernel_basis(const FpMatrix& m) {
    RrefResult r = rref(m);
    const int p = m.prime();
    std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
    for (int c : r.pivots) is_pivot[static_cast<std::size_t>(c)] = true;

    std::vector<std::vector<std::uint8_t>> basis;
    for (int free = 0; free < m.cols(); ++free) {
        if (is_pivot[static_cast<std::size_t>(free)]) continue;
        std::vector<std::uint8_t> v(static_cast<std::size_t>(m.cols()), 0);
        v[static_cast<std::size_t>(free)] = 1;
        for (std::size_t i = 0; i < r.pivots.size(); ++i) {
            std::uint8_t e = r.m.at(static_cast<int>(i), free);
            if (e != 0)
                v[static_cast<std::size_t>(r.pivots[i])] =
                    static_cast<std::uint8_t>((p - e) % p);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

std::optional<std::vector<std::uint8_t>> solve(const FpMatrix& m,
                                               const std::vector<std::uint8_t>& b) {
    CPB_CHECK(static_cast<int>(b.size()) == m.rows(), "rhs size mismatch");
    FpMatrix aug(m.prime(), m.rows(), m.cols() + 1);
    for (int r = 0; r < m.rows(); ++r) {
        for (int c = 0; c < m.cols(); ++c) aug.set(r, c, m.at(r, c));
        aug.set(r, m.cols(), b[static_cast<std::size_t>(r)]);
    }
    RrefResult red = rref(aug);
    std::vector<std::uint8_t> x(static_cast<std::size_t>(m.cols()), 0);
    for (std::size_t i = 0; i < red.pivots.size(); ++i) {
        if (red.pivots[i] == m.cols()) return std::nullopt;  // pivot in rhs column
        x[static_cast<std::size_t>(red.pivots[i])] = red.m.at(static_cast<int>(i), m.cols());
    }
    return x;
}

}  // namespace cpb
