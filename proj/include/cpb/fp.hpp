#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cpb/errors.hpp"

namespace cpb {

// Dense matrix over F_p, p in {2, 3}. Entries are stored reduced, 0 <= e < p.
class FpMatrix {
public:
    FpMatrix() = default;
    FpMatrix(int prime, int rows, int cols);

    int prime() const { return prime_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    std::uint8_t at(int r, int c) const { return a_[idx(r, c)]; }
    // Assigns v mod p.
    void set(int r, int c, long long v);
    // Adds v mod p to the entry.
    void add(int r, int c, long long v);

    bool operator==(const FpMatrix&) const = default;

private:
    std::size_t idx(int r, int c) const;

    int prime_ = 2;
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> a_;
};

struct RrefResult {
    FpMatrix m;
    std::vector<int> pivots;  // pivot column of row i; strictly increasing
};

// Reduced row-echelon form. Deterministic: for each column left to right,
// the first nonzero entry scanning top-down below the current row becomes
// the pivot. Idempotent: rref(rref(m).m).m == rref(m).m.
RrefResult rref(const FpMatrix& m);

int rank(const FpMatrix& m);

// Basis of the right kernel {x : m x = 0}. One vector per free column, in
// ascending column order; each has a 1 in its free column and zeros in all
// other free columns. Size is always cols - rank.
std::vector<std::vector<std::uint8_t>> kernel_basis(const FpMatrix& m);

// A particular solution of m x = b, or nullopt if the system is
// inconsistent. b must have m.rows() entries.
std::optional<std::vector<std::uint8_t>> solve(const FpMatrix& m,
                                               const std::vector<std::uint8_t>& b);

}  // namespace cpb
