#include "cpb/zab.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace cpb {

ZMat ZMat::identity(int n) {
    ZMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

ZMat zmul(const ZMat& a, const ZMat& b) {
    CPB_CHECK(a.cols == b.rows, "shape mismatch in product");
    ZMat r(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            long long aik = a.at(i, k);
            if (aik == 0) continue;
            for (int j = 0; j < b.cols; ++j) r.at(i, j) += aik * b.at(k, j);
        }
    return r;
}

ZMat zscale(long long c, const ZMat& a) {
    ZMat r = a;
    for (auto& e : r.a) e *= c;
    return r;
}

ZMat hconcat(const ZMat& a, const ZMat& b) {
    CPB_CHECK(a.rows == b.rows, "row mismatch in hconcat");
    ZMat r(a.rows, a.cols + b.cols);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) r.at(i, j) = a.at(i, j);
        for (int j = 0; j < b.cols; ++j) r.at(i, a.cols + j) = b.at(i, j);
    }
    return r;
}

namespace {

void row_sub(ZMat& m, int i, int j, long long q) {  // row i -= q * row j
    for (int c = 0; c < m.cols; ++c) m.at(i, c) -= q * m.at(j, c);
}
void col_sub(ZMat& m, int i, int j, long long q) {  // col i -= q * col j
    for (int r = 0; r < m.rows; ++r) m.at(r, i) -= q * m.at(r, j);
}
void row_swap(ZMat& m, int i, int j) {
    for (int c = 0; c < m.cols; ++c) std::swap(m.at(i, c), m.at(j, c));
}
void col_swap(ZMat& m, int i, int j) {
    for (int r = 0; r < m.rows; ++r) std::swap(m.at(r, i), m.at(r, j));
}
void row_neg(ZMat& m, int i) {
    for (int c = 0; c < m.cols; ++c) m.at(i, c) = -m.at(i, c);
}

}  // namespace

SmithResult smith(const ZMat& a) {
    SmithResult r{ZMat::identity(a.rows), a, ZMat::identity(a.cols)};
    ZMat& d = r.d;
    ZMat& u = r.u;
    ZMat& v = r.v;
    const int nmin = std::min(a.rows, a.cols);

    for (int k = 0; k < nmin; ++k) {
        // Pivot: smallest nonzero entry of the trailing submatrix.
        int pi = -1, pj = -1;
        for (int i = k; i < d.rows; ++i)
            for (int j = k; j < d.cols; ++j)
                if (d.at(i, j) != 0 &&
                    (pi < 0 || std::llabs(d.at(i, j)) < std::llabs(d.at(pi, pj)))) {
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        if (pi != k) { row_swap(d, pi, k); row_swap(u, pi, k); }
        if (pj != k) { col_swap(d, pj, k); col_swap(v, pj, k); }

        for (;;) {
            bool dirty = false;
            // Clean column k with row operations.
            for (int i = 0; i < d.rows; ++i) {
                if (i == k || d.at(i, k) == 0) continue;
                long long q = d.at(i, k) / d.at(k, k);
                row_sub(d, i, k, q);
                row_sub(u, i, k, q);
                if (d.at(i, k) != 0) {  // remainder becomes the smaller pivot
                    row_swap(d, i, k);
                    row_swap(u, i, k);
                    dirty = true;
                }
            }
            if (dirty) continue;
            // Clean row k with column operations (column k stays clean).
            for (int j = 0; j < d.cols; ++j) {
                if (j == k || d.at(k, j) == 0) continue;
                long long q = d.at(k, j) / d.at(k, k);
                col_sub(d, j, k, q);
                col_sub(v, j, k, q);
                if (d.at(k, j) != 0) {
                    col_swap(d, j, k);
                    col_swap(v, j, k);
                    dirty = true;
                }
            }
            if (dirty) continue;
            // Divisibility: pivot must divide the trailing submatrix.
            bool bad = false;
            for (int i = k + 1; i < d.rows && !bad; ++i)
                for (int j = k + 1; j < d.cols && !bad; ++j)
                    if (d.at(i, j) % d.at(k, k) != 0) {
                        row_sub(d, k, i, -1);  // row k += row i
                        row_sub(u, k, i, -1);
                        bad = true;
                    }
            if (!bad) break;
        }
    }
    for (int k = 0; k < nmin; ++k)
        if (d.at(k, k) < 0) { row_neg(d, k); row_neg(u, k); }
    return r;
}

std::optional<std::vector<long long>> solve_integer(const ZMat& a,
                                                    const std::vector<long long>& b) {
    CPB_CHECK(static_cast<int>(b.size()) == a.rows, "rhs size mismatch");
    SmithResult s = smith(a);
    std::vector<long long> ub(static_cast<std::size_t>(a.rows), 0);
    for (int i = 0; i < a.rows; ++i) {
        long long acc = 0;
        for (int j = 0; j < a.rows; ++j) acc += s.u.at(i, j) * b[static_cast<std::size_t>(j)];
        ub[static_cast<std::size_t>(i)] = acc;
    }
    std::vector<long long> y(static_cast<std::size_t>(a.cols), 0);
    const int nmin = std::min(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i) {
        long long di = (i < nmin) ? s.d.at(i, i) : 0;
        if (di != 0) {
            if (ub[static_cast<std::size_t>(i)] % di != 0) return std::nullopt;
            y[static_cast<std::size_t>(i)] = ub[static_cast<std::size_t>(i)] / di;
        } else if (ub[static_cast<std::size_t>(i)] != 0) {
            return std::nullopt;
        }
    }
    std::vector<long long> x(static_cast<std::size_t>(a.cols), 0);
    for (int i = 0; i < a.cols; ++i) {
        long long acc = 0;
        for (int j = 0; j < a.cols; ++j) acc += s.v.at(i, j) * y[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = acc;
    }
    return x;
}

std::optional<ZMat> solve_integer_mat(const ZMat& a, const ZMat& b) {
    CPB_CHECK(a.rows == b.rows, "rhs row mismatch");
    ZMat x(a.cols, b.cols);
    for (int j = 0; j < b.cols; ++j) {
        std::vector<long long> col(static_cast<std::size_t>(b.rows));
        for (int i = 0; i < b.rows; ++i) col[static_cast<std::size_t>(i)] = b.at(i, j);
        auto sol = solve_integer(a, col);
        if (!sol) return std::nullopt;
        for (int i = 0; i < a.cols; ++i) x.at(i, j) = (*sol)[static_cast<std::size_t>(i)];
    }
    return x;
}

ZMat integer_kernel(const ZMat& a) {
    SmithResult s = smith(a);
    const int nmin = std::min(a.rows, a.cols);
    std::vector<int> free_cols;
    for (int j = 0; j < a.cols; ++j)
        if (j >= nmin || s.d.at(j, j) == 0) free_cols.push_back(j);
    ZMat k(a.cols, static_cast<int>(free_cols.size()));
    for (std::size_t jj = 0; jj < free_cols.size(); ++jj)
        for (int i = 0; i < a.cols; ++i)
            k.at(i, static_cast<int>(jj)) = s.v.at(i, free_cols[jj]);
    return k;
}

int integer_rank(const ZMat& a) {
    SmithResult s = smith(a);
    int r = 0;
    for (int j = 0; j < std::min(a.rows, a.cols); ++j)
        if (s.d.at(j, j) != 0) ++r;
    return r;
}

ZMat lattice_basis(const ZMat& g) {
    ZMat m = g;
    int c0 = 0;
    for (int r = 0; r < m.rows && c0 < m.cols; ++r) {
        for (;;) {
            int best = -1;
            for (int j = c0; j < m.cols; ++j)
                if (m.at(r, j) != 0 &&
                    (best < 0 || std::llabs(m.at(r, j)) < std::llabs(m.at(r, best))))
                    best = j;
            if (best < 0) break;
            if (best != c0) col_swap(m, best, c0);
            bool clean = true;
            for (int j = c0 + 1; j < m.cols; ++j) {
                if (m.at(r, j) == 0) continue;
                long long q = m.at(r, j) / m.at(r, c0);
                col_sub(m, j, c0, q);
                if (m.at(r, j) != 0) clean = false;
            }
            if (clean) {
                if (m.at(r, c0) < 0)
                    for (int i = 0; i < m.rows; ++i) m.at(i, c0) = -m.at(i, c0);
                ++c0;
                break;
            }
        }
    }
    ZMat out(m.rows, c0);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < c0; ++j) out.at(i, j) = m.at(i, j);
    return out;
}

ZabGroup ZabGroup::cyclic_sum(const std::vector<long long>& orders) {
    int n = static_cast<int>(orders.size());
    std::vector<int> torsion_cols;
    for (int i = 0; i < n; ++i)
        if (orders[static_cast<std::size_t>(i)] != 0) torsion_cols.push_back(i);
    ZMat rels(n, static_cast<int>(torsion_cols.size()));
    for (std::size_t j = 0; j < torsion_cols.size(); ++j) {
        CPB_CHECK(orders[static_cast<std::size_t>(torsion_cols[j])] > 0, "negative order");
        rels.at(torsion_cols[j], static_cast<int>(j)) =
            orders[static_cast<std::size_t>(torsion_cols[j])];
    }
    return ZabGroup(n, std::move(rels));
}

bool hom_well_defined(const ZabHom& h) {
    CPB_CHECK(h.m.rows == h.dst.gens && h.m.cols == h.src.gens, "hom shape mismatch");
    ZMat image_of_rels = zmul(h.m, h.src.rels);
    return solve_integer_mat(h.dst.rels, image_of_rels).has_value();
}

std::vector<long long> invariant_factors(const ZabGroup& g) {
    SmithResult s = smith(g.rels);
    std::vector<long long> torsion;
    int rank_rels = 0;
    for (int j = 0; j < std::min(g.rels.rows, g.rels.cols); ++j) {
        long long d = s.d.at(j, j);
        if (d != 0) {
            ++rank_rels;
            if (d >= 2) torsion.push_back(d);
        }
    }
    std::vector<long long> out = torsion;  // ascending by the SNF chain
    for (int i = 0; i < g.gens - rank_rels; ++i) out.push_back(0);
    return out;
}

int free_rank(const ZabGroup& g) {
    int zeros = 0;
    for (long long f : invariant_factors(g))
        if (f == 0) ++zeros;
    return zeros;
}

long long torsion_order(const ZabGroup& g) {
    long long o = 1;
    for (long long f : invariant_factors(g))
        if (f != 0) o *= f;
    return o;
}

std::optional<long long> group_order(const ZabGroup& g) {
    if (free_rank(g) > 0) return std::nullopt;
    return torsion_order(g);
}

std::string group_to_string(const ZabGroup& g) {
    auto factors = invariant_factors(g);
    std::vector<std::string> parts;
    for (long long f : factors)
        if (f == 0) parts.push_back("Z");
    for (auto it = factors.rbegin(); it != factors.rend(); ++it)
        if (*it != 0) parts.push_back("Z/" + std::to_string(*it));
    if (parts.empty()) return "0";
    std::ostringstream os;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) os << '+';
        os << parts[i];
    }
    return os.str();
}

ZabGroup cokernel(const ZabHom& h) {
    CPB_CHECK(h.m.rows == h.dst.gens, "hom shape mismatch");
    return ZabGroup(h.dst.gens, hconcat(h.m, h.dst.rels));
}

KernelResult kernel(const ZabHom& h) {
    CPB_CHECK(h.m.rows == h.dst.gens && h.m.cols == h.src.gens, "hom shape mismatch");
    // x in ker iff m x lies in the relation lattice of dst.
    ZMat combined = hconcat(h.m, zscale(-1, h.dst.rels));
    ZMat full_kernel = integer_kernel(combined);
    ZMat projected(h.src.gens, full_kernel.cols);
    for (int i = 0; i < h.src.gens; ++i)
        for (int j = 0; j < full_kernel.cols; ++j)
            projected.at(i, j) = full_kernel.at(i, j);
    // Relations of src are kernel elements; include them before taking a
    // basis so the quotient below is well defined.
    ZMat basis = lattice_basis(hconcat(projected, h.src.rels));
    auto rels_in_basis = solve_integer_mat(basis, h.src.rels);
    CPB_CHECK(rels_in_basis.has_value(), "source relations escape kernel lattice");
    return KernelResult{ZabGroup(basis.cols, *rels_in_basis), basis};
}

std::optional<long long> image_order(const ZabHom& h) {
    ZabGroup with_image(h.dst.gens, hconcat(h.m, h.dst.rels));
    ZabGroup without(h.dst.gens, h.dst.rels);
    if (free_rank(with_image) != free_rank(without)) return std::nullopt;
    return torsion_order(without) / torsion_order(with_image);
}

}  // namespace cpb
