#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cpb/errors.hpp"

namespace cpb {

// Small dense integer matrix. Columns play the role of lattice generators
// or of homomorphism images of source generators.
struct ZMat {
    int rows = 0;
    int cols = 0;
    std::vector<long long> a;  // row-major

    ZMat() = default;
    ZMat(int r, int c)
        : rows(r), cols(c),
          a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c), 0) {
        CPB_CHECK(r >= 0 && c >= 0, "negative dimension");
    }
    static ZMat identity(int n);

    long long& at(int r, int c) {
        CPB_CHECK(r >= 0 && r < rows && c >= 0 && c < cols, "index out of range");
        return a[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                 static_cast<std::size_t>(c)];
    }
    long long at(int r, int c) const {
        CPB_CHECK(r >= 0 && r < rows && c >= 0 && c < cols, "index out of range");
        return a[static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) +
                 static_cast<std::size_t>(c)];
    }
    bool operator==(const ZMat&) const = default;
};

ZMat zmul(const ZMat& a, const ZMat& b);
ZMat zscale(long long c, const ZMat& a);
// Columns of a followed by columns of b (same row count).
ZMat hconcat(const ZMat& a, const ZMat& b);

// u * a * v = d with u, v unimodular and d diagonal with the divisibility
// chain d_1 | d_2 | ..., all nonnegative.
struct SmithResult {
    ZMat u, d, v;
};
SmithResult smith(const ZMat& a);

// Integer solution x of a x = b, if one exists.
std::optional<std::vector<long long>> solve_integer(const ZMat& a,
                                                    const std::vector<long long>& b);
// Columnwise: X with a X = B.
std::optional<ZMat> solve_integer_mat(const ZMat& a, const ZMat& b);

// Basis of the integer kernel {x : a x = 0}, as columns.
ZMat integer_kernel(const ZMat& a);
// Rank over Q.
int integer_rank(const ZMat& a);
// Basis (columns) of the lattice spanned by the columns of g.
ZMat lattice_basis(const ZMat& g);

// Finitely generated abelian group presented as Z^gens / (column lattice
// of rels).
struct ZabGroup {
    int gens = 0;
    ZMat rels;  // gens x r

    ZabGroup() = default;
    ZabGroup(int g, ZMat r) : gens(g), rels(std::move(r)) {
        CPB_CHECK(rels.rows == gens, "relation row count mismatch");
    }
    // Direct sum of cyclic groups; order 0 means a Z summand.
    static ZabGroup cyclic_sum(const std::vector<long long>& orders);

    bool operator==(const ZabGroup&) const = default;
};

// Homomorphism src -> dst given on generators by the columns of m.
struct ZabHom {
    ZabGroup src;
    ZabGroup dst;
    ZMat m;  // dst.gens x src.gens
};

// m has to send relations of src into relations of dst.
bool hom_well_defined(const ZabHom& h);

// Torsion invariant factors >= 2 in ascending divisibility order, then one
// 0 per free rank.
std::vector<long long> invariant_factors(const ZabGroup& g);
int free_rank(const ZabGroup& g);
long long torsion_order(const ZabGroup& g);
// nullopt for infinite groups.
std::optional<long long> group_order(const ZabGroup& g);
// "0", "Z", "Z/8", "Z+Z/2", "Z/4+Z/2": free summands first, torsion
// factors in descending order.
std::string group_to_string(const ZabGroup& g);

ZabGroup cokernel(const ZabHom& h);

struct KernelResult {
    ZabGroup group;
    ZMat inclusion;  // src.gens x group.gens, in source coordinates
};
KernelResult kernel(const ZabHom& h);

// Order of the image subgroup; nullopt when infinite.
std::optional<long long> image_order(const ZabHom& h);

}  // namespace cpb
