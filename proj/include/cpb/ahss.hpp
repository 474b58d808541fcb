#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpb/adams.hpp"
#include "cpb/zab.hpp"

namespace cpb {

// A cell carries its page-2 group together with the subquotient reached by
// the differentials so far: current = (span of sub inside original) / rels.
struct CellState {
    ZabGroup original;
    ZMat sub;  // original.gens x current.gens
    ZabGroup current;

    bool operator==(const CellState&) const = default;
};

struct RecordedDifferential {
    int r = 2;
    std::pair<int, int> from;  // (column, row)
    std::pair<int, int> to;
    ZMat matrix;  // map between the current groups at application time

    bool operator==(const RecordedDifferential&) const = default;
};

struct AHSSPage {
    int prime = 2;
    int l = 0;
    int r = 0;  // rank parameter: coefficients are pi^s_*(Sigma CP^infty_r)
    int page = 2;
    std::map<std::pair<int, int>, CellState> cells;  // (column 2a, row q)
    std::vector<RecordedDifferential> history;

    bool operator==(const AHSSPage&) const = default;
};

// lambda_l = c nu with c depending on l mod 8; drives the d4.
struct MosherTable {
    std::map<int, int> coeff_by_residue;
    std::string source;
};
MosherTable default_mosher_table();

// Cell (2a, -b) = pi^s_b(Sigma CP^infty_r) for 1 <= a <= l,
// 2r+1 <= b <= 2l; zero elsewhere.
AHSSPage build_e2(int l, int r, int prime, const std::map<int, AssembledGroup>& groups);

// d2 out of column 2a is eta-multiplication on the coefficients when a is
// odd (zero at p = 3), zero when a is even. eta_maps is keyed by source
// row b and must supply every nonzero instance.
AHSSPage apply_d2(const AHSSPage& page, const std::map<int, ZabHom>& eta_maps);

// Eta maps for every d2 source row in [2r+1, 2l-1], taken from the chart
// multiplication structure; empty at p = 3.
std::map<int, ZabHom> eta_maps_from(const StableRange& sr, int l, int r);

// No d3 can act: each instance has source or target zero by column parity.
AHSSPage advance_past_d3(const AHSSPage& page);

// d4: (2l-4, -(2l-3)) -> (2l, -2l). At p = 2 it is the Mosher coefficient
// times nu-multiplication, composed into the page-4 subquotients; at p = 3
// it is zero iff C(l-2,1) = 0 mod 3, else the P1-detected surjection.
AHSSPage apply_d4(const AHSSPage& page, const MosherTable& mosher, const ZabHom& nu_map);

struct DiagonalResult {
    std::optional<long long> order;  // nullopt for an infinite diagonal
    bool ambiguous = false;          // more than one surviving cell
    std::string diagnostic;
};

// Product of the orders of the surviving cells on p + q = 0, after
// asserting no later differential can touch that diagonal.
DiagonalResult diagonal_order(const AHSSPage& page);

std::optional<long long> cell_order(const AHSSPage& page, int column, int row);

}  // namespace cpb
