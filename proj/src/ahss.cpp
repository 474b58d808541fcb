#include "cpb/ahss.hpp"

#include <sstream>
#include <utility>

#include "cpb/errors.hpp"

namespace cpb {

namespace {

using Key = std::pair<int, int>;

bool cell_nonzero(const CellState& c) {
    auto ord = group_order(c.current);
    return !(ord.has_value() && *ord == 1);
}

std::string key_str(const Key& k) {
    std::ostringstream os;
    os << "(" << k.first << ", " << k.second << ")";
    return os.str();
}

// Carry an original-level map down to the current subquotients: solve
// T.sub * Y = M * S.sub modulo the relations of T.original.
ZMat induced_matrix(const CellState& s, const CellState& t, const ZMat& m_orig) {
    CPB_CHECK(m_orig.rows == t.original.gens && m_orig.cols == s.original.gens,
              "differential matrix does not match the original cell groups");
    if (t.current.gens == 0 || s.current.gens == 0)
        return ZMat(t.current.gens, s.current.gens);
    ZMat a = hconcat(t.sub, t.original.rels);
    ZMat b = zmul(m_orig, s.sub);
    auto x = solve_integer_mat(a, b);
    CPB_CHECK(x.has_value(), "differential does not descend to the subquotient");
    ZMat y(t.current.gens, s.current.gens);
    for (int i = 0; i < y.rows; ++i)
        for (int j = 0; j < y.cols; ++j) y.at(i, j) = x->at(i, j);
    CPB_CHECK(hom_well_defined({s.current, t.current, y}),
              "induced differential is not well defined");
    return y;
}

// Replace the source by the kernel and the target by the cokernel, with
// order and free-rank bookkeeping checked on both sides.
void apply_instance(std::map<Key, CellState>& cells, const Key& from, const Key& to,
                    const ZMat& m_cur, int r, std::vector<RecordedDifferential>& history) {
    CellState& s = cells.at(from);
    CellState& t = cells.at(to);
    ZabHom h{s.current, t.current, m_cur};
    auto ord_src = group_order(s.current);
    auto ord_tgt = group_order(t.current);
    auto ord_im = image_order(h);
    KernelResult k = kernel(h);
    ZabGroup coker = cokernel(h);
    if (ord_src && ord_im) {
        auto ord_ker = group_order(k.group);
        CPB_CHECK(ord_ker && *ord_ker * *ord_im == *ord_src,
                  "kernel and image orders do not account for the source");
    }
    if (ord_tgt && ord_im) {
        auto ord_coker = group_order(coker);
        CPB_CHECK(ord_coker && *ord_coker * *ord_im == *ord_tgt,
                  "cokernel and image orders do not account for the target");
    }
    int drop = free_rank(s.current) - free_rank(k.group);
    CPB_CHECK(drop >= 0 && free_rank(coker) == free_rank(t.current) - drop,
              "free rank is not conserved across the differential");
    s.current = k.group;
    s.sub = zmul(s.sub, k.inclusion);
    t.current = std::move(coker);
    history.push_back({r, from, to, m_cur});
}

}  // namespace

MosherTable default_mosher_table() {
    MosherTable t;
    t.coeff_by_residue = {{0, 1}, {1, 1}, {2, 0}, {3, 2}, {4, 1}, {5, 1}, {6, 2}, {7, 0}};
    t.source = "Mosher, Some stable homotopy of complex projective space";
    return t;
}

AHSSPage build_e2(int l, int r, int prime, const std::map<int, AssembledGroup>& groups) {
    if (prime != 2 && prime != 3)
        throw config_error("prime must be 2 or 3, got " + std::to_string(prime));
    if (2 * r < l || r > l - 1) {
        std::ostringstream os;
        os << "rank parameter violates l/2 <= r <= l-1: l = " << l << ", r = " << r;
        throw range_error(os.str());
    }
    for (int b = 2 * r + 1; b <= 2 * l; ++b) {
        if (!groups.count(b)) {
            std::ostringstream os;
            os << "coefficient groups must cover stems " << 2 * r + 1 << ".." << 2 * l
               << "; stem " << b << " is missing";
            throw range_error(os.str());
        }
    }
    AHSSPage page;
    page.prime = prime;
    page.l = l;
    page.r = r;
    page.page = 2;
    for (int a = 1; a <= l; ++a) {
        for (int b = 2 * r + 1; b <= 2 * l; ++b) {
            ZabGroup g = to_zab(groups.at(b), prime);
            CellState cell{g, ZMat::identity(g.gens), g};
            page.cells.emplace(Key{2 * a, -b}, std::move(cell));
        }
    }
    return page;
}

AHSSPage apply_d2(const AHSSPage& page, const std::map<int, ZabHom>& eta_maps) {
    CPB_CHECK(page.page == 2, "d2 must be applied to a page-2 input");
    AHSSPage out = page;
    struct Instance {
        Key from;
        Key to;
        ZMat m;
    };
    std::vector<Instance> instances;
    for (const auto& [key, s] : out.cells) {
        int a = key.first / 2;
        // even columns map by zero, as does everything at p = 3
        if (out.prime == 3 || a % 2 == 0) continue;
        Key to{key.first + 2, key.second - 1};
        auto ti = out.cells.find(to);
        if (ti == out.cells.end()) continue;
        if (!cell_nonzero(s) || !cell_nonzero(ti->second)) continue;
        int b = -key.second;
        auto ei = eta_maps.find(b);
        if (ei == eta_maps.end())
            throw config_error("missing eta map for source row b = " + std::to_string(b));
        const ZabHom& eta = ei->second;
        CPB_CHECK(hom_well_defined(eta), "eta map for row " + std::to_string(b) +
                                             " is not well defined");
        instances.push_back({key, to, induced_matrix(s, ti->second, eta.m)});
    }
    // sources sit in odd-a columns and targets in even-a ones, so the
    // kernel and cokernel updates never collide
    for (const auto& inst : instances)
        apply_instance(out.cells, inst.from, inst.to, inst.m, 2, out.history);
    out.page = 3;
    return out;
}

std::map<int, ZabHom> eta_maps_from(const StableRange& sr, int l, int r) {
    std::map<int, ZabHom> etas;
    if (sr.prime != 2) return etas;
    for (int b = 2 * r + 1; b <= 2 * l - 1; ++b)
        etas.emplace(b, multiplication_map(sr.e_inf, sr.groups, StableElement::eta, b));
    return etas;
}

AHSSPage advance_past_d3(const AHSSPage& page) {
    CPB_CHECK(page.page == 3, "d3 bookkeeping runs on a page-3 input");
    for (const auto& [key, s] : page.cells) {
        if (!cell_nonzero(s)) continue;
        auto ti = page.cells.find(Key{key.first + 3, key.second - 2});
        CPB_CHECK(ti == page.cells.end() || !cell_nonzero(ti->second),
                  "a d3 instance has nonzero source and target at " + key_str(key));
    }
    AHSSPage out = page;
    out.page = 4;
    return out;
}

AHSSPage apply_d4(const AHSSPage& page, const MosherTable& mosher, const ZabHom& nu_map) {
    CPB_CHECK(page.page == 4, "d4 must be applied to a page-4 input");
    AHSSPage out = page;
    Key from{2 * out.l - 4, -(2 * out.l - 3)};
    Key to{2 * out.l, -2 * out.l};
    auto si = out.cells.find(from);
    auto ti = out.cells.find(to);
    if (si != out.cells.end() && ti != out.cells.end() && cell_nonzero(si->second) &&
        cell_nonzero(ti->second)) {
        const CellState& s = si->second;
        const CellState& t = ti->second;
        ZMat m_orig(t.original.gens, s.original.gens);
        if (out.prime == 2) {
            int residue = ((out.l % 8) + 8) % 8;
            auto ci = mosher.coeff_by_residue.find(residue);
            if (ci == mosher.coeff_by_residue.end())
                throw config_error("Mosher table has no coefficient for l mod 8 = " +
                                   std::to_string(residue));
            if (ci->second != 0) {
                CPB_CHECK(nu_map.m.rows == t.original.gens &&
                              nu_map.m.cols == s.original.gens,
                          "nu map does not match the d4 end cells");
                CPB_CHECK(hom_well_defined(nu_map), "nu map is not well defined");
                m_orig = zscale(ci->second, nu_map.m);
            }
        } else {
            // C(l-2, 1) mod 3 by Lucas; a nonzero value gives the
            // P1-detected surjection onto the cyclic target
            long long c3 = (((out.l - 2) % 3) + 3) % 3;
            if (c3 != 0) {
                CPB_CHECK(s.original.gens == 1 && t.original.gens == 1,
                          "3-local d4 expects cyclic end cells");
                m_orig.at(0, 0) = c3;
            }
        }
        ZMat m_cur = induced_matrix(s, t, m_orig);
        apply_instance(out.cells, from, to, m_cur, 4, out.history);
    }
    out.page = 5;
    return out;
}

DiagonalResult diagonal_order(const AHSSPage& page) {
    // degree bookkeeping: every differential that could still touch a
    // nonzero diagonal cell must have its other end structurally zero
    for (const auto& [key, cell] : page.cells) {
        if (key.first + key.second != 0 || !cell_nonzero(cell)) continue;
        for (int rd = page.page; rd <= 2 * page.l + 2; ++rd) {
            auto in = page.cells.find(Key{key.first - rd, key.second + rd - 1});
            if (in != page.cells.end() && cell_nonzero(in->second)) {
                std::ostringstream os;
                os << "a d" << rd << " from " << key_str(in->first)
                   << " could still hit the diagonal cell " << key_str(key);
                throw verify_error(os.str());
            }
            auto outgoing = page.cells.find(Key{key.first + rd, key.second - rd + 1});
            if (outgoing != page.cells.end() && cell_nonzero(outgoing->second)) {
                std::ostringstream os;
                os << "a d" << rd << " from the diagonal cell " << key_str(key)
                   << " could still reach " << key_str(outgoing->first);
                throw verify_error(os.str());
            }
        }
    }
    DiagonalResult result;
    long long product = 1;
    int survivors = 0;
    bool infinite = false;
    std::ostringstream diag;
    for (const auto& [key, cell] : page.cells) {
        if (key.first + key.second != 0 || !cell_nonzero(cell)) continue;
        ++survivors;
        if (survivors > 1) diag << ", ";
        diag << key_str(key) << " = " << group_to_string(cell.current);
        auto ord = group_order(cell.current);
        if (!ord)
            infinite = true;
        else
            product *= *ord;
    }
    result.ambiguous = survivors > 1;
    result.diagnostic = survivors == 0 ? "no surviving diagonal cells" : diag.str();
    if (infinite)
        result.order = std::nullopt;
    else
        result.order = product;
    return result;
}

std::optional<long long> cell_order(const AHSSPage& page, int column, int row) {
    auto it = page.cells.find(Key{column, row});
    if (it == page.cells.end()) return 1;
    return group_order(it->second.current);
}

}  // namespace cpb
