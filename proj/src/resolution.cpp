#include "cpb/resolution.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "cpb/errors.hpp"
#include "cpb/fp.hpp"

namespace cpb {

namespace {

// F_p-basis of the degree-t slice of a free module: (generator, admissible
// word) pairs, generators in creation order, words in the stable basis order.
struct SliceBasis {
    std::vector<std::pair<int, OpWord>> entries;
    std::map<std::pair<int, OpWord>, int> index;
    int dim() const { return static_cast<int>(entries.size()); }
};

SliceBasis slice_basis(int prime, const std::vector<ResGenerator>& gens, int t, int cap) {
    SliceBasis sb;
    for (int j = 0; j < static_cast<int>(gens.size()); ++j) {
        int d = t - gens[j].t;
        if (d < 0) continue;
        for (const OpWord& w : admissible_basis(prime, d, cap)) {
            sb.index[{j, w}] = sb.dim();
            sb.entries.push_back({j, w});
        }
    }
    return sb;
}

// Expands a free-module element into slice coordinates. Every term must land
// on a slice entry; anything else is a degree bookkeeping bug.
std::vector<std::uint8_t> expand(const FreeElement& v, const SliceBasis& slice) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(slice.dim()), 0);
    for (int i = 0; i < static_cast<int>(v.size()); ++i) {
        for (const auto& [w, coeff] : v[static_cast<std::size_t>(i)].terms()) {
            auto it = slice.index.find({i, w});
            CPB_CHECK(it != slice.index.end(), "free element term outside the slice");
            out[static_cast<std::size_t>(it->second)] = coeff;
        }
    }
    return out;
}

FreeElement scale_free(int prime, const SteenrodElement& a, const FreeElement& v) {
    FreeElement out;
    out.reserve(v.size());
    for (const auto& c : v) out.push_back(multiply(a, c));
    (void)prime;
    return out;
}

FreeElement slice_to_free(int prime, const std::vector<std::uint8_t>& vec, const SliceBasis& slice,
                          int n_gens) {
    FreeElement out(static_cast<std::size_t>(n_gens), SteenrodElement(prime));
    for (int i = 0; i < slice.dim(); ++i) {
        if (vec[static_cast<std::size_t>(i)] == 0) continue;
        const auto& [gen, w] = slice.entries[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(gen)].add_term(w, vec[static_cast<std::size_t>(i)]);
    }
    return out;
}

std::string generator_name(int s, int t, int repeat) {
    std::string id = "e_{" + std::to_string(s) + "," + std::to_string(t) + "}";
    id.append(static_cast<std::size_t>(repeat), '\'');
    return id;
}

class Resolver {
  public:
    Resolver(const ModulePresentation& m, int t_max, int s_max, int cap)
        : m_(m), p_(m.prime()), t_max_(t_max), s_max_(s_max), cap_(cap), res_(m) {
        res_.t_max = t_max;
        res_.s_max = s_max;
        res_.degree_cap = cap;
        res_.stages.resize(static_cast<std::size_t>(s_max) + 1);
        for (int s = 0; s <= s_max; ++s) res_.stages[static_cast<std::size_t>(s)].s = s;
    }

    Resolution run() {
        if (!m_.empty()) {
            build_stage0();
            for (int s = 1; s <= s_max_; ++s) build_stage(s);
        }
        verify_resolution(res_);
        return std::move(res_);
    }

  private:
    // Matrix of the stage-s differential on the degree-t slice; rows are the
    // target coordinates (module cells at t for s = 0, the stage s-1 slice
    // otherwise), columns the source slice entries.
    FpMatrix diff_matrix(int s, int t, const SliceBasis& src) const {
        const auto& stage = res_.stages[static_cast<std::size_t>(s)];
        if (s == 0) {
            int rows = m_.cell_at_degree(t) ? 1 : 0;
            FpMatrix mat(p_, rows, src.dim());
            if (rows == 0) return mat;
            int cell = *m_.cell_at_degree(t);
            for (int c = 0; c < src.dim(); ++c) {
                const auto& [gen, w] = src.entries[static_cast<std::size_t>(c)];
                ModuleVec img = m_.apply_word(w, stage.d_aug[static_cast<std::size_t>(gen)]);
                mat.set(0, c, img[static_cast<std::size_t>(cell)]);
            }
            return mat;
        }
        SliceBasis tgt =
            slice_basis(p_, res_.stages[static_cast<std::size_t>(s) - 1].generators, t, cap_);
        FpMatrix mat(p_, tgt.dim(), src.dim());
        for (int c = 0; c < src.dim(); ++c) {
            const auto& [gen, w] = src.entries[static_cast<std::size_t>(c)];
            FreeElement img = scale_free(p_, SteenrodElement::monomial(p_, w),
                                         stage.d_free[static_cast<std::size_t>(gen)]);
            auto col = expand(img, tgt);
            for (int r = 0; r < tgt.dim(); ++r) mat.set(r, c, col[static_cast<std::size_t>(r)]);
        }
        return mat;
    }

    void build_stage0() {
        auto& stage = res_.stages[0];
        for (int t = m_.degrees().front(); t <= t_max_; ++t) {
            auto cell = m_.cell_at_degree(t);
            if (!cell) continue;
            SliceBasis src = slice_basis(p_, stage.generators, t, cap_);
            FpMatrix covered = diff_matrix(0, t, src);
            if (rank(covered) == 1) continue;
            stage.generators.push_back({t, generator_name(0, t, 0)});
            stage.d_aug.push_back(m_.unit_cell(*cell));
        }
    }

    void build_stage(int s) {
        auto& stage = res_.stages[static_cast<std::size_t>(s)];
        const auto& prev = res_.stages[static_cast<std::size_t>(s) - 1];
        for (int t = m_.degrees().front(); t <= t_max_; ++t) {
            SliceBasis prev_slice = slice_basis(p_, prev.generators, t, cap_);
            if (prev_slice.dim() == 0) continue;
            auto kernel = kernel_basis(diff_matrix(s - 1, t, prev_slice));
            if (kernel.empty()) continue;

            // Span of the part of the kernel already covered by the stage-s
            // generators chosen in lower degrees, then extended one kernel
            // basis vector at a time.
            SliceBasis own = slice_basis(p_, stage.generators, t, cap_);
            std::vector<std::vector<std::uint8_t>> span_cols;
            for (int c = 0; c < own.dim(); ++c) {
                const auto& [gen, w] = own.entries[static_cast<std::size_t>(c)];
                FreeElement img = scale_free(p_, SteenrodElement::monomial(p_, w),
                                             stage.d_free[static_cast<std::size_t>(gen)]);
                span_cols.push_back(expand(img, prev_slice));
            }
            int base_rank = span_rank(span_cols);
            int repeat = 0;
            for (const auto& kv : kernel) {
                span_cols.push_back(kv);
                int new_rank = span_rank(span_cols);
                if (new_rank == base_rank) {
                    span_cols.pop_back();
                    continue;
                }
                base_rank = new_rank;
                // Minimality: a unit coefficient would mean a previous-stage
                // generator of the same degree is redundant.
                for (const auto& [gen, w] : prev_slice.entries)
                    if (w.empty())
                        CPB_CHECK(kv[static_cast<std::size_t>(prev_slice.index.at({gen, w}))] == 0,
                                  "kernel vector with unit coefficient breaks minimality");
                stage.generators.push_back({t, generator_name(s, t, repeat++)});
                stage.d_free.push_back(
                    slice_to_free(p_, kv, prev_slice, static_cast<int>(prev.generators.size())));
            }
        }
    }

    int span_rank(const std::vector<std::vector<std::uint8_t>>& cols) const {
        if (cols.empty()) return 0;
        int rows = static_cast<int>(cols.front().size());
        FpMatrix m(p_, rows, static_cast<int>(cols.size()));
        for (int c = 0; c < static_cast<int>(cols.size()); ++c)
            for (int r = 0; r < rows; ++r)
                m.set(r, c, cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)]);
        return rank(m);
    }

    const ModulePresentation& m_;
    int p_;
    int t_max_;
    int s_max_;
    int cap_;
    Resolution res_;
};

}  // namespace

Resolution resolve_minimal(const ModulePresentation& m, int t_max, int s_max, int degree_cap) {
    if (s_max < 1) throw range_error("filtration bound s_max must be at least 1");
    return Resolver(m, t_max, s_max, degree_cap).run();
}

void verify_resolution(const Resolution& res) {
    const ModulePresentation& m = res.module;
    const int p = m.prime();
    // d after d is zero, checked symbolically on every generator.
    for (int s = 1; s <= res.s_max; ++s) {
        const auto& stage = res.stages[static_cast<std::size_t>(s)];
        const auto& prev = res.stages[static_cast<std::size_t>(s) - 1];
        for (const auto& v : stage.d_free) {
            CPB_CHECK(v.size() == prev.generators.size(), "differential has wrong arity");
            if (s == 1) {
                ModuleVec acc = m.zero();
                for (std::size_t i = 0; i < v.size(); ++i) {
                    ModuleVec part = m.apply_element(v[i], prev.d_aug[i]);
                    for (std::size_t c = 0; c < acc.size(); ++c)
                        acc[c] = static_cast<std::uint8_t>((acc[c] + part[c]) % p);
                }
                CPB_CHECK(acc == m.zero(), "augmentation of a differential value is nonzero");
            } else {
                const auto& prev2 = res.stages[static_cast<std::size_t>(s) - 2];
                FreeElement acc(prev2.generators.size(), SteenrodElement(p));
                for (std::size_t i = 0; i < v.size(); ++i) {
                    const FreeElement& di = prev.d_free[i];
                    for (std::size_t j = 0; j < di.size(); ++j) acc[j] += multiply(v[i], di[j]);
                }
                for (const auto& e : acc) CPB_CHECK(e.is_zero(), "d after d is nonzero");
            }
        }
        // Minimality: no unit coefficients anywhere.
        for (const auto& v : stage.d_free)
            for (const auto& e : v)
                CPB_CHECK(e.terms().find(OpWord{}) == e.terms().end(),
                          "differential has a unit coefficient");
    }
    if (m.empty()) return;

    // Exactness in the window: at every degree, the rank of d_s equals the
    // nullity of d_{s-1}.
    for (int s = 1; s <= res.s_max; ++s) {
        const auto& prev = res.stages[static_cast<std::size_t>(s) - 1];
        for (int t = m.degrees().front(); t <= res.t_max; ++t) {
            SliceBasis prev_slice = slice_basis(p, prev.generators, t, res.degree_cap);
            if (prev_slice.dim() == 0) continue;

            FpMatrix upstream(p, 0, prev_slice.dim());
            if (s == 1) {
                int rows = m.cell_at_degree(t) ? 1 : 0;
                upstream = FpMatrix(p, rows, prev_slice.dim());
                if (rows == 1) {
                    int cell = *m.cell_at_degree(t);
                    for (int c = 0; c < prev_slice.dim(); ++c) {
                        const auto& [gen, w] = prev_slice.entries[static_cast<std::size_t>(c)];
                        ModuleVec img = m.apply_word(w, prev.d_aug[static_cast<std::size_t>(gen)]);
                        upstream.set(0, c, img[static_cast<std::size_t>(cell)]);
                    }
                }
            } else {
                const auto& prev2 = res.stages[static_cast<std::size_t>(s) - 2];
                SliceBasis tgt = slice_basis(p, prev2.generators, t, res.degree_cap);
                upstream = FpMatrix(p, tgt.dim(), prev_slice.dim());
                for (int c = 0; c < prev_slice.dim(); ++c) {
                    const auto& [gen, w] = prev_slice.entries[static_cast<std::size_t>(c)];
                    FreeElement img = scale_free(p, SteenrodElement::monomial(p, w),
                                                 prev.d_free[static_cast<std::size_t>(gen)]);
                    auto col = expand(img, tgt);
                    for (int r = 0; r < tgt.dim(); ++r)
                        upstream.set(r, c, col[static_cast<std::size_t>(r)]);
                }
            }
            int nullity = prev_slice.dim() - rank(upstream);

            const auto& stage = res.stages[static_cast<std::size_t>(s)];
            SliceBasis src = slice_basis(p, stage.generators, t, res.degree_cap);
            FpMatrix down(p, prev_slice.dim(), src.dim());
            for (int c = 0; c < src.dim(); ++c) {
                const auto& [gen, w] = src.entries[static_cast<std::size_t>(c)];
                FreeElement img = scale_free(p, SteenrodElement::monomial(p, w),
                                             stage.d_free[static_cast<std::size_t>(gen)]);
                auto col = expand(img, prev_slice);
                for (int r = 0; r < prev_slice.dim(); ++r)
                    down.set(r, c, col[static_cast<std::size_t>(r)]);
            }
            CPB_CHECK(rank(down) == nullity, "resolution is not exact in the window");
        }
    }
}

std::string line_label_name(LineLabel label) {
    switch (label) {
        case LineLabel::h0: return "h0";
        case LineLabel::h1: return "h1";
        case LineLabel::h2: return "h2";
        case LineLabel::a0: return "a0";
    }
    contract_fail("unknown line label");
}

int line_label_degree(int prime, LineLabel label) {
    switch (label) {
        case LineLabel::h0: return prime == 2 ? 1 : 4;
        case LineLabel::h1: return 2;
        case LineLabel::h2: return 4;
        case LineLabel::a0: return 1;
    }
    contract_fail("unknown line label");
}

ExtChart chart_of(const Resolution& res) {
    const int p = res.module.prime();
    ExtChart chart;
    chart.prime = p;
    chart.t_max = res.t_max;
    chart.s_max = res.s_max;

    std::map<std::pair<int, int>, int> dot_index;  // (s, generator index) -> dot
    for (int s = 0; s <= res.s_max; ++s) {
        const auto& stage = res.stages[static_cast<std::size_t>(s)];
        for (int j = 0; j < static_cast<int>(stage.generators.size()); ++j) {
            dot_index[{s, j}] = static_cast<int>(chart.dots.size());
            chart.dots.push_back({s, stage.generators[static_cast<std::size_t>(j)].t,
                                  stage.generators[static_cast<std::size_t>(j)].id});
        }
    }

    std::vector<std::pair<int, LineLabel>> detected;  // (token, label)
    if (p == 2)
        detected = {{1, LineLabel::h0}, {2, LineLabel::h1}, {4, LineLabel::h2}};
    else
        detected = {{0, LineLabel::a0}, {1, LineLabel::h0}};

    for (int s = 1; s <= res.s_max; ++s) {
        const auto& stage = res.stages[static_cast<std::size_t>(s)];
        for (int j = 0; j < static_cast<int>(stage.d_free.size()); ++j) {
            const FreeElement& v = stage.d_free[static_cast<std::size_t>(j)];
            for (int i = 0; i < static_cast<int>(v.size()); ++i) {
                const auto& terms = v[static_cast<std::size_t>(i)].terms();
                CPB_CHECK(terms.find(OpWord{}) == terms.end(),
                          "chart requires a minimal resolution");
                for (const auto& [token, label] : detected)
                    if (terms.find(OpWord{token}) != terms.end())
                        chart.lines.push_back({dot_index.at({s, j}), dot_index.at({s - 1, i}),
                                               label});
            }
        }
    }

    // Vertical strings: a stem is a tower when some chain of degree-1 lines
    // ends in a dot at the top of the filtration window.
    LineLabel vertical = p == 2 ? LineLabel::h0 : LineLabel::a0;
    std::vector<std::vector<int>> up(chart.dots.size());
    for (const auto& line : chart.lines)
        if (line.label == vertical) up[static_cast<std::size_t>(line.to)].push_back(line.from);
    std::vector<char> reaches(chart.dots.size(), 0);
    std::vector<int> order(chart.dots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return chart.dots[static_cast<std::size_t>(a)].s > chart.dots[static_cast<std::size_t>(b)].s;
    });
    std::set<int> tower_stems;
    for (int d : order) {
        if (chart.dots[static_cast<std::size_t>(d)].s == res.s_max) reaches[static_cast<std::size_t>(d)] = 1;
        for (int u : up[static_cast<std::size_t>(d)])
            if (reaches[static_cast<std::size_t>(u)]) reaches[static_cast<std::size_t>(d)] = 1;
        if (reaches[static_cast<std::size_t>(d)])
            tower_stems.insert(chart.dots[static_cast<std::size_t>(d)].t -
                               chart.dots[static_cast<std::size_t>(d)].s);
    }
    chart.towers.assign(tower_stems.begin(), tower_stems.end());
    return chart;
}

}  // namespace cpb
