#include "cpb/adams.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <sstream>

#include "cpb/errors.hpp"

namespace cpb {

namespace {

constexpr int kInfinite = std::numeric_limits<int>::max() / 4;

long long ipow(long long base, int e) {
    long long out = 1;
    for (int i = 0; i < e; ++i) out *= base;
    return out;
}

LineLabel vertical_label(int prime) { return prime == 2 ? LineLabel::h0 : LineLabel::a0; }

int stem_of(const ExtChart& chart, int dot) {
    const ChartDot& d = chart.dots[static_cast<std::size_t>(dot)];
    return d.t - d.s;
}

// Vertical-string decomposition of a chart. Every dot lies in exactly one
// maximal string; a dot with two strings attached has no group reading.
struct Chains {
    std::vector<int> up;
    std::vector<int> down;
    std::vector<std::vector<int>> chains;  // dot indices, bottom to top
    std::vector<int> chain_of;
    std::vector<int> pos;
};

Chains vertical_chains(const ExtChart& chart) {
    const int nd = static_cast<int>(chart.dots.size());
    Chains c;
    c.up.assign(static_cast<std::size_t>(nd), -1);
    c.down.assign(static_cast<std::size_t>(nd), -1);
    const LineLabel vert = vertical_label(chart.prime);
    for (const ChartLine& line : chart.lines) {
        if (line.label != vert) continue;
        if (c.up[static_cast<std::size_t>(line.to)] != -1 ||
            c.down[static_cast<std::size_t>(line.from)] != -1) {
            throw data_error("two vertical lines meet one dot; no group reading");
        }
        c.up[static_cast<std::size_t>(line.to)] = line.from;
        c.down[static_cast<std::size_t>(line.from)] = line.to;
    }
    c.chain_of.assign(static_cast<std::size_t>(nd), -1);
    c.pos.assign(static_cast<std::size_t>(nd), 0);
    for (int d = 0; d < nd; ++d) {
        if (c.down[static_cast<std::size_t>(d)] != -1) continue;
        std::vector<int> chain;
        for (int cur = d; cur != -1; cur = c.up[static_cast<std::size_t>(cur)]) {
            c.chain_of[static_cast<std::size_t>(cur)] = static_cast<int>(c.chains.size());
            c.pos[static_cast<std::size_t>(cur)] = static_cast<int>(chain.size());
            chain.push_back(cur);
        }
        c.chains.push_back(std::move(chain));
    }
    return c;
}

// A string whose top dot has no room for a further vertical step inside the
// window could continue beyond it; only such strings can be towers.
bool chain_unterminated(const ExtChart& chart, const std::vector<int>& chain) {
    const ChartDot& top = chart.dots[static_cast<std::size_t>(chain.back())];
    return top.s + 1 > chart.s_max || top.t + 1 > chart.t_max;
}

// Number of nonzero vertical multiplications above the dot; "infinite" on
// an unterminated string.
int height_above(const ExtChart& chart, const Chains& c, int dot) {
    const auto& chain = c.chains[static_cast<std::size_t>(c.chain_of[static_cast<std::size_t>(dot)])];
    if (chain_unterminated(chart, chain)) return kInfinite;
    return static_cast<int>(chain.size()) - 1 - c.pos[static_cast<std::size_t>(dot)];
}

// Rational certification: each odd stem in [stem_lo, stem_hi] holds exactly
// one unterminated string (the Z), even stems none.
void certify_towers(const ExtChart& chart, const Chains& c, int stem_lo, int stem_hi) {
    for (int stem = stem_lo; stem <= stem_hi; ++stem) {
        int unterminated = 0;
        for (const auto& chain : c.chains) {
            if (stem_of(chart, chain.front()) != stem) continue;
            if (chain_unterminated(chart, chain)) ++unterminated;
        }
        const int expected = stem % 2 == 1 ? 1 : 0;
        if (unterminated != expected) {
            std::ostringstream msg;
            msg << "window too small to certify stem " << stem << ": " << unterminated
                << " candidate tower(s), rational rank admits " << expected
                << "; raise s_max or t_max";
            throw range_error(msg.str());
        }
    }
}

void check_bottom_stem(const ExtChart& chart, int n) {
    for (std::size_t i = 0; i < chart.dots.size(); ++i) {
        if (stem_of(chart, static_cast<int>(i)) < 2 * n + 1) {
            throw data_error("chart holds a dot below the bottom cell stem");
        }
    }
}

long long finite_stem_order(const ExtChart& chart, const Chains& c, int stem) {
    long long order = 1;
    for (const auto& chain : c.chains) {
        if (stem_of(chart, chain.front()) != stem) continue;
        if (chain_unterminated(chart, chain)) continue;
        order *= ipow(chart.prime, static_cast<int>(chain.size()));
    }
    return order;
}

ExtChart remove_dots(const ExtChart& chart, int a, int b) {
    ExtChart out;
    out.prime = chart.prime;
    out.t_max = chart.t_max;
    out.s_max = chart.s_max;
    out.towers = chart.towers;
    std::vector<int> remap(chart.dots.size(), -1);
    for (std::size_t i = 0; i < chart.dots.size(); ++i) {
        if (static_cast<int>(i) == a || static_cast<int>(i) == b) continue;
        remap[i] = static_cast<int>(out.dots.size());
        out.dots.push_back(chart.dots[i]);
    }
    for (const ChartLine& line : chart.lines) {
        const int from = remap[static_cast<std::size_t>(line.from)];
        const int to = remap[static_cast<std::size_t>(line.to)];
        if (from == -1 || to == -1) continue;  // incident lines go with the dots
        out.lines.push_back(ChartLine{from, to, line.label});
    }
    return out;
}

}  // namespace

KnownFacts default_known_facts() {
    KnownFacts facts;
    facts.order_by_residue = {{0, 8}, {1, 4}, {4, 4}, {5, 2}};
    const std::string tag = "2-local pi_{2n+3}(U(n)) tables (Matsunaga)";
    for (const auto& [residue, order] : facts.order_by_residue) {
        (void)order;
        facts.source[residue] = tag;
    }
    return facts;
}

ExtChart resolve_adams_differentials(const ExtChart& chart, const KnownFacts& facts, int n) {
    CPB_CHECK(n >= 1, "n must be positive");
    const int p = chart.prime;
    if (chart.t_max < 2 * n + 9 || chart.s_max < 4) {
        throw range_error("window does not cover stems through 2n+5; need t_max >= 2n+9 and s_max >= 4");
    }
    check_bottom_stem(chart, n);
    const Chains c = vertical_chains(chart);
    certify_towers(chart, c, 2 * n + 1, 2 * n + 5);

    // The one differential the chart cannot exclude: d2 from the
    // stem-(2n+5) tower onto the top of the stem-(2n+4) string.
    std::optional<std::pair<int, int>> flagged;  // (source dot, target dot)
    if (p == 2 && facts.order_by_residue.contains(n % 8)) {
        std::optional<int> string_top;
        for (const auto& chain : c.chains) {
            if (stem_of(chart, chain.front()) != 2 * n + 4) continue;
            if (chain_unterminated(chart, chain)) continue;
            CPB_CHECK(!string_top.has_value(), "several strings in stem 2n+4");
            string_top = chain.back();
        }
        if (string_top.has_value()) {
            const int want_s = chart.dots[static_cast<std::size_t>(*string_top)].s - 2;
            for (const auto& chain : c.chains) {
                if (stem_of(chart, chain.front()) != 2 * n + 5) continue;
                if (!chain_unterminated(chart, chain)) continue;
                for (int dot : chain) {
                    if (chart.dots[static_cast<std::size_t>(dot)].s == want_s) {
                        flagged = {dot, *string_top};
                    }
                }
            }
        }
    }

    // Everything else must fall to h0-equivariance: a class with k nonzero
    // vertical multiplications cannot hit one with more.
    for (std::size_t ui = 0; ui < chart.dots.size(); ++ui) {
        const int u = static_cast<int>(ui);
        const int stem_u = stem_of(chart, u);
        if (stem_u < 2 * n + 2 || stem_u > 2 * n + 5) continue;
        for (std::size_t vi = 0; vi < chart.dots.size(); ++vi) {
            const int v = static_cast<int>(vi);
            if (stem_of(chart, v) != stem_u - 1) continue;
            if (chart.dots[vi].s < chart.dots[ui].s + 2) continue;
            if (flagged && flagged->first == u && flagged->second == v) continue;
            if (height_above(chart, c, v) > height_above(chart, c, u)) continue;
            std::ostringstream msg;
            msg << "candidate d" << chart.dots[vi].s - chart.dots[ui].s << " ("
                << chart.dots[ui].s << "," << chart.dots[ui].t << ") -> ("
                << chart.dots[vi].s << "," << chart.dots[vi].t
                << ") is not excluded by h0-equivariance or the facts table";
            throw verify_error(msg.str());
        }
    }

    if (p != 2 || !facts.order_by_residue.contains(n % 8)) return chart;

    const long long required = facts.order_by_residue.at(n % 8);
    const long long e2_order = finite_stem_order(chart, c, 2 * n + 4);
    if (e2_order == required) return chart;  // the flagged d2 is zero
    if (flagged && e2_order == required * p) {
        return remove_dots(chart, flagged->first, flagged->second);
    }
    std::ostringstream msg;
    msg << "facts give order " << required << " in stem " << 2 * n + 4
        << " but the chart order " << e2_order << " cannot reach it";
    throw verify_error(msg.str());
}

std::map<int, AssembledGroup> assemble_groups(const ExtChart& e_inf, int n, int prime) {
    CPB_CHECK(prime == e_inf.prime, "prime disagrees with the chart");
    CPB_CHECK(n >= 1, "n must be positive");
    if (e_inf.t_max < 2 * n + 8 || e_inf.s_max < 4) {
        throw range_error("window does not cover stems through 2n+4; need t_max >= 2n+8 and s_max >= 4");
    }
    check_bottom_stem(e_inf, n);
    const Chains c = vertical_chains(e_inf);
    certify_towers(e_inf, c, 2 * n + 1, 2 * n + 4);

    std::map<int, AssembledGroup> out;
    for (int stem = 1; stem <= 2 * n + 4; ++stem) out[stem] = AssembledGroup{stem, {}};
    for (const auto& chain : c.chains) {
        const int stem = stem_of(e_inf, chain.front());
        if (stem > 2 * n + 4) continue;
        Summand s;
        s.f0 = e_inf.dots[static_cast<std::size_t>(chain.front())].s;
        s.dots = chain;
        if (chain_unterminated(e_inf, chain)) {
            s.infinite = true;
        } else {
            s.length = static_cast<int>(chain.size());
        }
        for (std::size_t i = 0; i < chain.size(); ++i) {
            CPB_CHECK(e_inf.dots[static_cast<std::size_t>(chain[i])].s ==
                          s.f0 + static_cast<int>(i),
                      "filtrations in a summand must be consecutive");
        }
        out[stem].summands.push_back(std::move(s));
    }
    for (auto& [stem, group] : out) {
        (void)stem;
        std::stable_sort(group.summands.begin(), group.summands.end(),
                         [](const Summand& a, const Summand& b) {
                             if (a.infinite != b.infinite) return a.infinite;
                             return a.f0 < b.f0;
                         });
    }
    return out;
}

ZabGroup to_zab(const AssembledGroup& g, int prime) {
    std::vector<long long> orders;
    for (const Summand& s : g.summands) {
        orders.push_back(s.infinite ? 0 : ipow(prime, s.length));
    }
    return ZabGroup::cyclic_sum(orders);
}

std::string group_to_string(const AssembledGroup& g, int prime) {
    return group_to_string(to_zab(g, prime));
}

ZabHom multiplication_map(const ExtChart& e_inf, const std::map<int, AssembledGroup>& groups,
                          StableElement elt, int stem) {
    const int p = e_inf.prime;
    const int shift = elt == StableElement::eta ? 1 : 3;
    const LineLabel want = elt == StableElement::eta ? LineLabel::h1 : LineLabel::h2;
    const auto src_it = groups.find(stem);
    const auto dst_it = groups.find(stem + shift);
    if (src_it == groups.end() || dst_it == groups.end()) {
        throw range_error("multiplication stem outside the assembled range");
    }
    const AssembledGroup& src = src_it->second;
    const AssembledGroup& dst = dst_it->second;

    std::map<int, int> summand_of;  // target dot -> target summand index
    for (std::size_t i = 0; i < dst.summands.size(); ++i) {
        for (int dot : dst.summands[i].dots) summand_of[dot] = static_cast<int>(i);
    }

    ZabHom h{to_zab(src, p), to_zab(dst, p),
             ZMat(static_cast<int>(dst.summands.size()), static_cast<int>(src.summands.size()))};
    for (std::size_t j = 0; j < src.summands.size(); ++j) {
        const int rep = src.summands[j].dots.front();
        for (const ChartLine& line : e_inf.lines) {
            if (line.label != want || line.to != rep) continue;
            const auto it = summand_of.find(line.from);
            if (it == summand_of.end()) {
                throw data_error("multiplication lands on a dot outside every summand");
            }
            const Summand& target = dst.summands[static_cast<std::size_t>(it->second)];
            const int f1 = e_inf.dots[static_cast<std::size_t>(line.from)].s;
            h.m.at(it->second, static_cast<int>(j)) += ipow(p, f1 - target.f0);
        }
    }
    CPB_CHECK(hom_well_defined(h), "multiplication map does not respect the relations");
    return h;
}

int default_t_max(int n) { return 2 * n + 15; }

StableRange stable_range(int prime, int n, int t_max, int s_max, bool use_cache,
                         const std::filesystem::path& cache_dir) {
    if (prime != 2 && prime != 3) throw config_error("prime must be 2 or 3");
    if (n < 1) throw range_error("n must be at least 1");
    if (t_max == 0) t_max = default_t_max(n);
    if (s_max == 0) s_max = kDefaultSMax;
    if (t_max < 2 * n + 9 || s_max < 4) {
        throw config_error("window override below the soundness bound: need t_max >= 2n+9 and s_max >= 4");
    }
    const CacheKey key{prime, n, t_max, t_max, s_max};
    Resolution res = resolve_stunted_cached(key, use_cache, cache_dir);
    StableRange out;
    out.prime = prime;
    out.n = n;
    out.e2 = chart_of(res);
    out.e_inf = resolve_adams_differentials(out.e2, default_known_facts(), n);
    out.groups = assemble_groups(out.e_inf, n, prime);
    return out;
}

}  // namespace cpb
