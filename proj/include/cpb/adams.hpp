#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "cpb/cache.hpp"
#include "cpb/resolution.hpp"
#include "cpb/zab.hpp"

namespace cpb {

// One vertical string of an E-infinity chart: a Z tower when the string
// runs off the window, else a cyclic group of order prime^length.
struct Summand {
    bool infinite = false;
    int length = 0;
    int f0 = 0;             // filtration of the bottom dot
    std::vector<int> dots;  // chart dot indices, bottom to top
};

struct AssembledGroup {
    int stem = 0;
    std::vector<Summand> summands;  // towers first, then ascending f0
};

ZabGroup to_zab(const AssembledGroup& g, int prime);
std::string group_to_string(const AssembledGroup& g, int prime);

// 2-local orders of pi^s_{2n+4}(Sigma CP^infty_n) for the residues where
// the chart alone cannot decide the d2. Data, not code: swapping the table
// swaps the verdicts.
struct KnownFacts {
    std::map<int, long long> order_by_residue;  // keyed by n mod 8
    std::map<int, std::string> source;
};
KnownFacts default_known_facts();

// Settles every candidate differential out of stems 2n+2..2n+5: each must
// be excluded by h0-equivariance, except the single flagged d2 from the
// stem-(2n+5) tower onto the top of the stem-(2n+4) string, which the facts
// table decides. Removed dots drop their incident lines. Facts that cannot
// be reached from the chart raise verify_error.
ExtChart resolve_adams_differentials(const ExtChart& chart, const KnownFacts& facts, int n);

// Reads stable stems 1..2n+4 off an E-infinity chart. Unterminated strings
// are certified against the rational ranks (exactly one Z per odd stem
// >= 2n+1); a window too small to certify raises range_error.
std::map<int, AssembledGroup> assemble_groups(const ExtChart& e_inf, int n, int prime);

enum class StableElement { eta, nu };

// Multiplication pi_stem -> pi_{stem+1} (eta, h1 lines) or pi_{stem+3}
// (nu, h2 lines): a summand represented by a dot at filtration f maps to
// p^{(f+1) - f0} times the generator of the summand holding the lined dot.
ZabHom multiplication_map(const ExtChart& e_inf, const std::map<int, AssembledGroup>& groups,
                          StableElement elt, int stem);

struct StableRange {
    int prime = 2;
    int n = 1;
    ExtChart e2;
    ExtChart e_inf;
    std::map<int, AssembledGroup> groups;
};

int default_t_max(int n);  // 2n + 15
inline constexpr int kDefaultSMax = 12;

// Full pipeline for Sigma CP^infty_n: cached minimal resolution, chart,
// differentials, certified group assembly. Window overrides of 0 take the
// defaults; overrides below the soundness bounds raise config_error.
StableRange stable_range(int prime, int n, int t_max = 0, int s_max = 0,
                         bool use_cache = true,
                         const std::filesystem::path& cache_dir = cache_directory());

}  // namespace cpb
