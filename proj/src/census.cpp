#include "cpb/census.hpp"

#include <sstream>

#include "cpb/adams.hpp"
#include "cpb/ahss.hpp"
#include "cpb/errors.hpp"
#include "cpb/tables.hpp"

namespace cpb {

namespace {

void check_offset_and_bound(int l, int rank_offset) {
    if (rank_offset != 1 && rank_offset != 2)
        throw config_error("rank offset must be 1 or 2, got " +
                           std::to_string(rank_offset));
    int bound = rank_offset + 1;
    if (l <= bound) {
        std::ostringstream os;
        os << "rank l-" << rank_offset << " requires l > " << bound << ", got l = " << l;
        throw range_error(os.str());
    }
}

// Smallest d such that entries with equal l mod d carry equal totals.
int minimal_period(const std::vector<CountEntry>& entries) {
    int count = static_cast<int>(entries.size());
    for (int d = 1; d <= count; ++d) {
        std::map<int, long long> seen;
        bool ok = true;
        for (const auto& e : entries) {
            auto [it, fresh] = seen.emplace(e.l % d, e.total);
            if (!fresh && it->second != e.total) {
                ok = false;
                break;
            }
        }
        if (ok) return d;
    }
    return count;
}

void compare_residue(const CountEntry& e, long long got, const ResidueTable& table,
                     const char* label, std::vector<std::string>& mismatches) {
    long long want = table.values[static_cast<std::size_t>(e.l % table.period)];
    if (got != want) {
        std::ostringstream os;
        os << label << " at l = " << e.l << ": computed " << got << ", published "
           << want;
        mismatches.push_back(os.str());
    }
}

}  // namespace

long long local_order(int l, int rank_offset, int prime, bool use_cache,
                      const std::string& cache_dir) {
    check_offset_and_bound(l, rank_offset);
    int r = l - rank_offset;
    StableRange sr = stable_range(prime, r, 0, 0, use_cache, cache_dir);
    AHSSPage page = build_e2(l, r, prime, sr.groups);
    page = apply_d2(page, eta_maps_from(sr, l, r));
    page = advance_past_d3(page);
    ZabHom nu;
    if (prime == 2 && rank_offset == 2)
        nu = multiplication_map(sr.e_inf, sr.groups, StableElement::nu, 2 * l - 3);
    page = apply_d4(page, default_mosher_table(), nu);
    DiagonalResult res = diagonal_order(page);
    CPB_CHECK(res.order.has_value(),
              "diagonal order must be finite: " + res.diagnostic);
    return *res.order;
}

long long count_bundles(int l, int rank_offset, bool use_cache,
                        const std::string& cache_dir) {
    long long two = local_order(l, rank_offset, 2, use_cache, cache_dir);
    long long three = local_order(l, rank_offset, 3, use_cache, cache_dir);
    CPB_CHECK(rank_offset != 1 || three == 1,
              "the rank l-1 rows carry no 3-torsion");
    return two * three;
}

CountTable census(int l_min, int l_max, int rank_offset, bool use_cache,
                  const std::string& cache_dir) {
    if (rank_offset != 1 && rank_offset != 2)
        throw config_error("rank offset must be 1 or 2, got " +
                           std::to_string(rank_offset));
    CountTable table;
    table.rank_offset = rank_offset;
    table.l_min = l_min;
    table.l_max = l_max;
    for (int l = l_min; l <= l_max; ++l) {
        CountEntry e;
        e.l = l;
        e.two_local = local_order(l, rank_offset, 2, use_cache, cache_dir);
        e.three_local = local_order(l, rank_offset, 3, use_cache, cache_dir);
        e.total = e.two_local * e.three_local;
        CPB_CHECK(rank_offset != 1 || e.three_local == 1,
                  "the rank l-1 rows carry no 3-torsion");
        table.entries.push_back(e);
    }
    table.periodicity.period = minimal_period(table.entries);
    for (const auto& e : table.entries) {
        int residue = table.periodicity.period > 0 ? e.l % table.periodicity.period : 0;
        table.periodicity.residue_values.emplace(residue, e.total);
    }
    const PublishedTables& pub = published_tables();
    for (const auto& e : table.entries) {
        if (rank_offset == 1) {
            compare_residue(e, e.total, pub.psi, "count", table.periodicity.mismatches);
        } else {
            compare_residue(e, e.total, pub.phi, "count", table.periodicity.mismatches);
            compare_residue(e, e.two_local, pub.two_local, "2-local order",
                            table.periodicity.mismatches);
            compare_residue(e, e.three_local, pub.three_local, "3-local order",
                            table.periodicity.mismatches);
        }
    }
    return table;
}

}  // namespace cpb
