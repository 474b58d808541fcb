#pragma once

#include <map>
#include <string>
#include <vector>

#include "cpb/cache.hpp"

namespace cpb {

struct CountEntry {
    int l = 0;
    long long two_local = 1;
    long long three_local = 1;
    long long total = 1;  // two_local * three_local; no p-torsion for p >= 5
};

struct PeriodicityReport {
    int period = 0;  // smallest period consistent with the computed range
    std::map<int, long long> residue_values;
    std::vector<std::string> mismatches;  // against the published tables
};

struct CountTable {
    int rank_offset = 1;  // counts bundles of rank l - rank_offset
    int l_min = 0;
    int l_max = -1;
    std::vector<CountEntry> entries;
    PeriodicityReport periodicity;
};

// Diagonal order of the p-local spectral sequence for {CP^l, Sigma
// CP^infty_{l-offset}}; the bundle count is the product over p in {2, 3}.
long long local_order(int l, int rank_offset, int prime, bool use_cache = true,
                      const std::string& cache_dir = cache_directory());

// Number of stable equivalence classes of rank l - rank_offset bundles
// over CP^l. Requires l > 2 for offset 1 and l > 3 for offset 2.
long long count_bundles(int l, int rank_offset, bool use_cache = true,
                        const std::string& cache_dir = cache_directory());

CountTable census(int l_min, int l_max, int rank_offset, bool use_cache = true,
                  const std::string& cache_dir = cache_directory());

}  // namespace cpb
