#pragma once

#include <map>
#include <string>
#include <vector>

#include "cpb/adams.hpp"

namespace cpb {

// Residue-indexed table of published values: values[x mod period].
struct ResidueTable {
    int period = 1;
    std::vector<long long> values;
    std::string citation;
};

// Residue-indexed rows of group strings for stems 2n+1 .. 2n+4.
struct GroupRowTable {
    int period = 1;
    std::vector<std::vector<std::string>> rows;
    std::string citation;
};

struct PublishedTables {
    std::string version;
    ResidueTable psi;          // rank l-1 counts by l mod 2
    ResidueTable phi;          // rank l-2 counts by l mod 24
    ResidueTable two_local;    // rank l-2 2-local diagonal orders by l mod 8
    ResidueTable three_local;  // rank l-2 3-local diagonal orders by l mod 3
    GroupRowTable pi2;         // 2-local stem rows by n mod 8
    GroupRowTable pi3;         // 3-local stem rows by n mod 3
};

// The embedded copy of data/published_tables.json; the binary never reads
// the file at run time, a test guards against drift between the two.
const std::string& published_tables_text();
const PublishedTables& published_tables();

// Compare computed groups for stems 2n+1 .. 2n+4 against the published
// rows; returns one description per mismatch, empty when clean.
std::vector<std::string> verify_pi_stable(const std::map<int, AssembledGroup>& groups,
                                          int n, int prime);

}  // namespace cpb
