#include "cpb/tables.hpp"

#include <sstream>

#include "cpb/errors.hpp"
#include "json.hpp"

namespace cpb {

namespace {

const char* kTablesText = R"json({
  "version": "cpb-tables-1",
  "psi": {
    "period": 2,
    "values": [1, 2],
    "citation": "counts of rank l-1 stable bundle classes over CP^l, indexed by l mod 2"
  },
  "phi": {
    "period": 24,
    "values": [1, 1, 12, 2, 1, 3, 2, 2, 3, 1, 4, 6, 1, 1, 6, 2, 1, 3, 4, 2, 3, 1, 2, 6],
    "citation": "counts of rank l-2 stable bundle classes over CP^l, indexed by l mod 24"
  },
  "two_local_diagonal": {
    "period": 8,
    "values": [1, 1, 4, 2, 1, 1, 2, 2],
    "citation": "2-local diagonal orders of the rank l-2 spectral sequence, indexed by l mod 8"
  },
  "three_local_diagonal": {
    "period": 3,
    "values": [1, 1, 3],
    "citation": "3-local diagonal orders of the rank l-2 spectral sequence, indexed by l mod 3"
  },
  "pi_stable_2local": {
    "period": 8,
    "rows": [
      ["Z", "Z/2", "Z+Z/2", "Z/8"],
      ["Z", "0", "Z", "Z/4"],
      ["Z", "Z/2", "Z+Z/2", "Z/2"],
      ["Z", "0", "Z", "0"],
      ["Z", "Z/2", "Z+Z/2", "Z/4"],
      ["Z", "0", "Z", "Z/2"],
      ["Z", "Z/2", "Z+Z/2", "Z/2"],
      ["Z", "0", "Z", "0"]
    ],
    "citation": "2-local pi^s_{2n+1}..pi^s_{2n+4} of Sigma CP^infty_n, rows indexed by n mod 8; the bottom tower uses Mosher's metastable computation and Matsunaga's unitary group tables"
  },
  "pi_stable_3local": {
    "period": 3,
    "rows": [
      ["Z", "0", "Z", "Z/3"],
      ["Z", "0", "Z", "0"],
      ["Z", "0", "Z", "0"]
    ],
    "citation": "3-local pi^s_{2n+1}..pi^s_{2n+4} of Sigma CP^infty_n, rows indexed by n mod 3"
  }
}
)json";

ResidueTable parse_residues(const nlohmann::ordered_json& j) {
    ResidueTable t;
    t.period = j.at("period").get<int>();
    t.values = j.at("values").get<std::vector<long long>>();
    t.citation = j.at("citation").get<std::string>();
    CPB_CHECK(t.period > 0 && t.values.size() == static_cast<std::size_t>(t.period),
              "residue table length must equal its period");
    return t;
}

GroupRowTable parse_rows(const nlohmann::ordered_json& j) {
    GroupRowTable t;
    t.period = j.at("period").get<int>();
    t.rows = j.at("rows").get<std::vector<std::vector<std::string>>>();
    t.citation = j.at("citation").get<std::string>();
    CPB_CHECK(t.period > 0 && t.rows.size() == static_cast<std::size_t>(t.period),
              "row table length must equal its period");
    for (const auto& row : t.rows)
        CPB_CHECK(row.size() == 4, "each row covers stems 2n+1 .. 2n+4");
    return t;
}

PublishedTables parse_tables(const std::string& text) {
    auto j = nlohmann::ordered_json::parse(text);
    PublishedTables t;
    t.version = j.at("version").get<std::string>();
    t.psi = parse_residues(j.at("psi"));
    t.phi = parse_residues(j.at("phi"));
    t.two_local = parse_residues(j.at("two_local_diagonal"));
    t.three_local = parse_residues(j.at("three_local_diagonal"));
    t.pi2 = parse_rows(j.at("pi_stable_2local"));
    t.pi3 = parse_rows(j.at("pi_stable_3local"));
    return t;
}

}  // namespace

const std::string& published_tables_text() {
    static const std::string text = kTablesText;
    return text;
}

const PublishedTables& published_tables() {
    static const PublishedTables tables = parse_tables(published_tables_text());
    return tables;
}

std::vector<std::string> verify_pi_stable(const std::map<int, AssembledGroup>& groups,
                                          int n, int prime) {
    if (prime != 2 && prime != 3)
        throw config_error("prime must be 2 or 3, got " + std::to_string(prime));
    const GroupRowTable& table = prime == 2 ? published_tables().pi2 : published_tables().pi3;
    const auto& row = table.rows[static_cast<std::size_t>(n % table.period)];
    std::vector<std::string> mismatches;
    for (int i = 0; i < 4; ++i) {
        int stem = 2 * n + 1 + i;
        std::ostringstream os;
        auto it = groups.find(stem);
        if (it == groups.end()) {
            os << "stem " << stem << " (n = " << n << ", p = " << prime
               << "): missing from the computed groups";
            mismatches.push_back(os.str());
            continue;
        }
        std::string computed = group_to_string(it->second, prime);
        if (computed != row[static_cast<std::size_t>(i)]) {
            os << "stem " << stem << " (n = " << n << ", p = " << prime << "): computed "
               << computed << ", published " << row[static_cast<std::size_t>(i)];
            mismatches.push_back(os.str());
        }
    }
    return mismatches;
}

}  // namespace cpb
