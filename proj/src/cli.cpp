#include "cpb/cli.hpp"

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpb/adams.hpp"
#include "cpb/ahss.hpp"
#include "cpb/cache.hpp"
#include "cpb/census.hpp"
#include "cpb/errors.hpp"
#include "cpb/render.hpp"
#include "cpb/resolution.hpp"
#include "cpb/steenrod.hpp"
#include "cpb/stunted.hpp"
#include "cpb/tables.hpp"
#include "json.hpp"

namespace cpb {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

fs::path dir_of(const RunConfig& cfg) {
    return cfg.cache_dir.empty() ? cache_directory() : fs::path(cfg.cache_dir);
}

void require_format(const RunConfig& cfg, const std::vector<std::string>& allowed) {
    for (const auto& f : allowed)
        if (cfg.format == f) return;
    std::string list;
    for (const auto& f : allowed) list += (list.empty() ? "" : ", ") + f;
    throw usage_error("unsupported format: " + cfg.format + " (expected " + list + ")");
}

int parse_rank_offset(const std::string& rank) {
    if (rank == "l-1") return 1;
    if (rank == "l-2") return 2;
    throw usage_error("unsupported rank family: " + rank + " (expected l-1 or l-2)");
}

void add_cache_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_flag_callback(
        "--no-cache", [&cfg] { cfg.use_cache = false; },
        "compute fresh, neither reading nor writing the resolution cache");
    cmd->add_option("--cache-dir", cfg.cache_dir, "cache directory override");
}

int run_adem(const RunConfig& cfg, const std::string& word) {
    OpWord w = parse_word(cfg.prime, word);
    std::cout << adem_normalize(cfg.prime, w).str() << "\n";
    return 0;
}

int run_module(const RunConfig& cfg, int n, int k) {
    require_format(cfg, {"text", "json"});
    int t_max = cfg.t_max > 0 ? cfg.t_max : (k >= 0 ? 2 * (n + k) + 2 : default_t_max(n));
    if (k < 0) k = t_max;  // infinite stunted space, truncated by the window
    ModulePresentation m = stunted_module(cfg.prime, n, k, t_max);
    if (cfg.format == "json") {
        json j;
        j["prime"] = cfg.prime;
        j["n"] = m.meta().n;
        j["k"] = m.meta().k;
        j["shift"] = m.meta().shift;
        j["cells"] = m.degrees();
        j["arcs"] = json::array();
        for (const auto& arc : m.generator_arcs())
            j["arcs"].push_back({{"op", arc.op}, {"from", arc.from}, {"to", arc.to}});
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "module Sigma CP^{n+k}_n, p = " << cfg.prime << ", n = " << m.meta().n
              << ", k = " << m.meta().k << ", shift = " << m.meta().shift << "\n";
    std::cout << "cells (degrees up to t <= " << t_max << "):";
    for (int d : m.degrees()) std::cout << " " << d;
    std::cout << "\n";
    std::cout << "generator arcs:\n";
    for (const auto& arc : m.generator_arcs())
        std::cout << "  " << arc.op << " " << arc.from << " -> " << arc.to << "\n";
    return 0;
}

int run_resolve(const RunConfig& cfg, int n, int k) {
    require_format(cfg, {"text", "json", "ascii", "svg"});
    int t_max = cfg.t_max > 0 ? cfg.t_max : default_t_max(n);
    int s_max = cfg.s_max > 0 ? cfg.s_max : kDefaultSMax;
    if (k < 0) k = t_max;  // infinite stunted space, truncated by the window
    CacheKey key{cfg.prime, n, k, t_max, s_max};
    Resolution res = resolve_stunted_cached(key, cfg.use_cache, dir_of(cfg));
    if (cfg.format == "json") {
        std::cout << resolution_to_json(res);
        return 0;
    }
    if (cfg.format == "ascii" || cfg.format == "svg")
        std::cout << render_chart(chart_of(res), parse_render_format(cfg.format));
    else {
        std::cout << "minimal resolution, p = " << cfg.prime << ", n = " << n
                  << ", k = " << k << ", t <= " << res.t_max << ", s <= " << res.s_max
                  << "\n";
        for (const auto& stage : res.stages) {
            std::cout << "stage " << stage.s << ":";
            for (const auto& g : stage.generators) std::cout << " " << g.id;
            std::cout << "\n";
        }
    }
    return 0;
}

int run_pi_stable(const RunConfig& cfg, int n, bool verify) {
    require_format(cfg, {"text", "json", "ascii", "svg"});
    StableRange sr =
        stable_range(cfg.prime, n, cfg.t_max, cfg.s_max, cfg.use_cache, dir_of(cfg));
    if (cfg.format == "ascii" || cfg.format == "svg") {
        std::cout << render_chart(sr.e_inf, parse_render_format(cfg.format));
    } else if (cfg.format == "json") {
        json j;
        j["prime"] = cfg.prime;
        j["n"] = n;
        j["groups"] = json::array();
        for (const auto& [stem, g] : sr.groups)
            j["groups"].push_back({{"stem", stem}, {"group", group_to_string(g, cfg.prime)}});
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "pi^s_i(Sigma CP^infty_" << n << "), p = " << cfg.prime << ":\n";
        for (const auto& [stem, g] : sr.groups)
            std::cout << "  i = " << stem << ": " << group_to_string(g, cfg.prime) << "\n";
    }
    if (verify) {
        auto mismatches = verify_pi_stable(sr.groups, n, cfg.prime);
        if (!mismatches.empty()) {
            for (const auto& m : mismatches) std::cerr << "mismatch: " << m << "\n";
            throw verify_error("computed stable stems disagree with the published rows");
        }
        std::cerr << "verified: stems " << 2 * n + 1 << ".." << 2 * n + 4
                  << " match the published rows\n";
    }
    return 0;
}

// The four retained pages of {CP^l, Sigma CP^infty_r}: E2, then the states
// after d2, after the vacuous d3 band, and after d4.
std::vector<AHSSPage> ahss_pages(const RunConfig& cfg, int l, int r) {
    StableRange sr = stable_range(cfg.prime, r, 0, 0, cfg.use_cache, dir_of(cfg));
    std::vector<AHSSPage> pages;
    pages.push_back(build_e2(l, r, cfg.prime, sr.groups));
    pages.push_back(apply_d2(pages.back(), eta_maps_from(sr, l, r)));
    pages.push_back(advance_past_d3(pages.back()));
    ZabHom nu;
    if (cfg.prime == 2 && r == l - 2)
        nu = multiplication_map(sr.e_inf, sr.groups, StableElement::nu, 2 * l - 3);
    pages.push_back(apply_d4(pages.back(), default_mosher_table(), nu));
    return pages;
}

int run_ahss(const RunConfig& cfg, int l, const std::string& rank, bool dump_pages) {
    require_format(cfg, {"text", "json", "ascii", "svg"});
    int offset = parse_rank_offset(rank);
    int r = l - offset;
    std::vector<AHSSPage> pages = ahss_pages(cfg, l, r);
    DiagonalResult diag = diagonal_order(pages.back());
    std::cout << "ahss {CP^" << l << ", Sigma CP^infty_" << r << "}, p = " << cfg.prime
              << "\n";
    if (diag.order)
        std::cout << "diagonal order: " << *diag.order << "\n";
    else
        std::cout << "diagonal order: infinite\n";
    std::cout << diag.diagnostic << "\n";
    if (dump_pages) {
        RenderFormat fmt =
            cfg.format == "text" ? RenderFormat::ascii : parse_render_format(cfg.format);
        for (const auto& page : pages) std::cout << "\n" << render_chart(page, fmt);
    }
    return 0;
}

int run_count(const RunConfig& cfg, int l, const std::string& rank) {
    require_format(cfg, {"text", "json"});
    int offset = parse_rank_offset(rank);
    CountTable table = census(l, l, offset, cfg.use_cache, dir_of(cfg).string());
    CPB_CHECK(table.entries.size() == 1, "single-l census must hold one entry");
    const CountEntry& e = table.entries.front();
    if (cfg.format == "json") {
        json j{{"l", l},
               {"rank", rank},
               {"two_local", e.two_local},
               {"three_local", e.three_local},
               {"total", e.total}};
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "rank-" << (l - offset) << " bundles over CP^" << l << ": " << e.total
              << "  (2-local " << e.two_local << ", 3-local " << e.three_local << ")\n";
    return 0;
}

int run_census(const RunConfig& cfg, const std::string& rank, int l_min, int l_max,
               bool verify) {
    require_format(cfg, {"text", "json", "csv"});
    int offset = parse_rank_offset(rank);
    if (l_min == 0) l_min = offset + 2;
    CountTable table = census(l_min, l_max, offset, cfg.use_cache, dir_of(cfg).string());
    if (cfg.format == "json") {
        json j;
        j["rank"] = rank;
        j["l_min"] = table.l_min;
        j["l_max"] = table.l_max;
        j["entries"] = json::array();
        for (const auto& e : table.entries)
            j["entries"].push_back({{"l", e.l},
                                    {"two_local", e.two_local},
                                    {"three_local", e.three_local},
                                    {"total", e.total}});
        j["period"] = table.periodicity.period;
        j["residues"] = json::object();
        for (const auto& [res, v] : table.periodicity.residue_values)
            j["residues"][std::to_string(res)] = v;
        std::cout << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        std::cout << "l,two_local,three_local,total\n";
        for (const auto& e : table.entries)
            std::cout << e.l << "," << e.two_local << "," << e.three_local << ","
                      << e.total << "\n";
    } else {
        std::cout << "census of rank-(" << rank << ") bundles over CP^l, l = " << l_min
                  << ".." << l_max << "\n";
        std::cout << "   l  2-local  3-local  total\n";
        for (const auto& e : table.entries) {
            std::ostringstream row;
            row.width(4);
            row << e.l;
            row.width(9);
            row << e.two_local;
            row.width(9);
            row << e.three_local;
            row.width(7);
            row << e.total;
            std::cout << row.str() << "\n";
        }
        std::cout << "detected minimal period: " << table.periodicity.period << "\n";
        for (const auto& [res, v] : table.periodicity.residue_values)
            std::cout << "  l = " << res << " mod " << table.periodicity.period << ": "
                      << v << "\n";
    }
    if (verify) {
        if (!table.periodicity.mismatches.empty()) {
            for (const auto& m : table.periodicity.mismatches)
                std::cerr << "mismatch: " << m << "\n";
            throw verify_error("census disagrees with the published residue tables");
        }
        std::cerr << "verified: counts match the published residue tables\n";
    }
    return 0;
}

int run_cache(const RunConfig& cfg, bool stats, bool clear) {
    fs::path dir = dir_of(cfg);
    if (clear) {
        CacheStats before = cache_stats(dir);
        cache_clear(dir);
        std::cout << "cleared " << before.entries << " entries from " << dir.string()
                  << "\n";
        return 0;
    }
    if (stats) {
        CacheStats s = cache_stats(dir);
        std::cout << "dir: " << dir.string() << "\n";
        std::cout << "entries: " << s.entries << "\n";
        std::cout << "bytes: " << s.bytes << "\n";
        return 0;
    }
    throw usage_error("cache requires an action: stats or clear");
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    RunConfig cfg;
    CLI::App app{"stable vector bundle counts over complex projective spaces"};
    app.require_subcommand(1);
    app.fallthrough(false);

    std::string word, rank;
    int n = 0, k = 0, l = 0, l_min = 0, l_max = 0;
    bool verify = false, dump_pages = false;

    CLI::App* adem = app.add_subcommand("adem", "normalize a Steenrod operation word");
    adem->add_option("--prime", cfg.prime, "prime, 2 or 3")->capture_default_str();
    adem->add_option("word", word, "operation word, e.g. \"Sq2 Sq2\"")->required();

    CLI::App* module_cmd =
        app.add_subcommand("module", "print the cohomology module of Sigma CP^{n+k}_n");
    module_cmd->add_option("--prime", cfg.prime, "prime, 2 or 3")->capture_default_str();
    module_cmd->add_option("--n", n, "bottom cell parameter")->required();
    module_cmd->add_option("--k", k, "width parameter, -1 for the infinite stunted space")
        ->required();
    module_cmd->add_option("--tmax", cfg.t_max, "top degree retained");
    module_cmd->add_option("--format", cfg.format, "text or json")->capture_default_str();

    CLI::App* resolve =
        app.add_subcommand("resolve", "minimal free resolution and its chart");
    resolve->add_option("--prime", cfg.prime, "prime, 2 or 3")->capture_default_str();
    resolve->add_option("--n", n, "bottom cell parameter")->required();
    resolve->add_option("--k", k, "width parameter, -1 for the infinite stunted space")
        ->required();
    resolve->add_option("--tmax", cfg.t_max, "window bound t <= tmax");
    resolve->add_option("--smax", cfg.s_max, "window bound s <= smax");
    resolve->add_option("--format", cfg.format, "text, json, ascii, or svg")
        ->capture_default_str();
    add_cache_flags(resolve, cfg);

    CLI::App* pi = app.add_subcommand("pi-stable",
                                      "stable homotopy groups of Sigma CP^infty_n");
    pi->add_option("--n", n, "bottom cell parameter")->required();
    pi->add_option("--prime", cfg.prime, "prime, 2 or 3")->capture_default_str();
    pi->add_option("--tmax", cfg.t_max, "window bound t <= tmax");
    pi->add_option("--smax", cfg.s_max, "window bound s <= smax");
    pi->add_option("--format", cfg.format, "text, json, ascii, or svg")
        ->capture_default_str();
    pi->add_flag("--verify-paper", verify,
                 "compare stems 2n+1..2n+4 against the published rows, exit 7 on drift");
    add_cache_flags(pi, cfg);

    CLI::App* ahss = app.add_subcommand("ahss", "spectral sequence for {CP^l, Sigma "
                                                "CP^infty_r}");
    ahss->add_option("--l", l, "source projective space CP^l")->required();
    ahss->add_option("--rank", rank, "rank family, l-1 or l-2")->required();
    ahss->add_option("--prime", cfg.prime, "prime, 2 or 3")->capture_default_str();
    ahss->add_flag("--dump-pages", dump_pages, "print every retained page");
    ahss->add_option("--format", cfg.format, "text, json, ascii, or svg")
        ->capture_default_str();
    add_cache_flags(ahss, cfg);

    CLI::App* count = app.add_subcommand("count", "bundle count for one CP^l");
    count->add_option("--l", l, "base space CP^l")->required();
    count->add_option("--rank", rank, "rank family, l-1 or l-2")
        ->default_val("l-1")
        ->capture_default_str();
    count->add_option("--format", cfg.format, "text or json")->capture_default_str();
    add_cache_flags(count, cfg);

    CLI::App* census_cmd = app.add_subcommand("census", "bundle counts over a range of l");
    census_cmd->add_option("--rank", rank, "rank family, l-1 or l-2")->required();
    census_cmd->add_option("--lmax", l_max, "largest l")->required();
    census_cmd->add_option("--lmin", l_min, "smallest l (default: smallest valid)");
    census_cmd->add_option("--format", cfg.format, "text, json, or csv")
        ->capture_default_str();
    census_cmd->add_flag("--verify-paper", verify,
                         "compare against the published residue tables, exit 7 on drift");
    add_cache_flags(census_cmd, cfg);

    CLI::App* cache_cmd = app.add_subcommand("cache", "resolution cache maintenance");
    bool cache_stats_flag = false, cache_clear_flag = false;
    CLI::App* cache_stats_cmd = cache_cmd->add_subcommand("stats", "entry and byte counts");
    CLI::App* cache_clear_cmd = cache_cmd->add_subcommand("clear", "remove every entry");
    cache_cmd->require_subcommand(1);
    cache_cmd->add_option("--cache-dir", cfg.cache_dir, "cache directory override");
    cache_stats_cmd->add_option("--cache-dir", cfg.cache_dir, "cache directory override");
    cache_clear_cmd->add_option("--cache-dir", cfg.cache_dir, "cache directory override");

    app.add_flag("-v,--verbose", cfg.verbosity, "increase verbosity");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        std::cerr << "run with --help for the command list\n";
        return static_cast<int>(errc::usage);
    }
    cache_stats_flag = cache_stats_cmd->parsed();
    cache_clear_flag = cache_clear_cmd->parsed();

    try {
        if (adem->parsed()) return run_adem(cfg, word);
        if (module_cmd->parsed()) return run_module(cfg, n, k);
        if (resolve->parsed()) return run_resolve(cfg, n, k);
        if (pi->parsed()) return run_pi_stable(cfg, n, verify);
        if (ahss->parsed()) return run_ahss(cfg, l, rank, dump_pages);
        if (count->parsed()) return run_count(cfg, l, rank);
        if (census_cmd->parsed()) return run_census(cfg, rank, l_min, l_max, verify);
        if (cache_cmd->parsed()) return run_cache(cfg, cache_stats_flag, cache_clear_flag);
        std::cerr << "usage error: a subcommand is required\n";
        return static_cast<int>(errc::usage);
    } catch (const error& e) {
        std::cerr << "error (" << errc_name(e.code()) << "): " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace cpb
