#pragma once

#include <string>
#include <vector>

namespace cpb {

// Options shared across subcommands. Window overrides of 0 take the engine
// defaults; the engine rejects overrides below its soundness bounds, the CLI
// never lowers them itself.
struct RunConfig {
    int prime = 2;
    int t_max = 0;
    int s_max = 0;
    std::string cache_dir;  // empty: CPB_CACHE_DIR when set, else project-local
    std::string format = "text";
    int verbosity = 0;
    bool use_cache = true;
};

// Parses args (argv without the program name) and dispatches to a subcommand.
// Returns the process exit code; usage problems exit 2, library errors map
// to their category codes, anything else to 1. Never throws.
int run_cli(const std::vector<std::string>& args);

}  // namespace cpb
