#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "cpb/resolution.hpp"

namespace cpb {

// Bumped whenever the on-disk resolution format or the engine's output
// changes; files carrying any other tag are treated as cache misses.
inline constexpr const char* kEngineVersion = "cpb-1";

inline constexpr const char* kCacheDirEnvVar = "CPB_CACHE_DIR";

// Cached resolutions are keyed by the module descriptor and the window.
struct CacheKey {
    int prime = 2;
    int n = 1;
    int k = 0;
    int t_max = 0;
    int s_max = 0;
    bool operator==(const CacheKey&) const = default;
};

std::string cache_key_string(const CacheKey& key);
// Hex hash of the key string; the data file is <hash>.json.
std::string cache_file_name(const CacheKey& key);

// CPB_CACHE_DIR when set, else a project-local .cpb-cache.
std::filesystem::path cache_directory();

std::string resolution_to_json(const Resolution& res);
// nullopt on malformed input of any kind; a loaded resolution has been
// re-verified, so corruption never propagates.
std::optional<Resolution> resolution_from_json(const std::string& text);

// Atomic write (temp file + rename): concurrent stores of the same key
// leave an intact file from one writer. Also appends the key to a
// plain-text index.txt next to the data files.
void cache_store(const CacheKey& key, const Resolution& res,
                 const std::filesystem::path& dir = cache_directory());
std::optional<Resolution> cache_load(const CacheKey& key,
                                     const std::filesystem::path& dir = cache_directory());

struct CacheStats {
    int entries = 0;
    std::uintmax_t bytes = 0;
};
CacheStats cache_stats(const std::filesystem::path& dir = cache_directory());
void cache_clear(const std::filesystem::path& dir = cache_directory());

// Minimal resolution of the stunted module for (prime, n, k), answered from
// the cache when possible and stored after a fresh computation.
Resolution resolve_stunted_cached(const CacheKey& key, bool use_cache = true,
                                  const std::filesystem::path& dir = cache_directory());

}  // namespace cpb
