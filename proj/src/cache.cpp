#include "cpb/cache.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cpb/errors.hpp"

namespace cpb {

namespace {

using json = nlohmann::ordered_json;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

std::filesystem::path index_path(const std::filesystem::path& dir) {
    return dir / "index.txt";
}

void append_index_line(const std::filesystem::path& dir, const std::string& file,
                       const std::string& key) {
    const std::string line = file + "\t" + key + "\n";
    std::ifstream in(index_path(dir));
    std::string existing;
    for (std::string l; std::getline(in, l);) {
        if (l == file + "\t" + key) return;
    }
    in.close();
    std::ofstream out(index_path(dir), std::ios::app);
    out << line;
}

json element_strings(const FreeElement& v) {
    json arr = json::array();
    for (const auto& e : v) arr.push_back(e.str());
    return arr;
}

}  // namespace

std::string cache_key_string(const CacheKey& key) {
    std::ostringstream out;
    out << "p" << key.prime << " n" << key.n << " k" << key.k << " t" << key.t_max
        << " s" << key.s_max;
    return out.str();
}

std::string cache_file_name(const CacheKey& key) {
    return hex64(fnv1a(cache_key_string(key))) + ".json";
}

std::filesystem::path cache_directory() {
    if (const char* env = std::getenv(kCacheDirEnvVar); env != nullptr && *env != '\0') {
        return std::filesystem::path(env);
    }
    return std::filesystem::path(".cpb-cache");
}

std::string resolution_to_json(const Resolution& res) {
    const ModuleMeta& meta = res.module.meta();
    CPB_CHECK(meta.shift == 1, "only stunted-module resolutions are serialized");
    json doc;
    doc["version"] = kEngineVersion;
    doc["prime"] = res.module.prime();
    doc["n"] = meta.n;
    doc["k"] = meta.k;
    doc["t_max"] = res.t_max;
    doc["s_max"] = res.s_max;
    doc["degree_cap"] = res.degree_cap;
    json stages = json::array();
    for (const ResolutionStage& st : res.stages) {
        json stage;
        stage["s"] = st.s;
        json gens = json::array();
        for (const ResGenerator& g : st.generators) {
            gens.push_back(json{{"t", g.t}, {"id", g.id}});
        }
        stage["generators"] = gens;
        if (st.s == 0) {
            json aug = json::array();
            for (const ModuleVec& v : st.d_aug) {
                aug.push_back(std::vector<int>(v.begin(), v.end()));
            }
            stage["d_aug"] = aug;
        } else {
            json diffs = json::array();
            for (const FreeElement& v : st.d_free) diffs.push_back(element_strings(v));
            stage["d_free"] = diffs;
        }
        stages.push_back(stage);
    }
    doc["stages"] = stages;
    return doc.dump(2) + "\n";
}

std::optional<Resolution> resolution_from_json(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) return std::nullopt;
    try {
        if (doc.at("version").get<std::string>() != kEngineVersion) return std::nullopt;
        const int prime = doc.at("prime").get<int>();
        const int n = doc.at("n").get<int>();
        const int k = doc.at("k").get<int>();
        const int t_max = doc.at("t_max").get<int>();
        const int s_max = doc.at("s_max").get<int>();

        Resolution res(stunted_module(prime, n, k, t_max));
        res.t_max = t_max;
        res.s_max = s_max;
        res.degree_cap = doc.at("degree_cap").get<int>();
        const json& stages = doc.at("stages");
        if (!stages.is_array() || static_cast<int>(stages.size()) != s_max + 1) {
            return std::nullopt;
        }
        for (int s = 0; s <= s_max; ++s) {
            const json& stage = stages.at(static_cast<std::size_t>(s));
            if (stage.at("s").get<int>() != s) return std::nullopt;
            ResolutionStage out;
            out.s = s;
            for (const json& g : stage.at("generators")) {
                out.generators.push_back(
                    ResGenerator{g.at("t").get<int>(), g.at("id").get<std::string>()});
            }
            if (s == 0) {
                for (const json& v : stage.at("d_aug")) {
                    const auto ints = v.get<std::vector<int>>();
                    ModuleVec mv;
                    for (int c : ints) {
                        if (c < 0 || c >= prime) return std::nullopt;
                        mv.push_back(static_cast<std::uint8_t>(c));
                    }
                    out.d_aug.push_back(std::move(mv));
                }
                if (out.d_aug.size() != out.generators.size()) return std::nullopt;
            } else {
                for (const json& v : stage.at("d_free")) {
                    FreeElement fe;
                    for (const json& term : v) {
                        fe.push_back(parse_element(prime, term.get<std::string>()));
                    }
                    out.d_free.push_back(std::move(fe));
                }
                if (out.d_free.size() != out.generators.size()) return std::nullopt;
            }
            res.stages.push_back(std::move(out));
        }
        verify_resolution(res);
        return res;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void cache_store(const CacheKey& key, const Resolution& res,
                 const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::string file = cache_file_name(key);
    const std::string body = resolution_to_json(res);

    static std::mt19937_64 rng{std::random_device{}()};
    const std::filesystem::path tmp = dir / (file + ".tmp" + hex64(rng()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw data_error("cannot write cache file " + tmp.string());
        out << body;
    }
    std::filesystem::rename(tmp, dir / file);
    append_index_line(dir, file, cache_key_string(key));
}

std::optional<Resolution> cache_load(const CacheKey& key,
                                     const std::filesystem::path& dir) {
    std::ifstream in(dir / cache_file_name(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto res = resolution_from_json(buffer.str());
    if (!res) return std::nullopt;
    const ModuleMeta& meta = res->module.meta();
    const CacheKey stored{res->module.prime(), meta.n, meta.k, res->t_max, res->s_max};
    if (!(stored == key)) return std::nullopt;
    return res;
}

CacheStats cache_stats(const std::filesystem::path& dir) {
    CacheStats stats;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        if (name.size() == 21 && name.ends_with(".json")) {
            stats.entries += 1;
            stats.bytes += entry.file_size();
        }
    }
    return stats;
}

void cache_clear(const std::filesystem::path& dir) {
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
        if (!entry.is_regular_file()) continue;
        const auto name = entry.path().filename().string();
        if ((name.size() == 21 && name.ends_with(".json")) || name == "index.txt") {
            std::filesystem::remove(entry.path(), ec);
        }
    }
}

Resolution resolve_stunted_cached(const CacheKey& key, bool use_cache,
                                  const std::filesystem::path& dir) {
    if (use_cache) {
        if (auto hit = cache_load(key, dir)) return std::move(*hit);
    }
    Resolution res =
        resolve_minimal(stunted_module(key.prime, key.n, key.k, key.t_max), key.t_max,
                        key.s_max);
    if (use_cache) cache_store(key, res, dir);
    return res;
}

}  // namespace cpb
