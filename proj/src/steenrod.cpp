#include "cpb/steenrod.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>
#include <sstream>
#include <tuple>

namespace cpb {

namespace {

int small_binom(int n, int k) {
    // n, k < 3 under Lucas at p in {2, 3}.
    static const int table[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 2, 1}};
    return table[n][k];
}

int sign_mod(int exponent, int p) { return (exponent % 2 == 0) ? 1 : p - 1; }

// Inadmissible pattern at one position.
// kind 0: b b (the word is zero), width 2.
// kind 1: P^a P^b with a < p b (Sq at p = 2), width 2.
// kind 2: P^a b P^b with a <= p b, width 3 (p = 3 only).
struct Violation {
    int pos;
    int kind;
    int a;
    int b;
    int width;
};

std::optional<Violation> violation_at(int prime, const OpWord& w, int j) {
    const int n = static_cast<int>(w.size());
    if (prime == 2) {
        if (j + 1 < n && w[j] < 2 * w[j + 1])
            return Violation{j, 1, w[j], w[j + 1], 2};
        return std::nullopt;
    }
    if (w[j] == 0) {
        if (j + 1 < n && w[j + 1] == 0) return Violation{j, 0, 0, 0, 2};
        return std::nullopt;
    }
    if (j + 1 < n && w[j + 1] > 0 && w[j] < 3 * w[j + 1])
        return Violation{j, 1, w[j], w[j + 1], 2};
    if (j + 2 < n && w[j + 1] == 0 && w[j + 2] > 0 && w[j] <= 3 * w[j + 2])
        return Violation{j, 2, w[j], w[j + 2], 3};
    return std::nullopt;
}

std::optional<Violation> find_violation(int prime, const OpWord& w, AdemStrategy strategy) {
    const int n = static_cast<int>(w.size());
    if (strategy == AdemStrategy::leftmost) {
        for (int j = 0; j < n; ++j)
            if (auto v = violation_at(prime, w, j)) return v;
    } else {
        for (int j = n - 1; j >= 0; --j)
            if (auto v = violation_at(prime, w, j)) return v;
    }
    return std::nullopt;
}

using Expansion = std::vector<std::pair<int, OpWord>>;

Expansion expand_pair(int prime, int kind, int a, int b) {
    Expansion out;
    if (kind == 0) return out;
    if (prime == 2) {
        for (int c = 0; 2 * c <= a; ++c) {
            if (binom_mod(b - c - 1, a - 2 * c, 2) == 0) continue;
            out.emplace_back(1, c == 0 ? OpWord{a + b} : OpWord{a + b - c, c});
        }
        return out;
    }
    if (kind == 1) {
        for (int t = 0; 3 * t <= a; ++t) {
            int k = binom_mod(2 * (b - t) - 1, a - 3 * t, 3);
            if (k == 0) continue;
            int coeff = (sign_mod(a + t, 3) * k) % 3;
            out.emplace_back(coeff, t == 0 ? OpWord{a + b} : OpWord{a + b - t, t});
        }
        return out;
    }
    // kind 2: P^a b P^b, a <= 3b.
    for (int t = 0; 3 * t <= a; ++t) {
        int k = binom_mod(2 * (b - t), a - 3 * t, 3);
        if (k == 0) continue;
        int coeff = (sign_mod(a + t, 3) * k) % 3;
        out.emplace_back(coeff, t == 0 ? OpWord{0, a + b} : OpWord{0, a + b - t, t});
    }
    for (int t = 0; 3 * t + 1 <= a; ++t) {
        int k = binom_mod(2 * (b - t) - 1, a - 3 * t - 1, 3);
        if (k == 0) continue;
        int coeff = (sign_mod(a + t + 1, 3) * k) % 3;  // second sum is subtracted
        out.emplace_back(coeff, t == 0 ? OpWord{a + b, 0} : OpWord{a + b - t, 0, t});
    }
    return out;
}

const Expansion& memo_expand_pair(int prime, int kind, int a, int b) {
    static std::map<std::tuple<int, int, int, int>, Expansion> memo;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(prime, kind, a, b);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, expand_pair(prime, kind, a, b)).first;
    return it->second;
}

// Enumerates admissible suffixes of remaining degree d. pmax bounds the
// next P exponent; pmax_after_beta bounds it when a Bockstein comes first
// (s_prev >= 3 s'' + 1); beta_ok is false right after a Bockstein.
void basis_rec(int prime, int d, int pmax, int pmax_after_beta, bool beta_ok,
               OpWord& cur, std::vector<OpWord>& out) {
    if (d == 0) {
        out.push_back(cur);
        return;
    }
    if (prime == 2) {
        for (int i = std::min(d, pmax); i >= 1; --i) {
            cur.push_back(i);
            basis_rec(prime, d - i, i / 2, 0, false, cur, out);
            cur.pop_back();
        }
        return;
    }
    for (int s = std::min(d / 4, pmax); s >= 1; --s) {
        cur.push_back(s);
        basis_rec(prime, d - 4 * s, s / 3, (s - 1) / 3, true, cur, out);
        cur.pop_back();
    }
    if (beta_ok) {
        cur.push_back(0);
        basis_rec(prime, d - 1, pmax_after_beta, 0, false, cur, out);
        cur.pop_back();
    }
}

}  // namespace

int binom_mod(long long n, long long k, int p) {
    if (k < 0 || n < 0 || k > n) return 0;
    int result = 1;
    while (n > 0 || k > 0) {
        int nd = static_cast<int>(n % p);
        int kd = static_cast<int>(k % p);
        if (kd > nd) return 0;
        result = (result * small_binom(nd, kd)) % p;
        n /= p;
        k /= p;
    }
    return result;
}

int token_degree(int prime, int token) {
    CPB_CHECK(token >= 0 && (prime == 2 ? token >= 1 : true), "bad token");
    if (prime == 2) return token;
    return token == 0 ? 1 : 4 * token;
}

int word_degree(int prime, const OpWord& w) {
    int d = 0;
    for (int t : w) d += token_degree(prime, t);
    return d;
}

bool is_admissible(int prime, const OpWord& w) {
    for (int j = 0; j < static_cast<int>(w.size()); ++j)
        if (violation_at(prime, w, j)) return false;
    return true;
}

std::string word_to_string(int prime, const OpWord& w) {
    if (w.empty()) return "1";
    std::ostringstream os;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) os << ' ';
        if (prime == 2) os << "Sq" << w[i];
        else if (w[i] == 0) os << 'b';
        else os << 'P' << w[i];
    }
    return os.str();
}

SteenrodElement::SteenrodElement(int prime) : prime_(prime) {
    CPB_CHECK(prime == 2 || prime == 3, "prime must be 2 or 3");
}

SteenrodElement SteenrodElement::monomial(int prime, const OpWord& w, int coeff) {
    CPB_CHECK(is_admissible(prime, w), "monomial must be admissible");
    SteenrodElement e(prime);
    e.add_term(w, coeff);
    return e;
}

SteenrodElement SteenrodElement::unit(int prime) { return monomial(prime, {}, 1); }

std::optional<int> SteenrodElement::degree() const {
    if (terms_.empty()) return std::nullopt;
    int d = word_degree(prime_, terms_.begin()->first);
    for (const auto& [w, c] : terms_)
        if (word_degree(prime_, w) != d) return std::nullopt;
    return d;
}

bool SteenrodElement::homogeneous() const { return terms_.empty() || degree().has_value(); }

void SteenrodElement::add_term(const OpWord& w, int coeff) {
    int c = coeff % prime_;
    if (c < 0) c += prime_;
    if (c == 0) return;
    auto it = terms_.find(w);
    if (it == terms_.end()) {
        terms_.emplace(w, static_cast<std::uint8_t>(c));
        return;
    }
    int sum = (it->second + c) % prime_;
    if (sum == 0) terms_.erase(it);
    else it->second = static_cast<std::uint8_t>(sum);
}

SteenrodElement& SteenrodElement::operator+=(const SteenrodElement& o) {
    CPB_CHECK(prime_ == o.prime_, "prime mismatch");
    for (const auto& [w, c] : o.terms_) add_term(w, c);
    return *this;
}

SteenrodElement SteenrodElement::operator+(const SteenrodElement& o) const {
    SteenrodElement r = *this;
    r += o;
    return r;
}

SteenrodElement SteenrodElement::scaled(int c) const {
    SteenrodElement r(prime_);
    for (const auto& [w, k] : terms_) r.add_term(w, k * c);
    return r;
}

std::string SteenrodElement::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        if (!first) os << " + ";
        first = false;
        if (it->first.empty()) {
            os << static_cast<int>(it->second);
        } else {
            if (it->second != 1) os << static_cast<int>(it->second) << ' ';
            os << word_to_string(prime_, it->first);
        }
    }
    return os.str();
}

std::vector<OpWord> admissible_basis(int prime, int degree, int degree_cap) {
    CPB_CHECK(prime == 2 || prime == 3, "prime must be 2 or 3");
    CPB_CHECK(degree >= 0, "degree must be nonnegative");
    if (degree > degree_cap)
        throw config_error("degree " + std::to_string(degree) + " above cap " +
                           std::to_string(degree_cap));
    static std::map<std::pair<int, int>, std::vector<OpWord>> memo;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(prime, degree);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;

    std::vector<OpWord> out;
    OpWord cur;
    basis_rec(prime, degree, degree, degree, true, cur, out);
    std::sort(out.begin(), out.end(), std::greater<OpWord>());
    memo.emplace(key, out);
    return out;
}

SteenrodElement adem_normalize(int prime, const OpWord& w, AdemStrategy strategy) {
    SteenrodElement out(prime);
    for (int t : w) CPB_CHECK(t >= (prime == 2 ? 1 : 0), "bad generator token");

    std::map<OpWord, int> pending;
    pending[w] = 1;
    while (!pending.empty()) {
        auto it = pending.begin();
        OpWord cur = it->first;
        int coeff = it->second % prime;
        pending.erase(it);
        if (coeff == 0) continue;
        auto v = find_violation(prime, cur, strategy);
        if (!v) {
            out.add_term(cur, coeff);
            continue;
        }
        if (v->kind == 0) continue;  // b b = 0
        const Expansion& exp = memo_expand_pair(prime, v->kind, v->a, v->b);
        for (const auto& [c, frag] : exp) {
            OpWord next(cur.begin(), cur.begin() + v->pos);
            next.insert(next.end(), frag.begin(), frag.end());
            next.insert(next.end(), cur.begin() + v->pos + v->width, cur.end());
            pending[next] = (pending[next] + c * coeff) % prime;
        }
    }
    return out;
}

SteenrodElement multiply(const SteenrodElement& a, const SteenrodElement& b) {
    CPB_CHECK(a.prime() == b.prime(), "prime mismatch");
    SteenrodElement out(a.prime());
    for (const auto& [wa, ca] : a.terms()) {
        for (const auto& [wb, cb] : b.terms()) {
            OpWord prod = wa;
            prod.insert(prod.end(), wb.begin(), wb.end());
            out += adem_normalize(a.prime(), prod).scaled(ca * cb);
        }
    }
    return out;
}

OpWord parse_word(int prime, const std::string& text) {
    OpWord w;
    std::istringstream is(text);
    std::string tok;
    while (is >> tok) {
        int value = -1;
        if (prime == 2) {
            if (tok.size() < 3 || tok.compare(0, 2, "Sq") != 0)
                throw parse_error("expected Sq<k> factor, got '" + tok + "'");
            auto [p, ec] = std::from_chars(tok.data() + 2, tok.data() + tok.size(), value);
            if (ec != std::errc() || p != tok.data() + tok.size() || value < 0)
                throw parse_error("bad exponent in '" + tok + "'");
            if (value == 0) continue;  // Sq0 is the unit
        } else {
            if (tok == "b") {
                w.push_back(0);
                continue;
            }
            if (tok.size() < 2 || tok[0] != 'P')
                throw parse_error("expected b or P<k> factor, got '" + tok + "'");
            auto [p, ec] = std::from_chars(tok.data() + 1, tok.data() + tok.size(), value);
            if (ec != std::errc() || p != tok.data() + tok.size() || value < 0)
                throw parse_error("bad exponent in '" + tok + "'");
            if (value == 0) continue;  // P0 is the unit
        }
        w.push_back(value);
    }
    return w;
}

SteenrodElement parse_element(int prime, const std::string& text) {
    SteenrodElement out(prime);
    std::string trimmed;
    // Split on '+'.
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == '+') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    for (auto& part : parts) {
        std::istringstream is(part);
        std::string first;
        if (!(is >> first)) throw parse_error("empty term in '" + text + "'");
        int coeff = 1;
        std::string rest;
        // Optional integer coefficient prefix.
        int v;
        auto [p, ec] = std::from_chars(first.data(), first.data() + first.size(), v);
        if (ec == std::errc() && p == first.data() + first.size()) {
            coeff = v;
            std::getline(is, rest);
        } else {
            std::getline(is, rest);
            rest = first + rest;
        }
        if (coeff == 0) continue;
        OpWord w = parse_word(prime, rest);
        out += adem_normalize(prime, w).scaled(coeff);
    }
    return out;
}

}  // namespace cpb
