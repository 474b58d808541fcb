#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cpb/errors.hpp"

namespace cpb {

// Word in the algebra generators, not necessarily admissible.
// p = 2: token i > 0 means Sq^i.
// p = 3: token 0 means the Bockstein b, token i > 0 means P^i.
using OpWord = std::vector<int>;

inline constexpr int kDefaultDegreeCap = 40;

// Degree of a generator token: Sq^i has degree i; b has degree 1, P^i has
// degree 2i(p-1) = 4i at p = 3.
int token_degree(int prime, int token);
int word_degree(int prime, const OpWord& w);

// Admissibility: p = 2, i_j >= 2 i_{j+1}; p = 3, s_j >= 3 s_{j+1} + eps_j
// with no repeated Bockstein.
bool is_admissible(int prime, const OpWord& w);

std::string word_to_string(int prime, const OpWord& w);

// F_p-combination of admissible monomials. Invariants: no zero
// coefficients, no duplicate monomials, prime in {2, 3}.
class SteenrodElement {
public:
    explicit SteenrodElement(int prime = 2);
    static SteenrodElement monomial(int prime, const OpWord& w, int coeff = 1);
    static SteenrodElement unit(int prime);

    int prime() const { return prime_; }
    const std::map<OpWord, std::uint8_t>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    // Common degree of all terms; nullopt when zero or inhomogeneous.
    std::optional<int> degree() const;
    bool homogeneous() const;

    void add_term(const OpWord& w, int coeff);  // w must be admissible
    SteenrodElement& operator+=(const SteenrodElement& o);
    SteenrodElement operator+(const SteenrodElement& o) const;
    SteenrodElement scaled(int c) const;
    bool operator==(const SteenrodElement&) const = default;

    // Terms in descending lexicographic word order, e.g. "Sq5 + Sq4 Sq1";
    // zero prints "0", the unit prints "1", coefficients != 1 prefix the
    // word ("2 P2").
    std::string str() const;

private:
    int prime_;
    std::map<OpWord, std::uint8_t> terms_;
};

// Admissible monomials of the given degree in descending lexicographic
// order (stable across runs). degree above the cap is a configuration
// error.
std::vector<OpWord> admissible_basis(int prime, int degree,
                                     int degree_cap = kDefaultDegreeCap);

enum class AdemStrategy { leftmost, rightmost };

// Rewrites a generator word into admissible normal form via the Adem
// relations. The strategy picks which inadmissible pair is expanded first;
// the result is independent of it.
SteenrodElement adem_normalize(int prime, const OpWord& w,
                               AdemStrategy strategy = AdemStrategy::leftmost);

// Bilinear associative product in admissible normal form.
SteenrodElement multiply(const SteenrodElement& a, const SteenrodElement& b);

// Parses a whitespace-separated product of generator factors: `Sq<k>` at
// p = 2, `b` and `P<k>` at p = 3. Malformed input raises parse_error.
OpWord parse_word(int prime, const std::string& text);

// Parses a sum of terms separated by '+', each an optional integer
// coefficient followed by a generator word ("Sq5 + Sq4 Sq1", "2 P2", "0",
// "1"). Terms are normalized; this inverts SteenrodElement::str().
SteenrodElement parse_element(int prime, const std::string& text);

// Binomial coefficient mod p by Lucas' theorem; zero unless 0 <= k <= n.
int binom_mod(long long n, long long k, int p);

}  // namespace cpb
