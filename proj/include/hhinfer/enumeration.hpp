#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace hh {

// Flat enumeration of household outcomes (n contacts, z cases), ordered by
// contacts then cases. Households of size 1 (n = 0) are excluded, so the
// first index is (1,0) -> 0.

inline int encode(int n, int z, int m) {
    if (m < 1) throw std::domain_error("encode: max contacts m must be >= 1");
    if (n < 1 || n > m)
        throw std::domain_error("encode: contact count " + std::to_string(n) +
                                " outside [1," + std::to_string(m) + "]");
    if (z < 0 || z > n)
        throw std::domain_error("encode: case count " + std::to_string(z) +
                                " outside [0," + std::to_string(n) + "]");
    return (n - 1) * (n + 2) / 2 + z;
}

inline int outcome_space_size(int m) {
    if (m < 1) throw std::domain_error("outcome_space_size: m must be >= 1");
    return encode(m, m, m) + 1;
}

inline std::pair<int, int> decode(int k, int m) {
    if (m < 1) throw std::domain_error("decode: m must be >= 1");
    if (k < 0 || k >= outcome_space_size(m))
        throw std::domain_error("decode: index " + std::to_string(k) + " out of range");
    // strata are contiguous, stratum n starts at (n-1)(n+2)/2
    int n = 1;
    while ((n + 1 <= m) && k >= n * (n + 3) / 2) ++n;
    int z = k - (n - 1) * (n + 2) / 2;
    return {n, z};
}

inline int contacts_of(int k, int m) { return decode(k, m).first; }
inline int cases_of(int k, int m) { return decode(k, m).second; }

}  // namespace hh
