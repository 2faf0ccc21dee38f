#pragma once

#include <cstddef>
#include <cstdlib>
#include <vector>

namespace gaborcert {

// Enumeration of integer vectors by l1 order |kappa| = sum |k_j|, the
// truncation convention used by every lattice series here.

namespace shelldetail {

template <class Fn>
void shell_rec(std::vector<long>& kappa, std::size_t pos, long budget, bool exact, Fn&& fn) {
    if (pos + 1 == kappa.size()) {
        if (exact) {
            if (budget == 0) {
                kappa[pos] = 0;
                fn(kappa);
            } else {
                kappa[pos] = budget;
                fn(kappa);
                kappa[pos] = -budget;
                fn(kappa);
            }
        } else {
            for (long v = -budget; v <= budget; ++v) {
                kappa[pos] = v;
                fn(kappa);
            }
        }
        return;
    }
    for (long v = -budget; v <= budget; ++v) {
        kappa[pos] = v;
        shell_rec(kappa, pos + 1, budget - std::labs(v), exact, fn);
    }
}

} // namespace shelldetail

// All kappa with |kappa|_1 == h.
template <class Fn>
void for_each_l1_shell(std::size_t n, long h, Fn&& fn) {
    std::vector<long> kappa(n, 0);
    shelldetail::shell_rec(kappa, 0, h, true, fn);
}

// All kappa with |kappa|_1 <= K, enumerated shell by shell.
template <class Fn>
void for_each_l1_ball(std::size_t n, long K, Fn&& fn) {
    for (long h = 0; h <= K; ++h) for_each_l1_shell(n, h, fn);
}

inline long l1_order(const std::vector<long>& kappa) {
    long s = 0;
    for (long v : kappa) s += std::labs(v);
    return s;
}

} // namespace gaborcert
