#pragma once

#include <cstddef>
#include <vector>

#include "varhardy/mart_ops.hpp"
#include "varhardy/prob_core.hpp"
#include "varhardy/varlp.hpp"

namespace fixtures {

using namespace varhardy;

inline FiltrationSpace uniform(std::size_t n) {
    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    FiltrationSpace::Partition fine;
    for (std::size_t i = 0; i < n; ++i) fine.push_back({i});
    return FiltrationSpace::build(std::move(w), {fine});
}

// Two coin flips: P_0 trivial, P_1 = {{0,1},{2,3}}, P_2 discrete.
inline FiltrationSpace dyadic2() { return generate_dyadic_space(2, 0.5, 0); }

inline FiltrationSpace dyadic1() { return generate_dyadic_space(1, 0.5, 0); }

// d_1 = +-1, d_2 = +-1, f_0 = 0.
inline Martingale rademacher2() {
    return martingale_from_terminal(dyadic2(), RandomVariable({2.0, 0.0, 0.0, -2.0}));
}

inline Exponent constant(const FiltrationSpace& s, double p) {
    return Exponent::constant(s.outcome_count(), p);
}

inline RandomVariable rv(std::vector<double> v) { return RandomVariable(std::move(v)); }

}  // namespace fixtures
