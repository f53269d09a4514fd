#ifndef QLATK_ORACLE_HPP
#define QLATK_ORACLE_HPP

#include "qlatk/model.hpp"

#include <cstdint>

namespace qlatk {
namespace oracle {

// Brute-force reference evaluation of a QWA on a lasso word: enumerates
// lasso-shaped runs of the word product and aggregates by closed forms.
// Independent of the production evaluation path; shares only the model types.
// Inputs are capped (roughly |Q| <= 6 and |u|+|v| <= 8).
ExtValue bruteEvalLasso(const QwaSpec& a, const LassoWord& w);

// n i.i.d. length-`horizon` prefixes of the chain's word distribution;
// deterministic under a fixed seed.
std::vector<std::vector<std::string>> sampleMarkov(const MarkovChain& mc, int n, int horizon,
                                                   std::uint64_t seed);

} // namespace oracle
} // namespace qlatk

#endif
