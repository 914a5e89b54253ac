#pragma once

#include "adabatt/bitstream.hpp"

namespace adabatt {

/// Ideal codelength of x in bits under the Krichevsky-Trofimov sequential
/// estimator with order-k contexts: L(x) = -log2 P_KT(x).
///
/// Each symbol is predicted with probability (c_s + 1/2)/(c_total + 1)
/// within its context; the first k symbols fall back to the longest
/// available shorter context (each such context is fresh, so they cost
/// exactly one bit apiece). The conditional probabilities are normalized,
/// so sum over {0,1}^m of 2^-L equals 1 for every m. No encoder is
/// materialized; the length is computed in the log domain from the final
/// per-context counts.
double code_length(const BitSequence& x, int order);

/// Compression test statistic: n - code_length(x, k). Negative for
/// incompressible data.
double tau_phi(const BitSequence& x, int order);

/// Conservative p-value min(1, 2^-tau). The Kraft equality plus Markov's
/// inequality give P_uniform(tau >= t) <= 2^-t, so rejecting when this
/// value is <= alpha tests at level alpha. Clamped below at 1e-300.
double compression_pvalue(const BitSequence& x, int order);

}  // namespace adabatt
