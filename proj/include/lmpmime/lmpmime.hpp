#ifndef LMPMIME_LMPMIME_HPP
#define LMPMIME_LMPMIME_HPP

// Umbrella header: directed coupling detection in multivariate time series
// via non-uniform embedding (PMIME, M-PMIME, LM-PMIME) with k-NN information
// estimators, benchmark simulators, and batch evaluation.

#include "core.hpp"
#include "rng.hpp"
#include "series.hpp"
#include "kdtree.hpp"
#include "knn_mi.hpp"
#include "embedding.hpp"
#include "simulators.hpp"
#include "evaluation.hpp"
#include "io.hpp"

#endif
