#pragma once

#include "stochmap/analytics/histogram.hpp"
#include "stochmap/analytics/local_slope.hpp"
#include "stochmap/analytics/locus.hpp"
#include "stochmap/analytics/moments.hpp"
#include "stochmap/analytics/normality.hpp"
#include "stochmap/analytics/sweep.hpp"
#include "stochmap/analytics/tail_fit.hpp"
#include "stochmap/analytics/variance_growth.hpp"
#include "stochmap/engine.hpp"
#include "stochmap/oracle.hpp"
#include "stochmap/parallel.hpp"
#include "stochmap/regimes.hpp"
#include "stochmap/rng.hpp"
#include "stochmap/types.hpp"
