/**
 * @file wlmc.hpp
 * @brief Umbrella header.
 */
#ifndef WLMC_WLMC_HPP
#define WLMC_WLMC_HPP

#include "wlmc/analysis.hpp"
#include "wlmc/analytic.hpp"
#include "wlmc/errors.hpp"
#include "wlmc/estimator.hpp"
#include "wlmc/loops.hpp"
#include "wlmc/parallel.hpp"
#include "wlmc/potentials.hpp"
#include "wlmc/rng.hpp"
#include "wlmc/statistics.hpp"

#endif  // WLMC_WLMC_HPP
