#ifndef COEA_COEA_HPP
#define COEA_COEA_HPP

#include "algorithms.hpp"
#include "bitstring.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "games.hpp"
#include "oracle_report.hpp"
#include "oracles.hpp"
#include "rng.hpp"
#include "state.hpp"
#include "telemetry.hpp"

#endif  // COEA_COEA_HPP
