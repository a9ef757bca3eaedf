#ifndef FLOODOPT_HPP
#define FLOODOPT_HPP

#include "floodopt/archive.hpp"
#include "floodopt/config.hpp"
#include "floodopt/cost.hpp"
#include "floodopt/encoding.hpp"
#include "floodopt/errors.hpp"
#include "floodopt/evaluator.hpp"
#include "floodopt/exhaustive.hpp"
#include "floodopt/exposure.hpp"
#include "floodopt/external_evaluator.hpp"
#include "floodopt/geometry.hpp"
#include "floodopt/metrics.hpp"
#include "floodopt/moea.hpp"
#include "floodopt/nsga2.hpp"
#include "floodopt/pareto.hpp"
#include "floodopt/problem.hpp"
#include "floodopt/raster.hpp"
#include "floodopt/report.hpp"
#include "floodopt/rng.hpp"
#include "floodopt/run_log.hpp"
#include "floodopt/search.hpp"
#include "floodopt/spea2.hpp"
#include "floodopt/util.hpp"

#endif
