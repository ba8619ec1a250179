#pragma once

#include "csv.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "experiment.hpp"
#include "format.hpp"
#include "independence.hpp"
#include "linalg.hpp"
#include "p_estimator.hpp"
#include "rng.hpp"
#include "stream.hpp"
#include "types.hpp"
