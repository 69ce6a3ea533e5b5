#pragma once

#include "lpa/bootstrap.hpp"
#include "lpa/count_core.hpp"
#include "lpa/engine.hpp"
#include "lpa/errors.hpp"
#include "lpa/forecast.hpp"
#include "lpa/io.hpp"
#include "lpa/parallel.hpp"
#include "lpa/rng.hpp"
#include "lpa/scenario.hpp"
