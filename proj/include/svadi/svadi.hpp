#pragma once

#include "svadi/baseline.hpp"
#include "svadi/errors.hpp"
#include "svadi/experiments.hpp"
#include "svadi/explicit_stencils.hpp"
#include "svadi/grid.hpp"
#include "svadi/heston_fourier.hpp"
#include "svadi/implicit_hoc.hpp"
#include "svadi/linalg.hpp"
#include "svadi/model.hpp"
#include "svadi/parallel.hpp"
#include "svadi/run_config.hpp"
#include "svadi/timestepper.hpp"
