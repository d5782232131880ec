#pragma once

#include "bsasym/analysis.hpp"
#include "bsasym/config.hpp"
#include "bsasym/errors.hpp"
#include "bsasym/experiments.hpp"
#include "bsasym/grid.hpp"
#include "bsasym/oracles.hpp"
#include "bsasym/radial.hpp"
#include "bsasym/solvers.hpp"
#include "bsasym/sources.hpp"
#include "bsasym/stencils.hpp"
