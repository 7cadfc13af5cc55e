#pragma once

#include "types.hpp"
#include "monotone_map.hpp"
#include "quadrature.hpp"
#include "hamiltonian.hpp"
#include "flatness.hpp"
#include "grid.hpp"
#include "supconv.hpp"
#include "jets.hpp"
#include "solver.hpp"
#include "pipeline.hpp"
