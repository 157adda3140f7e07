#pragma once

// Umbrella header for the simulation engine (no I/O).

#include "nlrl/dynamics.hpp"
#include "nlrl/integrator.hpp"
#include "nlrl/lattice.hpp"
#include "nlrl/model.hpp"
#include "nlrl/observables.hpp"
#include "nlrl/sweeps.hpp"
#include "nlrl/version.hpp"
#include "nlrl/winding.hpp"
