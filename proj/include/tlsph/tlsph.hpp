#pragma once

#include "common.hpp"
#include "kernel.hpp"
#include "materials.hpp"
#include "tlsph_core.hpp"
#include "geometry.hpp"
#include "diagnostics.hpp"
#include "oracles.hpp"
#include "cases.hpp"
#include "simulation.hpp"
