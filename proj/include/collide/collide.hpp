#pragma once

// Umbrella header.
#include "collide/experiments.hpp"
#include "collide/matrix.hpp"
#include "collide/matrix_analysis.hpp"
#include "collide/particle_systems.hpp"
#include "collide/srbm.hpp"
#include "collide/srbm_spec.hpp"
#include "collide/statistics.hpp"
#include "collide/wedge.hpp"
