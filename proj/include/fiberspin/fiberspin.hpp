#pragma once

#include "angular_momentum.hpp"
#include "bessel.hpp"
#include "chsh.hpp"
#include "errors.hpp"
#include "field.hpp"
#include "field_io.hpp"
#include "scalar_solver.hpp"
#include "spin_orbit_state.hpp"
