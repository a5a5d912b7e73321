#pragma once

// Umbrella header for the shallow water DG library.

#include "swdg/types.hpp"
#include "swdg/mesh.hpp"
#include "swdg/mesh_io.hpp"
#include "swdg/quadrature.hpp"
#include "swdg/field.hpp"
#include "swdg/wetdry.hpp"
#include "swdg/flux.hpp"
#include "swdg/boundary.hpp"
#include "swdg/rhs.hpp"
#include "swdg/limiter.hpp"
#include "swdg/timestepper.hpp"
#include "swdg/diagnostics.hpp"
#include "swdg/scenarios.hpp"
#include "swdg/io.hpp"
