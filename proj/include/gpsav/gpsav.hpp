#pragma once

#include "gpsav/config.hpp"
#include "gpsav/diagnostics.hpp"
#include "gpsav/error.hpp"
#include "gpsav/gauss_tableau.hpp"
#include "gpsav/gp_operator.hpp"
#include "gpsav/grid.hpp"
#include "gpsav/runner.hpp"
#include "gpsav/sav_integrator.hpp"
#include "gpsav/sav_state.hpp"
#include "gpsav/snapshot.hpp"
#include "gpsav/spectral.hpp"
