#pragma once

// Umbrella header: the non-standard finite-difference solver for the
// Kermack-McKendrick age-of-infection model, its discrete epidemic
// indicators and the study harness.

#include "aoi/config_io.hpp"
#include "aoi/csv.hpp"
#include "aoi/errors.hpp"
#include "aoi/indicators.hpp"
#include "aoi/kernel.hpp"
#include "aoi/model.hpp"
#include "aoi/nsfd.hpp"
#include "aoi/studies.hpp"
#include "aoi/trapezoidal.hpp"
