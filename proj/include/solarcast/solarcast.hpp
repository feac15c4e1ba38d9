#pragma once

#include "solarcast/baselines.hpp"
#include "solarcast/clear_sky.hpp"
#include "solarcast/error.hpp"
#include "solarcast/eval.hpp"
#include "solarcast/format.hpp"
#include "solarcast/random.hpp"
#include "solarcast/series.hpp"
#include "solarcast/solar_geometry.hpp"
#include "solarcast/synth.hpp"
#include "solarcast/tes.hpp"
#include "solarcast/time.hpp"
