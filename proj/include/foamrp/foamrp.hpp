#pragma once

#include "foamrp/flux_model.hpp"
#include "foamrp/roots.hpp"
#include "foamrp/stars_flux.hpp"
#include "foamrp/waves.hpp"
#include "foamrp/buckley_leverett.hpp"
#include "foamrp/riemann.hpp"
#include "foamrp/simulator.hpp"
#include "foamrp/config.hpp"
