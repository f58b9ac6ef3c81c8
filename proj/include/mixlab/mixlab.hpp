#pragma once

// Umbrella header for the torus mixing laboratory.

#include "mixlab/bounds.hpp"
#include "mixlab/bressan.hpp"
#include "mixlab/estimates.hpp"
#include "mixlab/field_io.hpp"
#include "mixlab/geometry.hpp"
#include "mixlab/interp.hpp"
#include "mixlab/mixing.hpp"
#include "mixlab/scalar_field.hpp"
#include "mixlab/scenario.hpp"
#include "mixlab/series.hpp"
#include "mixlab/spectral.hpp"
#include "mixlab/svg.hpp"
#include "mixlab/transport.hpp"
#include "mixlab/velocity.hpp"
#include "mixlab/version.hpp"
