#pragma once

#include "dles/grid.hpp"
#include "dles/stencil.hpp"
#include "dles/ops1d.hpp"
#include "dles/ops3d.hpp"
#include "dles/fft.hpp"
#include "dles/projection.hpp"
#include "dles/vector_filters.hpp"
#include "dles/fluxes.hpp"
#include "dles/sfs.hpp"
#include "dles/closures.hpp"
#include "dles/spectrum.hpp"
#include "dles/simulate.hpp"
#include "dles/diagnostics.hpp"
#include "dles/spectral1d.hpp"
#include "dles/snapshot.hpp"
#include "dles/harness.hpp"
