#pragma once

// Umbrella include.

#include "csvortex/background.hpp"
#include "csvortex/config.hpp"
#include "csvortex/core.hpp"
#include "csvortex/diagnostics.hpp"
#include "csvortex/eigen.hpp"
#include "csvortex/fft.hpp"
#include "csvortex/field.hpp"
#include "csvortex/green.hpp"
#include "csvortex/io.hpp"
#include "csvortex/krylov.hpp"
#include "csvortex/monotone.hpp"
#include "csvortex/newton.hpp"
#include "csvortex/perturbative.hpp"
#include "csvortex/planar.hpp"
#include "csvortex/radial.hpp"
#include "csvortex/random.hpp"
#include "csvortex/runner.hpp"
#include "csvortex/spectral.hpp"
#include "csvortex/subsolution.hpp"
#include "csvortex/theta.hpp"
#include "csvortex/vortex.hpp"
