// exnet.hpp: umbrella header for the library (the CLI lives in cli.hpp)

#pragma once

#include "exnet/config.hpp"
#include "exnet/distributions.hpp"
#include "exnet/dynamics.hpp"
#include "exnet/ensemble.hpp"
#include "exnet/errors.hpp"
#include "exnet/fim.hpp"
#include "exnet/generator.hpp"
#include "exnet/geometry.hpp"
#include "exnet/hamiltonian.hpp"
#include "exnet/io.hpp"
#include "exnet/parameters.hpp"
#include "exnet/redfield.hpp"
#include "exnet/rng.hpp"
#include "exnet/spectral.hpp"
#include "exnet/steady_state.hpp"
#include "exnet/superop.hpp"
#include "exnet/sweep.hpp"
#include "exnet/units.hpp"
