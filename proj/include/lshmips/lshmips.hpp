#pragma once

// Umbrella header for the core library; the CLI front end lives in
// lshmips/cli.hpp and additionally needs the vendored CLI11.

#include "lshmips/bench.hpp"
#include "lshmips/common.hpp"
#include "lshmips/dataset.hpp"
#include "lshmips/hash_families.hpp"
#include "lshmips/index.hpp"
#include "lshmips/index_io.hpp"
#include "lshmips/query.hpp"
#include "lshmips/rho.hpp"
#include "lshmips/rng.hpp"
#include "lshmips/synth.hpp"
#include "lshmips/transforms.hpp"
#include "lshmips/vec.hpp"
