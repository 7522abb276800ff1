#pragma once

// Umbrella header for the circloop planning library.

#include "circloop/bitset.hpp"
#include "circloop/configuration.hpp"
#include "circloop/economy.hpp"
#include "circloop/io.hpp"
#include "circloop/lca.hpp"
#include "circloop/moves.hpp"
#include "circloop/reuse.hpp"
#include "circloop/rng.hpp"
#include "circloop/search.hpp"
