#pragma once

// Umbrella header: the whole library in one include.

#include "engel/bigint.hpp"
#include "engel/chain.hpp"
#include "engel/engine.hpp"
#include "engel/errors.hpp"
#include "engel/generator.hpp"
#include "engel/matrix.hpp"
#include "engel/rational.hpp"
#include "engel/recurrence.hpp"
#include "engel/rng.hpp"
#include "engel/simulate.hpp"
#include "engel/verify.hpp"
