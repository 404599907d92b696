#pragma once

#include "chimera/config.hpp"
#include "chimera/effective.hpp"
#include "chimera/ensemble.hpp"
#include "chimera/errors.hpp"
#include "chimera/evolution.hpp"
#include "chimera/network.hpp"
#include "chimera/observables.hpp"
#include "chimera/presets.hpp"
#include "chimera/state.hpp"
