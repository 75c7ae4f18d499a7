#pragma once

#include "guild/errors.hpp"
#include "guild/statespace.hpp"
#include "guild/sampling.hpp"
#include "guild/environment.hpp"
#include "guild/environment_io.hpp"
#include "guild/planner.hpp"
#include "guild/local_densification.hpp"
#include "guild/bench.hpp"
#include "guild/config.hpp"
#include "guild/commands.hpp"
