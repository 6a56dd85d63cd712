#pragma once

#include "pts/probability.hpp"
#include "pts/random.hpp"
#include "pts/mechanisms.hpp"
#include "pts/agents.hpp"
#include "pts/simulation.hpp"
#include "pts/analysis.hpp"
#include "pts/text_io.hpp"
#include "pts/config.hpp"
#include "pts/presets.hpp"
