#pragma once

#include "nkteam/coordination.hpp"
#include "nkteam/engine.hpp"
#include "nkteam/error.hpp"
#include "nkteam/formation.hpp"
#include "nkteam/io.hpp"
#include "nkteam/landscape.hpp"
#include "nkteam/learning.hpp"
#include "nkteam/metrics.hpp"
#include "nkteam/oracle.hpp"
#include "nkteam/population.hpp"
#include "nkteam/random.hpp"
