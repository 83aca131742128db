#pragma once

#include "rach/contention.hpp"
#include "rach/controller.hpp"
#include "rach/csv.hpp"
#include "rach/estimator.hpp"
#include "rach/lambert_w.hpp"
#include "rach/load_profile.hpp"
#include "rach/model.hpp"
#include "rach/optimizer.hpp"
#include "rach/report.hpp"
#include "rach/scenario_file.hpp"
#include "rach/simulation.hpp"
#include "rach/types.hpp"
