#pragma once

#include "sag/bench/experiment.hpp"
#include "sag/bench/grid.hpp"
#include "sag/bench/metrics.hpp"
#include "sag/data.hpp"
#include "sag/libsvm.hpp"
#include "sag/loss.hpp"
#include "sag/objective.hpp"
#include "sag/optim/full_gradient.hpp"
#include "sag/optim/run.hpp"
#include "sag/optim/sag.hpp"
#include "sag/optim/stochastic.hpp"
#include "sag/optim/work.hpp"
#include "sag/parallel.hpp"
#include "sag/preprocess.hpp"
#include "sag/random.hpp"
#include "sag/step_schedule.hpp"
#include "sag/synthetic.hpp"
#include "sag/theory/bounds.hpp"
#include "sag/theory/lyapunov.hpp"
#include "sag/theory/reference.hpp"
#include "sag/theory/sgd_phase.hpp"
#include "sag/theory/sweeps.hpp"
