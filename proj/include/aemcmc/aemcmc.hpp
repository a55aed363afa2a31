#pragma once

#include "aemcmc/binary.hpp"
#include "aemcmc/config.hpp"
#include "aemcmc/data.hpp"
#include "aemcmc/diagnostics.hpp"
#include "aemcmc/ensemble.hpp"
#include "aemcmc/fhmm.hpp"
#include "aemcmc/logspace.hpp"
#include "aemcmc/rng.hpp"
#include "aemcmc/runner.hpp"
#include "aemcmc/samplers.hpp"
#include "aemcmc/target.hpp"
#include "aemcmc/toy.hpp"
#include "aemcmc/trace.hpp"
