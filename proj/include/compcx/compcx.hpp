#pragma once

#include "compcx/auction.hpp"
#include "compcx/benchmark.hpp"
#include "compcx/distribution.hpp"
#include "compcx/error.hpp"
#include "compcx/monte_carlo.hpp"
#include "compcx/quantile_experiments.hpp"
#include "compcx/random.hpp"
#include "compcx/reproductions.hpp"
#include "compcx/virtual_value.hpp"
