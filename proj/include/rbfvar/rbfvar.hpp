#pragma once

#include "rbfvar/kernels.hpp"
#include "rbfvar/geometry.hpp"
#include "rbfvar/benchmarks.hpp"
#include "rbfvar/assembly.hpp"
#include "rbfvar/tsvd.hpp"
#include "rbfvar/solvers.hpp"
#include "rbfvar/collocation.hpp"
#include "rbfvar/experiment.hpp"
