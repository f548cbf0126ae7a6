#pragma once

#include "drsplit/core.hpp"
#include "drsplit/engine.hpp"
#include "drsplit/io.hpp"
#include "drsplit/linalg.hpp"
#include "drsplit/operators.hpp"
#include "drsplit/primal_dual.hpp"
#include "drsplit/quadform.hpp"
#include "drsplit/random.hpp"
#include "drsplit/rates.hpp"
#include "drsplit/verify.hpp"
