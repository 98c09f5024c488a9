#pragma once

#include "lapspec/scalar.hpp"
#include "lapspec/error.hpp"
#include "lapspec/random.hpp"
#include "lapspec/graph.hpp"
#include "lapspec/laplacian.hpp"
#include "lapspec/matrix_exp.hpp"
#include "lapspec/dynamics.hpp"
#include "lapspec/hankel.hpp"
#include "lapspec/recovery.hpp"
#include "lapspec/oracle.hpp"
#include "lapspec/io.hpp"
#include "lapspec/experiment.hpp"
