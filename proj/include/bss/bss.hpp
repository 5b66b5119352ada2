#pragma once

// Umbrella header for the Baskakov-Schurer-Szasz operator laboratory.

#include "bss/analysis.hpp"
#include "bss/function.hpp"
#include "bss/gamma.hpp"
#include "bss/operators.hpp"
#include "bss/parallel.hpp"
#include "bss/parse.hpp"
#include "bss/qcalc.hpp"
#include "bss/quadrature.hpp"
#include "bss/series.hpp"
#include "bss/statconv.hpp"
