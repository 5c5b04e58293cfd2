#pragma once

#include "fiberlab/arith.hpp"
#include "fiberlab/dilate_energy.hpp"
#include "fiberlab/error.hpp"
#include "fiberlab/fourier.hpp"
#include "fiberlab/generators.hpp"
#include "fiberlab/intsets.hpp"
#include "fiberlab/json_report.hpp"
#include "fiberlab/numeric.hpp"
#include "fiberlab/parallel.hpp"
#include "fiberlab/pipeline.hpp"
#include "fiberlab/set_io.hpp"
#include "fiberlab/structure.hpp"
