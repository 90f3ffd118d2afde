// SPDX-License-Identifier: Apache-2.0
#pragma once

/// Everything except the YAML/CSV layer in orlicz/io.hpp.

#include "orlicz/errors.hpp"
#include "orlicz/young.hpp"
#include "orlicz/conjugate.hpp"
#include "orlicz/young_analysis.hpp"
#include "orlicz/catalog.hpp"
#include "orlicz/grid.hpp"
#include "orlicz/norms.hpp"
#include "orlicz/functionals.hpp"
#include "orlicz/eigensolver.hpp"
#include "orlicz/region.hpp"
