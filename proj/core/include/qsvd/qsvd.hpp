#pragma once

#include "qsvd/bidiag.hpp"
#include "qsvd/compact.hpp"
#include "qsvd/dense.hpp"
#include "qsvd/dense_matrix.hpp"
#include "qsvd/error.hpp"
#include "qsvd/io.hpp"
#include "qsvd/lowrank.hpp"
#include "qsvd/quat_matrix.hpp"
#include "qsvd/quaternion.hpp"
#include "qsvd/random.hpp"
#include "qsvd/restart.hpp"
#include "qsvd/tolerances.hpp"
