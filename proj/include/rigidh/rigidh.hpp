#pragma once

#include "rigidh/closedform.hpp"
#include "rigidh/curvature.hpp"
#include "rigidh/errors.hpp"
#include "rigidh/family.hpp"
#include "rigidh/funcspec.hpp"
#include "rigidh/jet.hpp"
#include "rigidh/metric.hpp"
#include "rigidh/verdict.hpp"
