#pragma once

#include "caradory/core.hpp"
#include "caradory/geometry.hpp"
#include "caradory/objectives.hpp"
#include "caradory/random.hpp"
#include "caradory/trace.hpp"
#include "caradory/solvers.hpp"
#include "caradory/bounds.hpp"
#include "caradory/instances.hpp"
#include "caradory/io.hpp"
