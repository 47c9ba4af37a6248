#pragma once

#include "emstress/discretizer.hpp"
#include "emstress/error.hpp"
#include "emstress/expm.hpp"
#include "emstress/gridtools.hpp"
#include "emstress/krylov.hpp"
#include "emstress/material.hpp"
#include "emstress/oracle.hpp"
#include "emstress/pipeline.hpp"
#include "emstress/reducer.hpp"
#include "emstress/tree.hpp"
