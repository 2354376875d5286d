// Copyright 2026 The wls Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "wls/basis.hpp"
#include "wls/error.hpp"
#include "wls/experiments.hpp"
#include "wls/functions.hpp"
#include "wls/gauss.hpp"
#include "wls/gof.hpp"
#include "wls/index_sets.hpp"
#include "wls/linalg.hpp"
#include "wls/lsq.hpp"
#include "wls/measure.hpp"
#include "wls/noise.hpp"
#include "wls/parallel.hpp"
#include "wls/quadrature.hpp"
#include "wls/random.hpp"
#include "wls/sampler.hpp"
#include "wls/verify.hpp"
