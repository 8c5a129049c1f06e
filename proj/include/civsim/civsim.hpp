// Copyright 2026 The civsim Authors
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

#include "civsim/agents.hpp"
#include "civsim/civ_game.hpp"
#include "civsim/config.hpp"
#include "civsim/csv.hpp"
#include "civsim/experiment.hpp"
#include "civsim/matrix_analysis.hpp"
#include "civsim/rng.hpp"
#include "civsim/sovereign_env.hpp"
#include "civsim/svg_plot.hpp"
