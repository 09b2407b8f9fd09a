// Copyright 2026 The ppbench Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "ppbench/data_gen.hpp"
#include "ppbench/errors.hpp"
#include "ppbench/experiment.hpp"
#include "ppbench/mean_protocols.hpp"
#include "ppbench/modular.hpp"
#include "ppbench/monte_carlo.hpp"
#include "ppbench/paillier.hpp"
#include "ppbench/random.hpp"
#include "ppbench/secret_sharing.hpp"
#include "ppbench/sim_harness.hpp"
#include "ppbench/stats_report.hpp"
