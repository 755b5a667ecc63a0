// Copyright 2026 The nonholo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Everything except config.hpp, which additionally needs nlohmann/json.

#ifndef NONHOLO__NONHOLO_HPP_
#define NONHOLO__NONHOLO_HPP_

#include "nonholo/analysis.hpp"
#include "nonholo/angles.hpp"
#include "nonholo/control.hpp"
#include "nonholo/errors.hpp"
#include "nonholo/integrate.hpp"
#include "nonholo/models.hpp"
#include "nonholo/params.hpp"
#include "nonholo/path.hpp"
#include "nonholo/pathframe.hpp"
#include "nonholo/sim.hpp"
#include "nonholo/svg.hpp"

#endif  // NONHOLO__NONHOLO_HPP_
