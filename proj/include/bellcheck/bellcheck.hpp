// Copyright 2026 The bellcheck Authors
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

#include "bellcheck/bell.hpp"
#include "bellcheck/experiment.hpp"
#include "bellcheck/frank_wolfe.hpp"
#include "bellcheck/instruction_set.hpp"
#include "bellcheck/io.hpp"
#include "bellcheck/lhv.hpp"
#include "bellcheck/quantum.hpp"
#include "bellcheck/rng.hpp"
#include "bellcheck/tables.hpp"
