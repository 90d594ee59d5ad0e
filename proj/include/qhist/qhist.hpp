// Copyright 2026 The qhist Authors
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

#include "qhist/core/errors.hpp"
#include "qhist/core/tolerances.hpp"
#include "qhist/hilbert/linalg.hpp"
#include "qhist/hilbert/operator.hpp"
#include "qhist/hilbert/random.hpp"
#include "qhist/hilbert/schmidt.hpp"
#include "qhist/hilbert/state.hpp"
#include "qhist/hilbert/tensor_space.hpp"
#include "qhist/histories/functional.hpp"
#include "qhist/histories/history_set.hpp"
#include "qhist/histories/projector_family.hpp"
#include "qhist/histories/schedule.hpp"
#include "qhist/models/appendix.hpp"
#include "qhist/models/cnot.hpp"
#include "qhist/models/gates.hpp"
#include "qhist/models/no_record.hpp"
#include "qhist/models/pure_decoherence.hpp"
#include "qhist/ptrace/pt_functional.hpp"
#include "qhist/ptrace/records.hpp"
#include "qhist/redundancy/redundancy.hpp"
