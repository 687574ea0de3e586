// Copyright 2026 The SCT Authors
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


// Umbrella header for the self-calibrating tomography library.

#ifndef SCT_SCT_HPP
#define SCT_SCT_HPP

#include "sct/error.hpp"
#include "sct/forward.hpp"
#include "sct/identify.hpp"
#include "sct/invert.hpp"
#include "sct/model.hpp"
#include "sct/protocol.hpp"
#include "sct/sampling.hpp"
#include "sct/smallmat.hpp"

#endif  // SCT_SCT_HPP
