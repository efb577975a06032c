// Copyright 2026 The gpattn Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "gpattn/algorithm.hpp"
#include "gpattn/attention.hpp"
#include "gpattn/bench.hpp"
#include "gpattn/mask.hpp"
#include "gpattn/mask_io.hpp"
#include "gpattn/memmodel.hpp"
#include "gpattn/tensor.hpp"
#include "gpattn/verify.hpp"
