// Copyright (c) the degrade-forge authors
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

#ifndef DEGRADE_FORGE_DEGRADE_FORGE_HPP_
#define DEGRADE_FORGE_DEGRADE_FORGE_HPP_

#include "degrade_forge/config.hpp"
#include "degrade_forge/dataset.hpp"
#include "degrade_forge/degradations.hpp"
#include "degrade_forge/errors.hpp"
#include "degrade_forge/image.hpp"
#include "degrade_forge/image_io.hpp"
#include "degrade_forge/isp.hpp"
#include "degrade_forge/jpeg.hpp"
#include "degrade_forge/kernels.hpp"
#include "degrade_forge/manifest.hpp"
#include "degrade_forge/pipeline.hpp"
#include "degrade_forge/rng.hpp"

#endif  // DEGRADE_FORGE_DEGRADE_FORGE_HPP_
