// Copyright 2026 The opsig Authors
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

#pragma once

#include "opsig/bipartite.hpp"
#include "opsig/cfg.hpp"
#include "opsig/config.hpp"
#include "opsig/error.hpp"
#include "opsig/features.hpp"
#include "opsig/listing.hpp"
#include "opsig/log.hpp"
#include "opsig/matcher.hpp"
#include "opsig/md5.hpp"
#include "opsig/ngram.hpp"
#include "opsig/opcodes.hpp"
#include "opsig/parallel.hpp"
#include "opsig/rational.hpp"
#include "opsig/scanner.hpp"
#include "opsig/signature.hpp"
