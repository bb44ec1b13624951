#pragma once
//------------------------------------------------------------------------------
//
//   Copyright 2026 The marketlab authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#include "marketlab/io.hpp"
#include "marketlab/pricing.hpp"
#include "marketlab/probe.hpp"
#include "marketlab/rational.hpp"
#include "marketlab/repro.hpp"
#include "marketlab/types.hpp"
#include "marketlab/vcg.hpp"
#include "marketlab/walrasian.hpp"
#include "marketlab/welfare.hpp"
