// Copyright 2026 The Buzzwire Authors
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

// Everything except the network transport (buzzwire/gateway_server.hpp,
// which pulls in Boost.Beast).

#pragma once

#include "buzzwire/adaptation.hpp"
#include "buzzwire/admittance.hpp"
#include "buzzwire/apf.hpp"
#include "buzzwire/arbitration.hpp"
#include "buzzwire/course.hpp"
#include "buzzwire/errors.hpp"
#include "buzzwire/experiment.hpp"
#include "buzzwire/gateway.hpp"
#include "buzzwire/geometry.hpp"
#include "buzzwire/operator.hpp"
#include "buzzwire/session.hpp"
