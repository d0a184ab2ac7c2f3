// Copyright 2026 The sigrank authors
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

#ifndef SIGRANK_SIGRANK_HPP
#define SIGRANK_SIGRANK_HPP

#include "sigrank/errors.hpp"
#include "sigrank/feature_matrix.hpp"
#include "sigrank/gmm.hpp"
#include "sigrank/index.hpp"
#include "sigrank/matrix.hpp"
#include "sigrank/metrics.hpp"
#include "sigrank/rng.hpp"
#include "sigrank/serialization.hpp"
#include "sigrank/signature.hpp"
#include "sigrank/smt.hpp"
#include "sigrank/spd.hpp"
#include "sigrank/symmetric_eigen.hpp"
#include "sigrank/synthetic.hpp"

#endif  // SIGRANK_SIGRANK_HPP
