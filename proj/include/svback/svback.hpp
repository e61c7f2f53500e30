// include/svback/svback.hpp

// Copyright 2026  The svback Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "svback/calibration.hpp"
#include "svback/cluster.hpp"
#include "svback/config.hpp"
#include "svback/corpus.hpp"
#include "svback/corpus_io.hpp"
#include "svback/error.hpp"
#include "svback/fusion.hpp"
#include "svback/lda.hpp"
#include "svback/metrics.hpp"
#include "svback/pipeline.hpp"
#include "svback/plda.hpp"
#include "svback/preprocess.hpp"
#include "svback/rng.hpp"
#include "svback/svda.hpp"
#include "svback/svm.hpp"
#include "svback/text.hpp"
