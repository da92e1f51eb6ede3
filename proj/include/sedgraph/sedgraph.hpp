#pragma once

// Core library. The HTTP layer lives in sedgraph/service.hpp.

#include "sedgraph/chain.hpp"
#include "sedgraph/classifier.hpp"
#include "sedgraph/entry.hpp"
#include "sedgraph/errors.hpp"
#include "sedgraph/ids.hpp"
#include "sedgraph/ingest.hpp"
#include "sedgraph/lexicon.hpp"
#include "sedgraph/unicode.hpp"
