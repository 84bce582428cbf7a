#pragma once

// Umbrella header for the ontorel harness.

#include "ontorel/backend.hpp"
#include "ontorel/cli.hpp"
#include "ontorel/csv.hpp"
#include "ontorel/errors.hpp"
#include "ontorel/gold.hpp"
#include "ontorel/hash.hpp"
#include "ontorel/label.hpp"
#include "ontorel/metrics.hpp"
#include "ontorel/pair.hpp"
#include "ontorel/parser.hpp"
#include "ontorel/prompt.hpp"
#include "ontorel/runner.hpp"
#include "ontorel/strategy.hpp"
#include "ontorel/thesaurus.hpp"
