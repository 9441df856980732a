#pragma once

// Umbrella header for the pure library modules. The HTTP pieces
// (model_client.hpp, server.hpp) pull in cpp-httplib and are included
// separately.

#include "sumbench/alignment.hpp"
#include "sumbench/consolidation.hpp"
#include "sumbench/error.hpp"
#include "sumbench/highlighting.hpp"
#include "sumbench/salience.hpp"
#include "sumbench/session.hpp"
#include "sumbench/span.hpp"
#include "sumbench/text_pipeline.hpp"
#include "sumbench/unicode.hpp"
#include "sumbench/wire.hpp"
