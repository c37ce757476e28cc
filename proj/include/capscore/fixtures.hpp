#pragma once

#include <vector>

#include "capscore/corpus.hpp"

namespace capscore {

/// Image 544 of the COCO captions with its five references and a candidate
/// caption. Used as a one-image corpus by the CLI and the acceptance tests.
ReferenceSet worked_example_references();
Caption worked_example_candidate();

}  // namespace capscore
