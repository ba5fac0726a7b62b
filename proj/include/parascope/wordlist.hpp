#pragma once

#include <string>
#include <vector>

namespace parascope {

// Built-in lexicon, ordered roughly by frequency. The tiny model's tokenizer
// derives its word vocabulary from it and the bag-of-words autoencoder uses
// it as the default decode candidate set, so both sides of the desk-scale
// pipeline share one vocabulary.
const std::vector<std::string>& builtin_wordlist();

}  // namespace parascope
