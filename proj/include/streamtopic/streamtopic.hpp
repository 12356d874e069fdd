#ifndef STREAMTOPIC_STREAMTOPIC_HPP
#define STREAMTOPIC_STREAMTOPIC_HPP

// Umbrella header: distant-supervision topic classification for curated
// short-text streams.

#include "streamtopic/classifiers.hpp"
#include "streamtopic/corpus.hpp"
#include "streamtopic/errors.hpp"
#include "streamtopic/features.hpp"
#include "streamtopic/harness.hpp"
#include "streamtopic/model_io.hpp"
#include "streamtopic/rng.hpp"
#include "streamtopic/supervision.hpp"
#include "streamtopic/synth.hpp"

#endif
