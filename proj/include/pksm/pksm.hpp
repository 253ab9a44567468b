#pragma once

#include "alphabet_map.hpp"
#include "bits.hpp"
#include "errors.hpp"
#include "mp_automaton.hpp"
#include "naive.hpp"
#include "next_engine.hpp"
#include "packed_string.hpp"
#include "search.hpp"
#include "segment_automaton.hpp"
#include "segment_encoding.hpp"
