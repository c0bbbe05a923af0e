#ifndef NMR_NMR_HPP
#define NMR_NMR_HPP

#include "nmr/term.hpp"
#include "nmr/parser.hpp"
#include "nmr/dl2elp.hpp"
#include "nmr/grounder.hpp"
#include "nmr/solver.hpp"
#include "nmr/accident_kb.hpp"

#endif
