#pragma once

#include "wfshacl/document.hpp"
#include "wfshacl/error.hpp"
#include "wfshacl/graph.hpp"
#include "wfshacl/mu_eval.hpp"
#include "wfshacl/mu_formula.hpp"
#include "wfshacl/names.hpp"
#include "wfshacl/search.hpp"
#include "wfshacl/shape_expr.hpp"
#include "wfshacl/supported.hpp"
#include "wfshacl/text_format.hpp"
#include "wfshacl/translator.hpp"
#include "wfshacl/wf_engine.hpp"
#include "wfshacl/automata/arena.hpp"
#include "wfshacl/automata/emptiness.hpp"
#include "wfshacl/automata/pbf.hpp"
#include "wfshacl/automata/two_ata.hpp"
