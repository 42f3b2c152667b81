#ifndef YAK_YAK_HPP
#define YAK_YAK_HPP

#include "yak/analysis.hpp"
#include "yak/diagnostic.hpp"
#include "yak/dot.hpp"
#include "yak/driver.hpp"
#include "yak/elaborate.hpp"
#include "yak/graph.hpp"
#include "yak/lexer.hpp"
#include "yak/parser.hpp"
#include "yak/printer.hpp"
#include "yak/sdc.hpp"
#include "yak/simulator.hpp"
#include "yak/verilog.hpp"
#include "yak/version.hpp"

#endif  // YAK_YAK_HPP
