#pragma once

#include <hiporank/analysis.hpp>
#include <hiporank/common.hpp>
#include <hiporank/corpus.hpp>
#include <hiporank/embed.hpp>
#include <hiporank/eval.hpp>
#include <hiporank/graph.hpp>
#include <hiporank/oracle.hpp>
#include <hiporank/rank.hpp>
#include <hiporank/rouge.hpp>
#include <hiporank/stemmer.hpp>
#include <hiporank/summarize.hpp>
