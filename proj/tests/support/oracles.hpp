#pragma once

// Reference implementations used to cross-check the library. They are
// deliberately written differently from the code under test (regexes,
// brute force, closed forms).

#include <cstddef>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tablemine/record.hpp"
#include "tablemine/stats.hpp"
#include "tablemine/table.hpp"

namespace oracle {

// ---- metrics ----

struct StructureCase {
  std::size_t tp, fn, fp;
  double expected;
};

struct HarmonicCase {
  double s, v, expected;
};

// Hand-evaluated values, written as literals.
const std::vector<StructureCase>& structure_cases();
const std::vector<HarmonicCase>& harmonic_cases();

// 2tp / (2tp + fn + fp); 1 when everything is zero.
double dice(std::size_t tp, std::size_t fn, std::size_t fp);
// 1 / mean(1/s, 1/v); 0 when either is 0.
double harmonic(double s, double v);

// ---- sub-header rule ----

// Regex form of "first non-special character is a digit". `literal` restricts
// the special set to {~, <, >}.
bool numeric_leading(const std::string& cell, bool literal);
bool subheader(const tablemine::Row& row, bool literal);

// ---- fuzzing ----

tablemine::Row random_row(std::mt19937_64& rng, std::size_t width);
tablemine::TableGrid random_grid(std::mt19937_64& rng);
// Cell text drawn from a pool that includes markup, tabs-free unicode and
// characters meaningful to the TSV format.
std::string random_cell_text(std::mt19937_64& rng);

// ---- hallucination filter ----

// Markup and <merged> tags removed by regex, ASCII-lowercased, whitespace
// collapsed.
std::string normalize(const std::string& s);
bool contains(const std::string& haystack_raw, const std::string& needle_raw);

struct FilterCase {
  tablemine::ExtractionRecord record;
  std::string tsv;
};
FilterCase random_filter_case(std::mt19937_64& rng);

// ---- association mining ----

using PairCounts = std::map<std::pair<std::string, std::string>, std::size_t>;
// O(n * k^2) pair counter over element lists.
PairCounts brute_force_pairs(const std::vector<std::vector<std::string>>& sets);
std::vector<tablemine::stats::CatalystEntry> random_entries(std::mt19937_64& rng, std::size_t n);

// ---- goldens ----

std::filesystem::path data_dir();
// Compares `actual` with the file; with TABLEMINE_UPDATE_GOLDENS=1 set, the
// file is rewritten instead. Returns an empty string on match, else a
// description of the first difference.
std::string check_golden(const std::filesystem::path& path, const std::string& actual);

}  // namespace oracle
