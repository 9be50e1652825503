#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "riskfloor/simlab.hpp"

namespace riskfloor {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for the specials.
std::string format_double(double x);

/// Rows sorted by (experiment, generator, class, n, m_or_d, alpha, method).
std::vector<CoverageReport> sorted_cells(std::vector<CoverageReport> rows);

/// Header: experiment,generator,class,n,m_or_d,alpha,trials,rate,stderr,ceiling,pass
/// followed by method,positivity_rate,refusals,true_risk.
void write_cells_csv(std::ostream& out, const std::vector<CoverageReport>& rows);

/// {"cells": [...], "all_pass": bool} with cells in CSV order.
std::string cells_json(const std::vector<CoverageReport>& rows);

bool all_pass(const std::vector<CoverageReport>& rows);

}  // namespace riskfloor
