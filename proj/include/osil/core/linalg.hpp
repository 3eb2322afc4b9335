#pragma once

#include <vector>

namespace osil {

// Solves A x = b for dense row-major A (n x n) by LU with partial pivoting.
// A and b are taken by value and consumed. Throws NumericError when A is
// numerically singular. Problem sizes here are tiny (tens of states), so a
// textbook O(n^3) elimination is exact enough and dependency-free.
std::vector<double> solve_linear(std::vector<double> a, std::vector<double> b);

}  // namespace osil
