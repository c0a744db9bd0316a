// Walks through the library: trees, condition checks, a coefficient search
// and a short convergence study.
#include <cstdio>
#include <iostream>

#include "bsderk/coeff_search.hpp"
#include "bsderk/experiments.hpp"
#include "bsderk/order_conditions.hpp"
#include "bsderk/tableaux.hpp"
#include "bsderk/trees.hpp"

int main() {
  using namespace bsderk;

  for (unsigned r = 1; r <= 4; ++r)
    std::printf("order %u: %zu trees, %zu condition trees\n", r, enumerate_trees(r).size(),
                enumerate_trees_minus(r).size());

  ULNTree t = parse_notation("[[ ]_1 [ ]_0]_0");
  std::printf("%s: order %u, S = %llu, gamma = %llu, alpha = %llu\n", to_notation(t).c_str(),
              t.order(), static_cast<unsigned long long>(symmetry(t)),
              static_cast<unsigned long long>(tree_factorial(t)),
              static_cast<unsigned long long>(alpha(t)));

  Scheme rk3 = scheme_from_name("rk3:2/3,1/3");
  std::cout << pretty_print(rk3.tableau);
  std::printf("%s order 3: %s, order 4: %s\n", rk3.name.c_str(),
              check_Cr(rk3.tableau, 3).passed() ? "pass" : "fail",
              check_Cr(rk3.tableau, 4).passed() ? "pass" : "fail");

  SearchSpec spec;
  spec.m = 3;
  spec.r = 3;
  SearchResult found = search(spec);
  std::printf("search m=3 r=3: %s, objective %.10f\n", to_string(found.status).c_str(),
              found.objective);

  auto rep = convergence_study(example2(), rk3, {10, 20, 40});
  std::cout << to_markdown({rep});
}
