#pragma once

#include <string>
#include <vector>

#include "talu/microprogram.hpp"

namespace talu {

// Shipped micro-program schedules. Built once, validated, immutable.
// The same schedules are shipped as text under data/programs/ (the external
// interface); a test pins builder output == shipped file.
const MicroProgram* find_program(const std::string& format, const std::string& operation);
const MicroProgram& get_program(const std::string& format, const std::string& operation);
std::vector<const MicroProgram*> all_programs();

// Table III cycle budgets (decode, mul, add) per format string; entries the
// shipped schedule could not realize are listed by budget_waivers().
struct CycleBudget {
    std::string format;
    int decode = 0;
    int mul = 0;
    int add = 0;
};
const std::vector<CycleBudget>& table3_budgets();

struct BudgetWaiver {
    std::string format;
    std::string operation;
    int table_cycles = 0;    // the Table III entry
    int modeled_cycles = 0;  // best schedule found on this datapath
    std::string argument;    // why the budget is unrealizable here
};
const std::vector<BudgetWaiver>& budget_waivers();

}  // namespace talu
