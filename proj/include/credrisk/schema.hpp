#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace credrisk {

// Monthly payment status of one credit-history row.
enum class StatusCode : std::uint8_t {
  DPD0,        // "0": 1-29 days past due
  DPD30,       // "1": 30-59 days past due
  DPD60,       // "2": 60-89 days overdue
  DPD90,       // "3": 90-119 days overdue
  DPD120,      // "4": 120-149 days overdue
  DPD150PLUS,  // "5": overdue or written off for more than 150 days
  PAID,        // "C": paid off that month
  NO_LOAN,     // "X": no loan for the month
};

StatusCode parse_status(std::string_view text);
std::string_view render(StatusCode status);

// Severity rank 0..5 for the overdue codes; PAID and NO_LOAN have no rank and
// never count as delinquent.
bool is_overdue(StatusCode status);
int overdue_rank(StatusCode status);

enum class DefaultLabel : std::uint8_t { Good = 0, Default = 1 };

constexpr int to_int(DefaultLabel label) { return static_cast<int>(label); }
constexpr DefaultLabel label_from_int(int value) {
  return value != 0 ? DefaultLabel::Default : DefaultLabel::Good;
}

// Field order follows the application table header.
struct ApplicationRecord {
  std::int64_t id = 0;
  std::string code_gender;
  std::string flag_own_car;
  std::string flag_own_realty;
  std::int64_t cnt_children = 0;
  double amt_income_total = 0.0;
  std::string name_income_type;
  std::string name_education_type;
  std::string name_family_status;
  std::string name_housing_type;
  std::int64_t days_birth = 0;
  std::int64_t days_employed = 0;
  int flag_mobil = 0;
  int flag_work_phone = 0;
  int flag_phone = 0;
  int flag_email = 0;
  std::string occupation_type;
  double cnt_fam_members = 1.0;
};

inline constexpr std::array<std::string_view, 18> kApplicationColumns = {
    "ID",
    "CODE_GENDER",
    "FLAG_OWN_CAR",
    "FLAG_OWN_REALTY",
    "CNT_CHILDREN",
    "AMT_INCOME_TOTAL",
    "NAME_INCOME_TYPE",
    "NAME_EDUCATION_TYPE",
    "NAME_FAMILY_STATUS",
    "NAME_HOUSING_TYPE",
    "DAYS_BIRTH",
    "DAYS_EMPLOYED",
    "FLAG_MOBIL",
    "FLAG_WORK_PHONE",
    "FLAG_PHONE",
    "FLAG_EMAIL",
    "OCCUPATION_TYPE",
    "CNT_FAM_MEMBERS",
};

inline constexpr std::array<std::string_view, 3> kCreditColumns = {"ID", "MONTHS_BALANCE", "STATUS"};

struct CreditRecord {
  std::int64_t id = 0;
  std::int64_t months_balance = 0;  // 0 = current month, -1 = previous month, ...
  StatusCode status = StatusCode::NO_LOAN;
};

// Throws InvalidArgument when a record breaks a field invariant.
void validate(const ApplicationRecord& record);
void validate(const CreditRecord& record);

// A customer defaults iff any month is at least `threshold` overdue. The
// threshold must itself be an overdue code.
DefaultLabel derive_label(std::span<const CreditRecord> history,
                          StatusCode threshold = StatusCode::DPD60);

}  // namespace credrisk
