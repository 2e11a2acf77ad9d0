#include "credrisk/schema.hpp"

#include "credrisk/error.hpp"

namespace credrisk {

StatusCode parse_status(std::string_view text) {
  if (text.size() == 1) {
    switch (text[0]) {
      case '0': return StatusCode::DPD0;
      case '1': return StatusCode::DPD30;
      case '2': return StatusCode::DPD60;
      case '3': return StatusCode::DPD90;
      case '4': return StatusCode::DPD120;
      case '5': return StatusCode::DPD150PLUS;
      case 'C': return StatusCode::PAID;
      case 'X': return StatusCode::NO_LOAN;
      default: break;
    }
  }
  fail(ErrorCode::UnknownStatus, "unknown payment status '" + std::string(text) + "'");
}

std::string_view render(StatusCode status) {
  switch (status) {
    case StatusCode::DPD0: return "0";
    case StatusCode::DPD30: return "1";
    case StatusCode::DPD60: return "2";
    case StatusCode::DPD90: return "3";
    case StatusCode::DPD120: return "4";
    case StatusCode::DPD150PLUS: return "5";
    case StatusCode::PAID: return "C";
    case StatusCode::NO_LOAN: return "X";
  }
  return "?";
}

bool is_overdue(StatusCode status) {
  return status != StatusCode::PAID && status != StatusCode::NO_LOAN;
}

int overdue_rank(StatusCode status) {
  if (!is_overdue(status)) return -1;
  return static_cast<int>(status);
}

void validate(const ApplicationRecord& r) {
  if (r.cnt_children < 0) fail(ErrorCode::InvalidArgument, "CNT_CHILDREN must be >= 0");
  if (!(r.cnt_fam_members >= 1.0)) fail(ErrorCode::InvalidArgument, "CNT_FAM_MEMBERS must be >= 1");
  if (!(r.amt_income_total > 0.0)) fail(ErrorCode::InvalidArgument, "AMT_INCOME_TOTAL must be > 0");
  if (r.days_birth > 0) fail(ErrorCode::InvalidArgument, "DAYS_BIRTH must be <= 0");
  for (int flag : {r.flag_mobil, r.flag_work_phone, r.flag_phone, r.flag_email}) {
    if (flag != 0 && flag != 1) fail(ErrorCode::InvalidArgument, "FLAG_* columns must be 0 or 1");
  }
}

void validate(const CreditRecord& r) {
  if (r.months_balance > 0) fail(ErrorCode::InvalidArgument, "MONTHS_BALANCE must be <= 0");
}

DefaultLabel derive_label(std::span<const CreditRecord> history, StatusCode threshold) {
  if (history.empty()) fail(ErrorCode::EmptyHistory, "customer has no credit history");
  if (!is_overdue(threshold)) {
    fail(ErrorCode::InvalidArgument, "label threshold must be an overdue status code (0-5)");
  }
  const std::int64_t id = history.front().id;
  const int cut = overdue_rank(threshold);
  bool defaulted = false;
  for (const CreditRecord& rec : history) {
    if (rec.id != id) fail(ErrorCode::InvalidArgument, "credit history mixes customer ids");
    if (overdue_rank(rec.status) >= cut) defaulted = true;
  }
  return defaulted ? DefaultLabel::Default : DefaultLabel::Good;
}

}  // namespace credrisk
