#include <doctest.h>

#include <sstream>
#include <string>

#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"
#include "credrisk/ingest.hpp"
#include "credrisk/schema.hpp"
#include "support.hpp"

using namespace credrisk;

namespace {

const char* kAppHeader =
    "ID,CODE_GENDER,FLAG_OWN_CAR,FLAG_OWN_REALTY,CNT_CHILDREN,AMT_INCOME_TOTAL,NAME_INCOME_TYPE,"
    "NAME_EDUCATION_TYPE,NAME_FAMILY_STATUS,NAME_HOUSING_TYPE,DAYS_BIRTH,DAYS_EMPLOYED,FLAG_MOBIL,"
    "FLAG_WORK_PHONE,FLAG_PHONE,FLAG_EMAIL,OCCUPATION_TYPE,CNT_FAM_MEMBERS\n";

std::string app_row(int id, const std::string& gender, long birth, long employed, const std::string& occupation) {
  return std::to_string(id) + "," + gender + ",Y,N,0,112500.0,Working,Higher education,Married," +
         "House / apartment," + std::to_string(birth) + "," + std::to_string(employed) + ",1,0,0,0," + occupation +
         ",2.0\n";
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

CreditRecord month(std::int64_t id, std::int64_t m, const char* status) { return {id, m, parse_status(status)}; }

}  // namespace

TEST_CASE("status codes parse and order") {
  CHECK(parse_status("C") == StatusCode::PAID);
  CHECK(parse_status("X") == StatusCode::NO_LOAN);
  CHECK(parse_status("5") == StatusCode::DPD150PLUS);
  CHECK(render(StatusCode::DPD60) == "2");
  CHECK_FALSE(is_overdue(StatusCode::PAID));
  CHECK(overdue_rank(StatusCode::DPD90) == 3);
  CHECK(code_of([] { parse_status("7"); }) == ErrorCode::UnknownStatus);
}

TEST_CASE("label derivation") {
  const std::vector<CreditRecord> clean{month(1, 0, "C"), month(1, -1, "0"), month(1, -2, "1")};
  CHECK(derive_label(clean) == DefaultLabel::Good);

  const std::vector<CreditRecord> late{month(1, 0, "C"), month(1, -1, "X"), month(1, -2, "2")};
  CHECK(derive_label(late) == DefaultLabel::Default);
  CHECK(derive_label(clean, StatusCode::DPD30) == DefaultLabel::Default);

  CHECK(code_of([] { derive_label({}); }) == ErrorCode::EmptyHistory);
  const std::vector<CreditRecord> mixed{month(1, 0, "C"), month(2, 0, "C")};
  CHECK(code_of([&] { derive_label(mixed); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { derive_label(clean, StatusCode::PAID); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("label is monotone in history") {
  Rng rng(5);
  const char* codes[] = {"0", "1", "2", "3", "4", "5", "C", "X"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CreditRecord> h;
    const std::size_t n = 1 + rng.index(10);
    for (std::size_t m = 0; m < n; ++m) h.push_back(month(9, -static_cast<std::int64_t>(m), codes[rng.index(8)]));
    const DefaultLabel before = derive_label(h);
    h.push_back(month(9, -static_cast<std::int64_t>(n), codes[rng.index(8)]));
    if (before == DefaultLabel::Default) CHECK(derive_label(h) == DefaultLabel::Default);
  }
}

TEST_CASE("csv reader handles quotes and line breaks") {
  std::istringstream in("\xEF\xBB\xBF" "a,b\n\"x, y\",\"line\nbreak\"\n\n\"q\"\"uote\",2\n");
  csv::Reader reader(in);
  CHECK(reader.next() == std::vector<std::string>{"a", "b"});
  CHECK(reader.next() == std::vector<std::string>{"x, y", "line\nbreak"});
  CHECK(reader.next() == std::vector<std::string>{"q\"uote", "2"});
  CHECK(reader.record_number() == 3);
  CHECK_FALSE(reader.next().has_value());
  CHECK(csv::escape("a,b") == "\"a,b\"");
}

TEST_CASE("applications parse and report schema problems") {
  std::istringstream good(std::string(kAppHeader) + app_row(1, "F", -7305, -365, "Laborers"));
  const auto apps = parse_applications(good);
  REQUIRE(apps.size() == 1);
  CHECK(apps[0].days_birth == -7305);
  CHECK(apps[0].occupation_type == "Laborers");

  std::string header(kAppHeader);
  header.replace(header.find("CNT_FAM_MEMBERS"), 15, "CNT_FAMILY");
  std::istringstream missing(header);
  try {
    parse_applications(missing);
    FAIL("expected MissingColumn");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingColumn);
    CHECK(std::string(e.what()).find("CNT_FAM_MEMBERS") != std::string::npos);
  }

  std::istringstream bad(std::string(kAppHeader) + "1,F,Y,N,zero,1,Working,a,b,c,-1,-1,1,0,0,0,,1\n");
  try {
    parse_applications(bad);
    FAIL("expected MalformedRow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedRow);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    CHECK(std::string(e.what()).find("CNT_CHILDREN") != std::string::npos);
  }
}

TEST_CASE("credit parse names the offending row") {
  std::istringstream in("ID,MONTHS_BALANCE,STATUS\n1,0,C\n1,-1,Z\n");
  try {
    parse_credit(in);
    FAIL("expected UnknownStatus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownStatus);
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
  std::istringstream future("ID,MONTHS_BALANCE,STATUS\n1,2,C\n");
  CHECK(code_of([&] { parse_credit(future); }) == ErrorCode::MalformedRow);
}

TEST_CASE("merge keeps 14 features and engineered years") {
  std::istringstream app(std::string(kAppHeader) + app_row(1, "F", -7305, -730, "") + app_row(2, "M", -14610, 365243, "Drivers") +
                         app_row(3, "F", -10000, -100, "Laborers"));
  std::istringstream credit("ID,MONTHS_BALANCE,STATUS\n1,0,C\n1,-1,3\n2,0,X\n4,0,C\n");
  const auto table = merge_and_label(parse_applications(app), parse_credit(credit));
  REQUIRE(table.rows() == 2);
  CHECK(table.labels[0] == DefaultLabel::Default);
  CHECK(table.labels[1] == DefaultLabel::Good);

  const auto map = fit_encoder(table);
  const auto x = encode(table, map);
  CHECK(x.cols() == 14);
  CHECK(x.column_names()[12] == kAgeColumn);
  CHECK(x.column_names()[13] == kEmployedColumn);
  CHECK(x(0, 12) == doctest::Approx(20.0));
  CHECK(x(0, 13) == doctest::Approx(730.0 / 365.25));
  CHECK(x(1, 13) == 0.0);
  CHECK_FALSE(x.column_index("FLAG_MOBIL").has_value());
  CHECK_FALSE(x.column_index("ID").has_value());

  const auto* occ = map.find("OCCUPATION_TYPE");
  REQUIRE(occ != nullptr);
  CHECK(occ->categories == std::vector<std::string>{"", "Drivers"});
  const auto restored = EncodingMap::from_json(map.to_json());
  CHECK(restored.to_json() == map.to_json());
}

TEST_CASE("merge errors") {
  std::istringstream app(std::string(kAppHeader) + app_row(1, "F", -9000, -10, ""));
  std::istringstream credit("ID,MONTHS_BALANCE,STATUS\n2,0,C\n");
  const auto apps = parse_applications(app);
  const auto history = parse_credit(credit);
  CHECK(code_of([&] { merge_and_label(apps, history); }) == ErrorCode::NoOverlap);

  std::istringstream credit1("ID,MONTHS_BALANCE,STATUS\n1,0,C\n");
  const auto history1 = parse_credit(credit1);
  const std::vector<std::string> drop{"NO_SUCH_COLUMN"};
  CHECK(code_of([&] { merge_and_label(apps, history1, drop); }) == ErrorCode::UnknownColumn);
}

TEST_CASE("unseen category at encode time") {
  std::istringstream a(std::string(kAppHeader) + app_row(1, "F", -9000, -10, "Drivers"));
  std::istringstream b(std::string(kAppHeader) + app_row(1, "F", -9000, -10, "Pilots"));
  std::istringstream c1("ID,MONTHS_BALANCE,STATUS\n1,0,C\n");
  std::istringstream c2("ID,MONTHS_BALANCE,STATUS\n1,0,C\n");
  const auto ta = merge_and_label(parse_applications(a), parse_credit(c1));
  const auto tb = merge_and_label(parse_applications(b), parse_credit(c2));
  const auto map = fit_encoder(ta);
  CHECK(code_of([&] { encode(tb, map); }) == ErrorCode::UnseenCategory);
}

TEST_CASE("synthetic tables are deterministic and hit the default rate") {
  const auto a = generate_synthetic(400, 0.1, 3);
  const auto b = generate_synthetic(400, 0.1, 3);
  CHECK(a.applications_csv == b.applications_csv);
  CHECK(a.credit_csv == b.credit_csv);
  CHECK(a.applications_csv.rfind(kAppHeader, 0) == 0);
  CHECK(a.credit_csv.rfind("ID,MONTHS_BALANCE,STATUS\n", 0) == 0);

  const auto data = credrisk::testing::synthetic_dataset(400, 0.1, 3);
  CHECK(data.size() == 400);
  CHECK(data.features.cols() == 14);
  CHECK(data.count(DefaultLabel::Default) == 40);
  CHECK(code_of([] { generate_synthetic(100, 1.5, 1); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("dataset csv round trip") {
  const auto data = credrisk::testing::synthetic_dataset(60, 0.2, 8);
  std::ostringstream out;
  write_dataset_csv(out, data);
  std::istringstream in(out.str());
  const auto back = read_dataset_csv(in);
  CHECK(back.features.column_names() == data.features.column_names());
  CHECK(back.features.values() == data.features.values());
  CHECK(back.labels == data.labels);
}
