#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "credrisk/csv.hpp"
#include "credrisk/error.hpp"
#include "credrisk/ingest.hpp"
#include "credrisk/random.hpp"

namespace credrisk {

namespace {

struct Weighted {
  const char* value;
  double weight;
};

std::string pick(Rng& rng, std::initializer_list<Weighted> options) {
  double total = 0.0;
  for (const auto& o : options) total += o.weight;
  double u = rng.uniform() * total;
  for (const auto& o : options) {
    if (u < o.weight) return o.value;
    u -= o.weight;
  }
  return std::data(options)[options.size() - 1].value;
}

constexpr std::int64_t kPensionerSentinel = 365243;

struct Customer {
  ApplicationRecord app;
  double age = 0.0;
  double employed_years = 0.0;
  double risk = 0.0;
};

// Latent risk. The regions are bands and interactions, so a single linear
// score over the raw columns cannot order customers well.
double latent_risk(const Customer& c, Rng& rng) {
  const double income = c.app.amt_income_total;
  const double age = c.age;
  double r = 0.0;
  if (age >= 33.0 && age <= 47.0 && income < 135000.0) r += 2.4;
  if (age < 30.0 && income > 210000.0) r += 2.2;
  if (c.app.days_employed <= 0 && c.employed_years < 1.5 && c.app.cnt_fam_members >= 3.0) r += 2.0;
  if (age > 58.0 && c.app.days_employed <= 0 && c.employed_years > 25.0) r += 1.6;
  if ((c.app.flag_own_realty == "N") != (c.app.flag_own_car == "Y")) r += 0.4;
  return r + rng.normal(0.0, 0.55);
}

Customer make_customer(std::int64_t id, Rng& rng) {
  Customer c;
  auto& a = c.app;
  a.id = id;
  a.code_gender = rng.bernoulli(0.34) ? "M" : "F";
  a.flag_own_car = rng.bernoulli(0.38) ? "Y" : "N";
  a.flag_own_realty = rng.bernoulli(0.67) ? "Y" : "N";
  c.age = rng.uniform(21.0, 68.0);

  const bool pensioner = c.age > 57.0 && rng.bernoulli(0.75);
  if (pensioner) {
    a.name_income_type = "Pensioner";
  } else {
    a.name_income_type = pick(rng, {{"Working", 0.56}, {"Commercial associate", 0.27},
                                    {"State servant", 0.15}, {"Student", 0.02}});
  }
  a.name_education_type = pick(rng, {{"Secondary / secondary special", 0.68}, {"Higher education", 0.27},
                                     {"Incomplete higher", 0.035}, {"Lower secondary", 0.01},
                                     {"Academic degree", 0.005}});
  a.name_family_status = pick(rng, {{"Married", 0.68}, {"Single / not married", 0.13}, {"Civil marriage", 0.08},
                                    {"Separated", 0.06}, {"Widow", 0.05}});
  a.name_housing_type = pick(rng, {{"House / apartment", 0.89}, {"With parents", 0.05},
                                   {"Municipal apartment", 0.03}, {"Rented apartment", 0.015},
                                   {"Office apartment", 0.01}, {"Co-op apartment", 0.005}});

  const double log_income = rng.normal(std::log(160000.0), 0.5);
  a.amt_income_total = std::max(27000.0, std::round(std::exp(log_income) / 2250.0) * 2250.0);

  const double kids_u = rng.uniform();
  a.cnt_children = kids_u < 0.66 ? 0 : kids_u < 0.86 ? 1 : kids_u < 0.97 ? 2 : kids_u < 0.995 ? 3 : 4;
  const bool partnered = a.name_family_status == "Married" || a.name_family_status == "Civil marriage";
  a.cnt_fam_members = static_cast<double>(a.cnt_children + (partnered ? 2 : 1));

  a.days_birth = -static_cast<std::int64_t>(std::floor(c.age * 365.25));
  if (pensioner) {
    a.days_employed = kPensionerSentinel;
    c.employed_years = 0.0;
  } else {
    const double span = c.age - 18.0;
    const double u = rng.uniform();
    c.employed_years = std::max(0.05, span * u * u);
    a.days_employed = -static_cast<std::int64_t>(std::floor(c.employed_years * 365.25));
  }
  a.flag_mobil = 1;
  a.flag_work_phone = rng.bernoulli(0.22) ? 1 : 0;
  a.flag_phone = rng.bernoulli(0.29) ? 1 : 0;
  a.flag_email = rng.bernoulli(0.09) ? 1 : 0;
  if (pensioner) {
    a.occupation_type = "";
  } else {
    a.occupation_type = pick(rng, {{"Laborers", 0.25}, {"Core staff", 0.15}, {"Sales staff", 0.14},
                                   {"Managers", 0.12}, {"Drivers", 0.09}, {"High skill tech staff", 0.06},
                                   {"Accountants", 0.05}, {"Medicine staff", 0.05}, {"", 0.09}});
  }
  return c;
}

std::string format_income(double income) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", income);
  return buf;
}

void emit_history(std::ostringstream& out, std::int64_t id, bool defaulted, Rng& rng) {
  const int months = 6 + static_cast<int>(rng.index(55));
  std::vector<std::string> statuses(static_cast<std::size_t>(months));
  const bool opened_late = rng.bernoulli(0.3);
  const int first_active = opened_late ? static_cast<int>(rng.index(static_cast<std::size_t>(months / 2))) : 0;
  for (int m = 0; m < months; ++m) {
    // m counts back from the current month.
    if (months - 1 - m < first_active) {
      statuses[static_cast<std::size_t>(m)] = "X";
      continue;
    }
    const double u = rng.uniform();
    statuses[static_cast<std::size_t>(m)] = u < 0.45 ? "C" : u < 0.62 ? "X" : u < 0.95 ? "0" : "1";
  }
  if (defaulted) {
    const int bad_months = 1 + static_cast<int>(rng.index(3));
    const std::size_t start = rng.index(static_cast<std::size_t>(months));
    for (int k = 0; k < bad_months; ++k) {
      const std::size_t m = std::min(static_cast<std::size_t>(months - 1), start + static_cast<std::size_t>(k));
      static const char* severe[] = {"2", "2", "3", "4", "5"};
      statuses[m] = severe[rng.index(5)];
    }
  }
  for (int m = 0; m < months; ++m) {
    out << id << ',' << -m << ',' << statuses[static_cast<std::size_t>(m)] << '\n';
  }
}

}  // namespace

SyntheticTables generate_synthetic(std::size_t n_customers, double default_rate, std::uint64_t seed) {
  if (n_customers < 10) fail(ErrorCode::InvalidArgument, "synthetic generation needs at least 10 customers");
  if (!(default_rate > 0.0 && default_rate < 1.0)) {
    fail(ErrorCode::InvalidArgument, "default rate must lie strictly between 0 and 1");
  }
  Rng rng(seed);
  std::vector<Customer> customers;
  customers.reserve(n_customers);
  for (std::size_t i = 0; i < n_customers; ++i) {
    customers.push_back(make_customer(5008804 + static_cast<std::int64_t>(i), rng));
  }
  for (auto& c : customers) c.risk = latent_risk(c, rng);

  // The riskiest round(rate * n) customers default, so the realised rate is
  // exact up to rounding.
  const auto n_default = static_cast<std::size_t>(std::llround(default_rate * static_cast<double>(n_customers)));
  std::vector<std::size_t> order(n_customers);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return customers[a].risk > customers[b].risk; });
  std::vector<bool> defaulted(n_customers, false);
  for (std::size_t k = 0; k < n_default; ++k) defaulted[order[k]] = true;

  std::ostringstream apps;
  std::vector<std::string> header(kApplicationColumns.begin(), kApplicationColumns.end());
  apps << csv::join(header) << '\n';
  for (const auto& c : customers) {
    const auto& a = c.app;
    apps << csv::join({std::to_string(a.id), a.code_gender, a.flag_own_car, a.flag_own_realty,
                       std::to_string(a.cnt_children), format_income(a.amt_income_total), a.name_income_type,
                       a.name_education_type, a.name_family_status, a.name_housing_type,
                       std::to_string(a.days_birth), std::to_string(a.days_employed), std::to_string(a.flag_mobil),
                       std::to_string(a.flag_work_phone), std::to_string(a.flag_phone),
                       std::to_string(a.flag_email), a.occupation_type, format_income(a.cnt_fam_members)})
         << '\n';
  }

  std::ostringstream credit;
  credit << "ID,MONTHS_BALANCE,STATUS\n";
  for (std::size_t i = 0; i < n_customers; ++i) emit_history(credit, customers[i].app.id, defaulted[i], rng);

  return {apps.str(), credit.str()};
}

}  // namespace credrisk
