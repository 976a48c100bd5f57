#pragma once

#include <string>

namespace pensionlab {

struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    friend bool operator==(const Date&, const Date&) = default;
};

// Strict YYYY-MM-DD.
Date parse_date(const std::string& s);
std::string to_string(const Date& d);
bool is_valid(const Date& d);

long days_from_civil(const Date& d);
Date civil_from_days(long z);

// Calendar month arithmetic; day clamped to month end.
Date add_months(const Date& d, int months);

// Age in fractional years: whole months elapsed / 12 plus the elapsed part
// of the current month.
double age_at(const Date& dob, const Date& at);

}  // namespace pensionlab
