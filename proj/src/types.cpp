#include "cropforge/types.hpp"

namespace cropforge {

bool is_leap_year(int year) noexcept {
  return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
}

int days_in_year(int year) noexcept { return is_leap_year(year) ? 366 : 365; }

Date next_day(Date d) noexcept {
  if (d.doy >= days_in_year(d.year)) return {d.year + 1, 1};
  return {d.year, d.doy + 1};
}

Date add_days(Date d, int days) noexcept {
  d.doy += days;
  while (d.doy > days_in_year(d.year)) {
    d.doy -= days_in_year(d.year);
    ++d.year;
  }
  while (d.doy < 1) {
    --d.year;
    d.doy += days_in_year(d.year);
  }
  return d;
}

}  // namespace cropforge
