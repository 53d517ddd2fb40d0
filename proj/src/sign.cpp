#include "qpn/sign.hpp"

namespace qpn {

std::string_view to_string(Sign s) {
  switch (s) {
    case Sign::Plus:
      return "+";
    case Sign::Minus:
      return "-";
    case Sign::Zero:
      return "0";
    case Sign::Ambig:
      return "?";
  }
  return "?";
}

char to_char(Sign s) { return to_string(s)[0]; }

std::optional<Sign> parse_sign(std::string_view text) {
  if (text == "+") return Sign::Plus;
  if (text == "-" || text == "\xE2\x88\x92") return Sign::Minus;
  if (text == "0") return Sign::Zero;
  if (text == "?") return Sign::Ambig;
  return std::nullopt;
}

}  // namespace qpn
