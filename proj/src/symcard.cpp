#include "ballean/symcard.hpp"

namespace ballean {

SymCard parseSymCard(const std::string& word) {
  if (word == "aleph0" || word == "omega") return SymCard::aleph0();
  if (word == "aleph1+" || word == "aleph1") return SymCard::atLeastAleph1();
  if (!word.empty() && word.find_first_not_of("0123456789") == std::string::npos)
    return SymCard::fin(std::stoull(word));
  return SymCard::atLeastAleph1(word);
}

}  // namespace ballean
