#include "cqa/queries.hpp"

#include "cqa/parse.hpp"

namespace cqa::queries {

ConjunctiveQuery q1() { return parse_query("R1(x; y) & R2(y; z)"); }
ConjunctiveQuery q2() { return parse_query("R1(x; y) & R2(y; x)"); }
ConjunctiveQuery q3() { return parse_query("R1(x; y) & R2(z; y)"); }
ConjunctiveQuery q4() { return parse_query("R(x; y, z) & R(z; x, y)"); }
ConjunctiveQuery q5() { return parse_query("R1(x; y) & S1(y, z; x)"); }
ConjunctiveQuery q2p() { return path_query({"R", "X", "R", "Y", "R", "Y"}); }
ConjunctiveQuery q3p() { return path_query({"R", "X", "R", "X", "R", "Y", "R", "Y"}); }

ConjunctiveQuery path_query(const std::vector<std::string>& letters) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < letters.size(); ++i) {
    atoms.push_back(Atom{letters[i], {"x" + std::to_string(i)}, {"x" + std::to_string(i + 1)}});
  }
  return ConjunctiveQuery(std::move(atoms));
}

bool is_q4_shape(const ConjunctiveQuery& q) {
  if (q.size() != 2) return false;
  const Atom& a = q.atom(0);
  const Atom& b = q.atom(1);
  if (a.relation != b.relation || a.key.size() != 1 || a.value.size() != 2) return false;
  const auto& x = a.key[0];
  const auto& y = a.value[0];
  const auto& z = a.value[1];
  if (x == y || y == z || x == z) return false;
  return b.key[0] == z && b.value[0] == x && b.value[1] == y;
}

}  // namespace cqa::queries
