#include "capscore/fixtures.hpp"

namespace capscore {

ReferenceSet worked_example_references() {
  ReferenceSet set;
  set.image_id = "544";
  const char* texts[] = {
      "A man swinging a bat at a baseball on a field.",
      "A man that has a baseball bat standing in the dirt.",
      "The stands are packed as a baseball player in a gray uniform holds a bat as a catcher "
      "holds out his mitt.",
      "A baseball player holding a bat over the top of a base.",
      "A baseball game is going on for the crowd.",
  };
  int id = 1;
  for (const char* t : texts) set.refs.push_back({std::to_string(id++), set.image_id, t});
  return set;
}

Caption worked_example_candidate() {
  return {"cand-544", "544", "A baseball player is swinging his bat to hit the ball."};
}

}  // namespace capscore
