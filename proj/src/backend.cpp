#include "wolf/backend.hpp"

#include "wolf/errors.hpp"

namespace wolf {

void validate_chat_request(const ChatRequest& request) {
  if (request.user_text.empty())
    throw DomainError("chat request must carry non-empty user text");
}

}  // namespace wolf
