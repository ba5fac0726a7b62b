#include "parascope/chat.hpp"

#include "parascope/errors.hpp"

namespace parascope {

std::string complete_with_retries(ChatClient& client, const std::vector<ChatMessage>& messages,
                                  int max_retries) {
    for (int attempt = 0;; ++attempt) {
        try {
            return client.complete(messages);
        } catch (const ClientError&) {
            if (attempt >= max_retries) throw;
        }
    }
}

}  // namespace parascope
