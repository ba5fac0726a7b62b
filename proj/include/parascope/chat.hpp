#pragma once

#include <string>
#include <vector>

namespace parascope {

struct ChatMessage {
    std::string role;  // "system", "user" or "assistant"
    std::string content;
};

// Chat-completion client. Implementations throw ClientError on transport or
// protocol failure; retry policy lives with the caller.
class ChatClient {
public:
    virtual ~ChatClient() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
    virtual std::string client_id() const = 0;
};

// Runs complete() up to 1 + max_retries times, rethrowing the last ClientError.
std::string complete_with_retries(ChatClient& client, const std::vector<ChatMessage>& messages,
                                  int max_retries);

}  // namespace parascope
