#pragma once

namespace fb::cli {

// Exit status: 0 = all checks pass, 1 = mathematical check failure,
// 2 = configuration error.
int run(int argc, char** argv);

}  // namespace fb::cli
