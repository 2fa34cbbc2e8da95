#include <string>
#include <vector>

#include "osp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args;
    args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
    for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
    return osp::cli_main(args);
}
