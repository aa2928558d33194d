#include "hdfl/cli.hpp"

int main(int argc, char** argv) {
    return hdfl::cli_main(argc, argv);
}
