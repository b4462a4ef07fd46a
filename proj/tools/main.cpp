#include "climnorm/cli.hpp"

int main(int argc, char** argv) {
    return climnorm::cli::run(argc, argv);
}
