#include "mapmrf/io.hpp"

int main(int argc, char** argv) {
    return mapmrf::cli_main(argc, argv);
}
