// SPDX-License-Identifier: Apache-2.0

#include "ldk/io.hpp"

int main(int argc, char** argv) { return ldk::run(argc, argv); }
