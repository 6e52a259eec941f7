#include <iostream>

#include "app/app.hpp"

int main(int argc, char** argv) {
  return demotrend::app::run_cli(argc, argv, std::cout, std::cerr);
}
