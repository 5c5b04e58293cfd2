#include "fiberlab/fiberlab.hpp"
int main(){return 0;}
