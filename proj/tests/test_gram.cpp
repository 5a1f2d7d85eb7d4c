#include <doctest.h>

#include "conecert/pipeline.hpp"
