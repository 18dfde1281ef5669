// error.cpp - out-of-line members of the exception hierarchy.
#include "dlyap/error.hpp"

#include <sstream>

namespace dlyap {

namespace {

std::string singular_block_message(int vertex, double cond, int rank, int size) {
    std::ostringstream os;
    os << "singular block at vertex " << vertex << " (rank " << rank << " of " << size
       << ", condition number " << cond << ")";
    return os.str();
}

} // namespace

SingularBlock::SingularBlock(int vertex, double condition_number, int rank, int size)
    : Error(singular_block_message(vertex, condition_number, rank, size)),
      vertex_(vertex),
      condition_number_(condition_number),
      rank_(rank),
      size_(size) {}

} // namespace dlyap
