#ifndef PAUSESEG_ERROR_HPP
#define PAUSESEG_ERROR_HPP

#include <stdexcept>
#include <string>

namespace pauseseg {

// Problem with user-supplied data: unreadable file, malformed record,
// violated input contract. The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pauseseg

#endif  // PAUSESEG_ERROR_HPP
